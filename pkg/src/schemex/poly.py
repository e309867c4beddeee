"""Predistance polynomials and related identities over a regular graph spectrum.

The inner product is <p, q> = (1/n) sum_i m_i p(theta_i) q(theta_i).  The
predistance polynomials are the unique orthogonal system with deg p_i = i and
<p_i, p_i> = p_i(theta_0) > 0; they are built by Gram-Schmidt on the monomials
(with one re-orthogonalization pass) followed by the normalization
p_i = q_i(theta_0)/<q_i, q_i> * q_i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

#: Gram-Schmidt breakdown threshold: ||q_i||^2 below this times ||t^i||^2
GS_BREAKDOWN_RTOL = 1e-12


class DegenerateSpectrum(ValueError):
    """Eigenvalues are not strictly decreasing (a repeated theta)."""


class NumericalBreakdown(RuntimeError):
    """Gram-Schmidt norm collapsed; the spectrum is numerically degenerate."""


class RepeatedBeta(ValueError):
    """Interpolation nodes must be mutually distinct."""


@dataclass(eq=False)
class Spectrum:
    """Eigenvalues theta_0 > ... > theta_d with positive multiplicities, m_0 = 1."""

    theta: np.ndarray
    m: np.ndarray
    n: int

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        m = np.asarray(self.m, dtype=float)
        if theta.ndim != 1 or theta.shape != m.shape or theta.size < 1:
            raise ValueError("theta and m must be 1-d arrays of equal positive length")
        gaps = np.diff(theta)
        if np.any(gaps >= 0):
            j = int(np.flatnonzero(gaps >= 0)[0])
            raise DegenerateSpectrum(
                f"theta_{j} = {theta[j]!r} is not strictly above theta_{j + 1} = {theta[j + 1]!r}"
            )
        if m.min() <= 0:
            raise ValueError("multiplicities must be positive")
        if abs(m[0] - 1.0) > 1e-6:
            raise ValueError(f"m_0 = {m[0]} but the top eigenvalue must be simple")
        if abs(m.sum() - self.n) > 1e-6 * max(1.0, self.n):
            raise ValueError(f"multiplicities sum to {m.sum()}, expected n = {self.n}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "m", m)

    @property
    def d(self) -> int:
        return self.theta.size - 1


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial in the monomial basis; coeffs ascending, trailing zeros trimmed."""

    coeffs: tuple

    @staticmethod
    def of(seq) -> "Polynomial":
        c = [float(v) for v in seq]
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        return Polynomial(tuple(c))

    @classmethod
    def monomial(cls, k: int) -> "Polynomial":
        return cls(tuple([0.0] * k + [1.0]))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return npoly.polyval(x, self.coeffs)

    def __add__(self, other):
        return Polynomial.of(npoly.polyadd(self.coeffs, other.coeffs))

    def __sub__(self, other):
        return Polynomial.of(npoly.polysub(self.coeffs, other.coeffs))

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return Polynomial.of(npoly.polymul(self.coeffs, other.coeffs))
        return Polynomial.of(np.asarray(self.coeffs) * float(other))

    __rmul__ = __mul__


def inner_product(p, q, sp: Spectrum) -> float:
    """(1/n) sum_i m_i p(theta_i) q(theta_i)."""
    return float((sp.m * p(sp.theta) * q(sp.theta)).sum() / sp.n)


@dataclass(eq=False)
class PredistanceSystem:
    """The polynomials p_0..p_d plus their values table.

    values[i, h] = p_i(theta_h) is computed inside the orthogonalization (not
    by re-evaluating coefficients) and is the authority for all route
    comparisons; norms[i] = <p_i, p_i> = p_i(theta_0).
    """

    spectrum: Spectrum
    polys: tuple
    values: np.ndarray
    norms: np.ndarray


def predistance_polynomials(sp: Spectrum) -> PredistanceSystem:
    d = sp.d
    w = sp.m / sp.n
    mono = np.vander(sp.theta, d + 1, increasing=True).T  # mono[i] = theta**i

    q_vals = np.zeros((d + 1, d + 1))
    q_coef = np.zeros((d + 1, d + 1))
    q_norm = np.zeros(d + 1)
    for i in range(d + 1):
        v = mono[i].copy()
        c = np.zeros(d + 1)
        c[i] = 1.0
        for _ in range(2):  # classical pass + one re-orthogonalization pass
            for j in range(i):
                proj = float((w * v * q_vals[j]).sum() / q_norm[j])
                v -= proj * q_vals[j]
                c -= proj * q_coef[j]
        norm = float((w * v * v).sum())
        if norm < GS_BREAKDOWN_RTOL * float((w * mono[i] * mono[i]).sum()):
            raise NumericalBreakdown(f"||q_{i}||^2 = {norm:.3e} collapsed during Gram-Schmidt")
        q_vals[i] = v
        q_coef[i] = c
        q_norm[i] = norm

    values = np.zeros((d + 1, d + 1))
    polys = []
    for i in range(d + 1):
        scale = q_vals[i, 0] / q_norm[i]  # q_i(theta_0) / <q_i, q_i>
        values[i] = scale * q_vals[i]
        polys.append(Polynomial.of(scale * q_coef[i][: i + 1]))
    norms = (w[None, :] * values * values).sum(axis=1)
    return PredistanceSystem(spectrum=sp, polys=tuple(polys), values=values, norms=norms)


def kappa(sp: Spectrum, i: int) -> float:
    """prod_{j=1..d, j != i} (theta_0 - theta_j) / (theta_i - theta_j); empty product is 1."""
    if not 1 <= i <= sp.d:
        raise ValueError(f"i must be in 1..{sp.d}")
    th = sp.theta
    out = 1.0
    for j in range(1, sp.d + 1):
        if j == i:
            continue
        out *= (th[0] - th[j]) / (th[i] - th[j])
    return out


def lagrange_power_identity(betas, x: float, h: int) -> float:
    """sum_i beta_i^h prod_{k != i} (x - beta_k)/(beta_i - beta_k).

    For mutually distinct nodes and 0 <= h <= len(betas) - 1 this equals x^h
    exactly (interpolation of t^h is exact below the node count); the function
    computes the left-hand side so the identity stays testable.
    """
    b = np.asarray(betas, dtype=float)
    if b.ndim != 1 or b.size < 1:
        raise ValueError("betas must be a non-empty 1-d sequence")
    if np.unique(b).size != b.size:
        raise RepeatedBeta(f"nodes {betas} contain a repeat")
    if not 0 <= h <= b.size - 1:
        raise ValueError(f"h must be in 0..{b.size - 1}")
    total = 0.0
    for i in range(b.size):
        others = np.delete(b, i)
        total += b[i] ** h * float(np.prod((x - others) / (b[i] - others)))
    return total


def graph_property_residual(sp: Spectrum, ps: PredistanceSystem, i: int) -> float:
    """kappa_i + m_i p_d(theta_i) / p_d(theta_0); about 0 for connected regular graph spectra."""
    if not 1 <= i <= sp.d:
        raise ValueError(f"i must be in 1..{sp.d}")
    vd = ps.values[sp.d]
    return float(kappa(sp, i) + sp.m[i] * vd[i] / vd[0])
