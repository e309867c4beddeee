"""Decide the P-polynomial (metric) property of a scheme by independent routes.

Four routes are provably equivalent and are run side by side:

* ``tridiagonal``: greedy reordering of the first intersection matrix into an
  irreducible tridiagonal band (pure integer arithmetic, no preconditions);
* ``nstar``: which relations first appear in which power of A_1 (exact integer
  walk counts; needs the top eigenvalue separated, i.e. the relation-1 graph
  connected);
* ``excess``: kappa_i = -Q_i(l) for a unique column l of the second
  eigenmatrix (needs all theta distinct);
* ``predistance``: p_d(theta_h) = P_l(h) for a unique column l (same
  precondition).

Disagreement between routes whose preconditions hold is a bug or a tolerance
failure and raises RouteDisagreement instead of guessing.  The greedy chain on
the Krein tensor (``q_poly``) decides the dual property and is reported but
never folded into the consensus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .poly import DegenerateSpectrum, PredistanceSystem, Spectrum, kappa, predistance_polynomials
from .scheme_core import AssociationScheme, IntersectionTensor
from .spectral import (
    EIG_GROUP_RTOL,
    KreinTensor,
    SpectralData,
    krein_parameters,
    primitive_idempotents,
    spectral_data,
)

YES = "yes"
NO = "no"
PRECONDITION_FAILED = "precondition-failed"

#: relative tolerance for matching kappa against -Q and p_d against P columns
ROUTE_MATCH_RTOL = 1e-6

#: generic residual scale (Krein chain threshold, expansion checks)
BASE_TOL = 1e-8


class SpectrumNotSimple(ValueError):
    """An operation needed mutually distinct eigenvalues."""


class PerronNotSeparated(ValueError):
    """theta_0 coincides with another eigenvalue (relation-1 graph disconnected)."""


class MultipleL(RuntimeError):
    """More than one column matched; reported loudly, never silently resolved."""


class RouteDisagreement(RuntimeError):
    """Provably equivalent routes returned different verdicts."""


@dataclass(frozen=True)
class RouteVerdict:
    route: str
    verdict: str
    ordering: tuple | None = None
    l: int | None = None
    max_residual: float = 0.0
    witness: str | None = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "ordering": list(self.ordering) if self.ordering is not None else None,
            "l": self.l,
            "max_residual": self.max_residual,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class NStarChain:
    """sets[h] = relations whose coefficient in A_1^h is nonzero for the first time."""

    sets: tuple

    def union_through(self, h: int) -> frozenset:
        out = frozenset()
        for part in self.sets[: h + 1]:
            out |= part
        return out

    def singletons(self):
        if any(len(part) != 1 for part in self.sets):
            return None
        return tuple(next(iter(part)) for part in self.sets)


@dataclass(eq=False)
class DetectionReport:
    n: int
    d: int
    valencies: tuple
    tridiagonal: RouteVerdict
    nstar: RouteVerdict
    excess: RouteVerdict
    predistance: RouteVerdict
    q_poly: RouteVerdict
    consensus: str
    preconditions_ok: bool
    ordering: tuple | None
    l: int | None

    @property
    def status(self) -> str:
        """Overall outcome: yes / no / precondition-failed.

        The tridiagonal route always produces a yes/no consensus; the status
        downgrades a "no" to "precondition-failed" when some spectral route
        could not run, so a disconnected or degenerate input is never reported
        as a clean negative.
        """
        if self.consensus == YES:
            return YES
        return NO if self.preconditions_ok else PRECONDITION_FAILED

    def routes(self) -> dict:
        return {
            "tridiagonal": self.tridiagonal,
            "nstar": self.nstar,
            "excess": self.excess,
            "predistance": self.predistance,
            "q_poly": self.q_poly,
        }


def _greedy_chain(mat, d, positive):
    """Shared chain builder: mat[j, cur] read through ``positive``.

    Returns (ordering, None) on success or (None, witness) when the chain
    stalls or branches.
    """
    order = [0, 1]
    used = {0, 1}
    while len(order) < d + 1:
        cur = order[-1]
        cands = [j for j in range(d + 1) if j not in used and positive(mat[j, cur])]
        if len(cands) != 1:
            return None, (
                f"chain {tuple(order)} cannot be extended from {cur}: "
                f"{len(cands)} candidates {cands}"
            )
        order.append(cands[0])
        used.add(cands[0])
    return tuple(order), None


def _band_violation(mat, order, positive, zero):
    m = len(order)
    idx = np.asarray(order)
    R = mat[np.ix_(idx, idx)]
    for a in range(m):
        for b in range(m):
            if abs(a - b) >= 2 and not zero(R[a, b]):
                return f"entry ({order[a]},{order[b]}) = {R[a, b]} lies outside the band"
            if abs(a - b) == 1 and not positive(R[a, b]):
                return f"band entry ({order[a]},{order[b]}) = {R[a, b]} is not positive"
    return None


def tridiagonal_route(t: IntersectionTensor) -> RouteVerdict:
    """Greedy relation chain on p^j_{1,i}; exact integers, total (no preconditions)."""
    mat = t.p[:, 1, :]  # mat[j, i] = p^j_{1,i}
    order, witness = _greedy_chain(mat, t.d, lambda v: v > 0)
    if order is None:
        return RouteVerdict("tridiagonal", NO, witness=witness)
    bad = _band_violation(mat, order, lambda v: v > 0, lambda v: v == 0)
    if bad is not None:
        return RouteVerdict("tridiagonal", NO, witness=bad)
    return RouteVerdict("tridiagonal", YES, ordering=order, l=order[-1])


def nstar_sets(s: AssociationScheme, sd: SpectralData) -> NStarChain:
    """First-appearance sets of the relations in A_1^0, A_1^1, ..., A_1^d.

    Coefficients are exact integer walk counts, read off the regular
    representation: the coefficient vector of A_1^h is B_1^h applied to the
    unit vector of A_0 (plain Python integers, no overflow).  If some relation
    never appears, the relation-1 graph is disconnected, i.e. theta_0 is not
    separated from the rest of the spectrum: PerronNotSeparated.
    """
    d = s.d
    B1 = [[int(v) for v in row] for row in s.tensor.p[:, 1, :]]
    coeff = [1] + [0] * d  # A_1^0 = A_0
    first = [None] * (d + 1)
    first[0] = 0
    for h in range(1, d + 1):
        coeff = [sum(B1[k][j] * coeff[j] for j in range(d + 1)) for k in range(d + 1)]
        for j, v in enumerate(coeff):
            if v != 0 and first[j] is None:
                first[j] = h
    if any(f is None for f in first):
        unreached = [j for j, f in enumerate(first) if f is None]
        near = [
            j for j in range(1, d + 1)
            if abs(sd.theta[j] - sd.theta[0]) <= 1e-6 * max(1.0, abs(sd.theta[0]))
        ]
        raise PerronNotSeparated(
            f"relations {unreached} never appear in powers of A_1 up to d = {d}; "
            f"theta_0 = {sd.theta[0]:g} is shared (rows {near} by the float data)"
        )
    sets = tuple(
        frozenset(j for j, f in enumerate(first) if f == h) for h in range(d + 1)
    )
    assert sets[0] == frozenset({0}) and sets[1] == frozenset({1})
    return NStarChain(sets=sets)


def _theta_collision(sd: SpectralData, eig_rtol: float = EIG_GROUP_RTOL):
    """Indices of two eigenvalues closer than tolerance, or None if all distinct."""
    th = np.sort(sd.theta)[::-1]
    thr = eig_rtol * max(1.0, float(np.abs(th).max()))
    gaps = th[:-1] - th[1:]
    tight = np.flatnonzero(gaps <= thr)
    if tight.size == 0:
        return None
    j = int(tight[0])
    return j, j + 1


def _scheme_spectrum(sd: SpectralData) -> Spectrum:
    return Spectrum(theta=sd.theta.copy(), m=sd.multiplicities.copy(), n=sd.n)


def _match_columns(values, targets, match_rtol):
    """For each column l: scaled and raw max deviation of values vs targets[:, l]."""
    raws, scaleds = [], []
    for l in range(targets.shape[1]):
        col = targets[:, l]
        raw = np.abs(values - col)
        scaled = raw / np.maximum(1.0, np.maximum(np.abs(values), np.abs(col)))
        raws.append(float(raw.max()))
        scaleds.append(float(scaled.max()))
    passing = [l for l, sc in enumerate(scaleds) if sc <= match_rtol]
    return passing, raws, scaleds


def excess_route(sd: SpectralData, t: IntersectionTensor, *,
                 match_rtol: float = ROUTE_MATCH_RTOL) -> RouteVerdict:
    """Match (kappa_1..kappa_d) against the columns -Q_i(l), i >= 1.

    Exactly one matching l is required for a yes; zero is a no; several raise
    MultipleL.  Q is cross-checked against m_i P_l(i)/k_l before use.
    """
    col = _theta_collision(sd)
    if col is not None:
        j1, j2 = col
        return RouteVerdict(
            "excess", PRECONDITION_FAILED,
            witness=f"theta values at sorted positions {j1} and {j2} coincide",
        )
    sp = _scheme_spectrum(sd)
    d = sd.d
    kap = np.array([kappa(sp, i) for i in range(1, d + 1)])
    k = sd.valencies.astype(float)
    m = sd.multiplicities
    # targets[i-1, l] = -Q_i(l), checked against the multiplicity identity
    targets = -sd.Q[:, 1:].T
    alt = -(m[1:, None] * sd.P[1:, :] / k[None, :])
    if np.abs(targets - alt).max() > 1e-6 * max(1.0, float(np.abs(targets).max())):
        raise RouteDisagreement("Q columns disagree with m_i P_l(i)/k_l")
    passing, raws, scaleds = _match_columns(kap, targets, match_rtol)
    if len(passing) > 1:
        raise MultipleL(f"columns {passing} all satisfy kappa_i = -Q_i(l)")
    if len(passing) == 1:
        l = passing[0]
        return RouteVerdict("excess", YES, l=l, max_residual=raws[l])
    best = int(np.argmin(scaleds))
    return RouteVerdict(
        "excess", NO, max_residual=raws[best],
        witness=f"no column of -Q matches kappa; closest is l={best} "
                f"(scaled deviation {scaleds[best]:.3e})",
    )


def predistance_route(sd: SpectralData, ps: PredistanceSystem, *,
                      match_rtol: float = ROUTE_MATCH_RTOL) -> RouteVerdict:
    """Match the values p_d(theta_h) against the columns P_l(h) of the first eigenmatrix."""
    col = _theta_collision(sd)
    if col is not None:
        j1, j2 = col
        return RouteVerdict(
            "predistance", PRECONDITION_FAILED,
            witness=f"theta values at sorted positions {j1} and {j2} coincide",
        )
    vals = ps.values[sd.d]  # p_d at every theta_h
    passing, raws, scaleds = _match_columns(vals, sd.P, match_rtol)
    if len(passing) > 1:
        raise MultipleL(f"columns {passing} of P all match p_d on the spectrum")
    if len(passing) == 1:
        l = passing[0]
        return RouteVerdict("predistance", YES, l=l, max_residual=raws[l])
    best = int(np.argmin(scaleds))
    return RouteVerdict(
        "predistance", NO, max_residual=raws[best],
        witness=f"p_d matches no column of P; closest is l={best} "
                f"(scaled deviation {scaleds[best]:.3e})",
    )


def mstar_decomposition_residual(s: AssociationScheme, sd: SpectralData, i: int) -> float:
    """Max-abs residual of prod_{j!=i}(A_1 - theta_j I)/(theta_i - theta_j) - kappa_i E_0 - E_i.

    The product interpolates through all eigenvalues except theta_0 and
    theta_i, so it must collapse onto kappa_i E_0 + E_i whenever the theta are
    mutually distinct -- P-polynomial or not.
    """
    if _theta_collision(sd) is not None:
        raise SpectrumNotSimple("the decomposition needs mutually distinct theta")
    if not 1 <= i <= s.d:
        raise ValueError(f"i must be in 1..{s.d}")
    th = sd.theta
    A1 = s.adjacency(1).astype(float)
    eye = np.eye(s.n)
    M = eye
    for j in range(1, s.d + 1):
        if j == i:
            continue
        M = (A1 - th[j] * eye) @ M / (th[i] - th[j])
    kap = kappa(_scheme_spectrum(sd), i)
    E_i = sd.Q[s.rel, i] / s.n
    return float(np.abs(M - kap / s.n - E_i).max())


def q_polynomial_route(kt: KreinTensor, *, nonzero_tol: float = BASE_TOL) -> RouteVerdict:
    """Greedy chain on the Krein tensor: the dual (cometric) analogue of tridiagonal."""
    q = kt.q
    n = float(q[0].diagonal().sum())  # q^0_{ii} = m_i sums to n
    thr = nonzero_tol * max(1.0, n)
    mat = q[:, 1, :]
    order, witness = _greedy_chain(mat, kt.d, lambda v: v > thr)
    if order is None:
        return RouteVerdict("q_poly", NO, witness=witness)
    bad = _band_violation(mat, order, lambda v: v > thr, lambda v: abs(v) <= thr)
    if bad is not None:
        return RouteVerdict("q_poly", NO, witness=bad)
    return RouteVerdict("q_poly", YES, ordering=order, l=order[-1])


@dataclass(eq=False)
class Analysis:
    """Everything detect computed along the way, for reporting."""

    report: DetectionReport
    spectral: SpectralData
    krein: KreinTensor
    predistance_system: PredistanceSystem | None
    mstar_max: float | None
    pq_residual: float
    multiplicity_residual: float


def _nstar_verdict(s, sd):
    try:
        chain = nstar_sets(s, sd)
    except PerronNotSeparated as e:
        return RouteVerdict("nstar", PRECONDITION_FAILED, witness=str(e)), None
    full = frozenset(range(s.d + 1))
    if chain.union_through(s.d - 1) != full:
        sing = chain.singletons()
        if sing is None:
            raise RouteDisagreement(
                f"first-appearance sets {chain.sets} admit a missing relation at power "
                f"d-1 but are not all singletons"
            )
        return RouteVerdict("nstar", YES, ordering=sing, l=sing[-1]), chain
    return RouteVerdict(
        "nstar", NO,
        witness="every relation already appears in a power A_1^h with h <= d-1",
    ), chain


def analyze(s: AssociationScheme, *, match_rtol: float = ROUTE_MATCH_RTOL,
            base_tol: float = BASE_TOL, eig_rtol: float = EIG_GROUP_RTOL) -> Analysis:
    """Run every route, enforce their pairwise agreement, and keep the evidence."""
    t = s.tensor
    sd = spectral_data(s, eig_rtol=eig_rtol)

    tri = tridiagonal_route(t)
    nstar_v, _chain = _nstar_verdict(s, sd)

    collision = _theta_collision(sd, eig_rtol)
    ps = None
    if collision is None:
        try:
            excess_v = excess_route(sd, t, match_rtol=match_rtol)
            ps = predistance_polynomials(_scheme_spectrum(sd))
            pred_v = predistance_route(sd, ps, match_rtol=match_rtol)
        except DegenerateSpectrum as e:  # near-tie slipped past the gap check
            excess_v = RouteVerdict("excess", PRECONDITION_FAILED, witness=str(e))
            pred_v = RouteVerdict("predistance", PRECONDITION_FAILED, witness=str(e))
    else:
        j1, j2 = collision
        note = f"theta values at sorted positions {j1} and {j2} coincide"
        excess_v = RouteVerdict("excess", PRECONDITION_FAILED, witness=note)
        pred_v = RouteVerdict("predistance", PRECONDITION_FAILED, witness=note)

    idem = primitive_idempotents(s, sd)
    kt = krein_parameters(sd, idem, residual_tol=max(base_tol, 1e-10))
    qv = q_polynomial_route(kt, nonzero_tol=base_tol)

    principal = [tri, nstar_v, excess_v, pred_v]
    ran = [v for v in principal if v.verdict != PRECONDITION_FAILED]
    verdicts = {v.verdict for v in ran}
    if len(verdicts) != 1:
        raise RouteDisagreement(
            "routes disagree: "
            + ", ".join(f"{v.route}={v.verdict} (residual {v.max_residual:.3e})"
                        for v in principal)
        )
    consensus = verdicts.pop()
    preconditions_ok = len(ran) == len(principal)

    ordering = None
    l = None
    if consensus == YES:
        if not preconditions_ok:
            raise RouteDisagreement(
                "a positive verdict forces distinct eigenvalues, yet a spectral "
                "route reported precondition-failed: "
                + ", ".join(f"{v.route}={v.verdict}" for v in principal)
            )
        ordering = tri.ordering
        l = ordering[-1]
        if nstar_v.ordering != ordering:
            raise RouteDisagreement(
                f"nstar ordering {nstar_v.ordering} != tridiagonal ordering {ordering}"
            )
        for v in (excess_v, pred_v):
            if v.l != l:
                raise RouteDisagreement(
                    f"{v.route} found l = {v.l} but the chain ends at xi_d = {l}"
                )

    mstar_max = None
    if collision is None:
        mstar_max = max(
            mstar_decomposition_residual(s, sd, i) for i in range(1, s.d + 1)
        )

    report = DetectionReport(
        n=s.n, d=s.d, valencies=tuple(int(v) for v in s.valencies),
        tridiagonal=tri, nstar=nstar_v, excess=excess_v, predistance=pred_v,
        q_poly=qv, consensus=consensus, preconditions_ok=preconditions_ok,
        ordering=ordering, l=l,
    )
    pq_resid = float(np.abs(sd.P @ sd.Q - s.n * np.eye(s.d + 1)).max())
    mult_resid = float(np.abs(sd.multiplicities - np.round(sd.multiplicities)).max())
    return Analysis(
        report=report, spectral=sd, krein=kt, predistance_system=ps,
        mstar_max=mstar_max, pq_residual=pq_resid, multiplicity_residual=mult_resid,
    )


def detect(s: AssociationScheme, *, match_rtol: float = ROUTE_MATCH_RTOL,
           base_tol: float = BASE_TOL, eig_rtol: float = EIG_GROUP_RTOL) -> DetectionReport:
    """Run all routes and return the agreed report; see :func:`analyze`."""
    return analyze(s, match_rtol=match_rtol, base_tol=base_tol, eig_rtol=eig_rtol).report
