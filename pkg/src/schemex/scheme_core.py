"""Symmetric association schemes: axiom validation and exact intersection numbers.

A scheme on n points with d classes is stored as an n x n matrix of relation
indices.  All counting is done in integer arithmetic; nothing in this module
touches floating point.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np


class SchemeValidationError(ValueError):
    """One of the defining axioms of a symmetric association scheme failed."""


class DiagonalNotZero(SchemeValidationError):
    def __init__(self, x: int, value: int):
        self.x, self.value = x, value
        super().__init__(f"rel({x},{x}) = {value}; the diagonal must carry relation 0")


class NotSymmetric(SchemeValidationError):
    def __init__(self, x: int, y: int, vxy: int, vyx: int):
        self.x, self.y = x, y
        super().__init__(
            f"rel({x},{y}) = {vxy} but rel({y},{x}) = {vyx}; every relation must be symmetric"
        )


class MissingRelation(SchemeValidationError):
    def __init__(self, i: int):
        self.i = i
        super().__init__(f"relation index {i} never occurs in the matrix")


class NotConstant(SchemeValidationError):
    """The count of common (i, j)-neighbours is not constant on one relation class."""

    def __init__(self, i, j, k, witness_lo, witness_hi):
        self.i, self.j, self.k = i, j, k
        self.witness_lo = witness_lo
        self.witness_hi = witness_hi
        (x1, y1, c1), (x2, y2, c2) = witness_lo, witness_hi
        super().__init__(
            f"p^{k}_{{{i},{j}}} is not well defined: pair ({x1},{y1}) sees {c1} "
            f"common neighbours but pair ({x2},{y2}) sees {c2}"
        )


class PermMovesZero(ValueError):
    def __init__(self, perm):
        super().__init__(f"relabelling {tuple(perm)} must fix the identity relation 0")


@dataclass(frozen=True, eq=False)
class RelationMatrix:
    """Raw input: n points, d non-identity classes, and the n x n index matrix.

    Both n and d are explicit; they are never inferred from the matrix.  The
    constructor only checks shape and index range -- the scheme axioms are the
    job of :func:`build_scheme`.
    """

    n: int
    d: int
    rel: np.ndarray

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a scheme needs at least 2 points")
        if self.d < 1:
            raise ValueError("a scheme needs at least 1 non-identity relation")
        rel = np.asarray(self.rel)
        if rel.shape != (self.n, self.n):
            raise ValueError(f"relation matrix has shape {rel.shape}, expected {(self.n, self.n)}")
        if not np.issubdtype(rel.dtype, np.integer):
            raise ValueError("relation matrix must be integer valued")
        if rel.size and (rel.min() < 0 or rel.max() > self.d):
            raise ValueError(f"relation indices must lie in 0..{self.d}")
        rel = np.ascontiguousarray(rel.astype(np.uint16))
        rel.flags.writeable = False
        object.__setattr__(self, "rel", rel)


@dataclass(frozen=True, eq=False)
class IntersectionTensor:
    """All p^k_{ij} as a (d+1)^3 integer array, indexed p[k, i, j]."""

    d: int
    p: np.ndarray

    def __post_init__(self):
        p = np.ascontiguousarray(np.asarray(self.p, dtype=np.int64))
        m = self.d + 1
        if p.shape != (m, m, m):
            raise ValueError(f"tensor has shape {p.shape}, expected {(m, m, m)}")
        if p.min() < 0:
            raise ValueError("intersection numbers must be non-negative")
        k = p[0].diagonal()
        if not np.array_equal(p, p.transpose(0, 2, 1)):
            raise ValueError("p^k_{ij} != p^k_{ji}; input is not a symmetric scheme")
        if not np.array_equal(p[0], np.diag(k)):
            raise ValueError("p^0_{ij} must equal delta_{ij} k_i; input is not a scheme")
        lhs = np.einsum("kij,k->ij", p, k)
        if not np.array_equal(lhs, np.outer(k, k)):
            raise ValueError("sum_k p^k_{ij} k_k != k_i k_j; input is not a scheme")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    @property
    def valencies(self) -> np.ndarray:
        """k_i = p^0_{ii}."""
        return self.p[0].diagonal()


@dataclass(frozen=True, eq=False)
class AssociationScheme:
    """A validated scheme: the relation matrix plus its cached intersection tensor."""

    n: int
    d: int
    rel: np.ndarray
    tensor: IntersectionTensor

    def adjacency(self, i: int) -> np.ndarray:
        """0/1 indicator matrix of relation i (int32)."""
        return (self.rel == i).astype(np.int32)

    @cached_property
    def adjacency_matrices(self) -> tuple:
        return tuple(self.adjacency(i) for i in range(self.d + 1))

    @property
    def valencies(self) -> np.ndarray:
        return self.tensor.valencies


def _tensor_from_representatives(rel: np.ndarray, d: int) -> np.ndarray:
    """Count p^k_{ij} exactly, using one representative pair per class.

    For (x, y) in class k, p[k, i, j] is the number of z with rel(x, z) = i
    and rel(z, y) = j.  Constancy over the class is *assumed* here; it is
    checked separately unless the caller opted out.
    """
    n = rel.shape[0]
    m = d + 1
    p = np.zeros((m, m, m), dtype=np.int64)
    flat = rel.ravel()
    for k in range(m):
        pos = np.flatnonzero(flat == k)
        x, y = divmod(int(pos[0]), n)
        key = rel[x, :].astype(np.int64) * m + rel[:, y]
        p[k] = np.bincount(key, minlength=m * m).reshape(m, m)
    return p


def _check_products_constant(rel, d, adj, i, j):
    """Verify that A_i A_j is constant on every relation class."""
    M = adj[i].astype(np.int32) @ adj[j].astype(np.int32)
    m = d + 1
    flat_rel = rel.ravel().astype(np.intp)
    flat_m = M.ravel()
    mins = np.full(m, np.iinfo(np.int32).max, dtype=np.int32)
    maxs = np.full(m, -1, dtype=np.int32)
    np.minimum.at(mins, flat_rel, flat_m)
    np.maximum.at(maxs, flat_rel, flat_m)
    bad = np.flatnonzero(mins != maxs)
    if bad.size == 0:
        return
    k = int(bad[0])
    n = rel.shape[0]
    in_k = flat_rel == k
    lo = int(np.flatnonzero(in_k & (flat_m == mins[k]))[0])
    hi = int(np.flatnonzero(in_k & (flat_m == maxs[k]))[0])
    raise NotConstant(
        i, j, k,
        (*divmod(lo, n), int(mins[k])),
        (*divmod(hi, n), int(maxs[k])),
    )


def build_scheme(rm: RelationMatrix, *, fast: bool = False, workers: int = 1) -> AssociationScheme:
    """Validate the scheme axioms and compute the intersection tensor.

    Exhaustive validation checks, for every pair of classes, that the count of
    common neighbours is constant on each class (an O(n^3)-style product
    check).  With ``fast=True`` only one representative pair per class is
    counted, which is cheap but *unsound* on invalid input: a non-scheme can
    slip through.  ``workers`` > 1 spreads the product checks over a thread
    pool (the integer matmuls release the GIL).
    """
    rel, n, d = rm.rel, rm.n, rm.d

    diag = rel.diagonal()
    off = np.flatnonzero(diag != 0)
    if off.size:
        x = int(off[0])
        raise DiagonalNotZero(x, int(diag[x]))
    if not np.array_equal(rel, rel.T):
        x, y = np.argwhere(rel != rel.T)[0]
        raise NotSymmetric(int(x), int(y), int(rel[x, y]), int(rel[y, x]))
    counts = np.bincount(rel.ravel(), minlength=d + 1)
    absent = np.flatnonzero(counts == 0)
    if absent.size:
        raise MissingRelation(int(absent[0]))

    p = _tensor_from_representatives(rel, d)

    if not fast:
        adj = [np.asarray(rel == i, dtype=np.uint8) for i in range(d + 1)]
        pairs = [(i, j) for i in range(1, d + 1) for j in range(i, d + 1)]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futs = [pool.submit(_check_products_constant, rel, d, adj, i, j)
                        for i, j in pairs]
                for f in futs:
                    f.result()
        else:
            for i, j in pairs:
                _check_products_constant(rel, d, adj, i, j)

    return AssociationScheme(n=n, d=d, rel=rel, tensor=IntersectionTensor(d=d, p=p))


def intersection_numbers(s: AssociationScheme) -> IntersectionTensor:
    """The exact integer tensor p^k_{ij} (cached on the scheme)."""
    return s.tensor


def reorder_relations(s: AssociationScheme, perm) -> AssociationScheme:
    """Relabel relation i as perm[i].  perm must be a permutation of 0..d fixing 0.

    The relabelled scheme is built directly from the permuted relation matrix
    and tensor; relabelling cannot break the axioms, so no O(n^3) re-check is
    performed.
    """
    perm = tuple(int(v) for v in perm)
    if len(perm) != s.d + 1 or sorted(perm) != list(range(s.d + 1)):
        raise ValueError(f"{perm} is not a permutation of 0..{s.d}")
    if perm[0] != 0:
        raise PermMovesZero(perm)
    lut = np.asarray(perm, dtype=np.uint16)
    rel2 = lut[s.rel]
    rel2.flags.writeable = False
    idx = np.asarray(perm)
    p2 = np.empty_like(s.tensor.p)
    p2[np.ix_(idx, idx, idx)] = s.tensor.p
    return AssociationScheme(n=s.n, d=s.d, rel=rel2, tensor=IntersectionTensor(d=s.d, p=p2))
