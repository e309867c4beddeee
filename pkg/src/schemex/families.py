"""Deterministic generators for a corpus of small schemes with known verdicts.

Point orderings are canonical (lexicographic words / sorted subsets), so the
generated relation matrices are byte-reproducible.  Every generator runs the
full axiom validation before handing the scheme back.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import comb

import numpy as np

from .scheme_core import AssociationScheme, RelationMatrix, build_scheme, reorder_relations

MAX_POINTS = 5000

FAMILIES = (
    "hamming", "johnson", "cycle", "complete",
    "disjoint_cliques", "cyclotomic13", "petersen", "hypercube_reordered",
)

# connection classes of the index-3 cyclotomic scheme on 13 points
_CYCLO13 = {1: (1, 5, 8, 12), 2: (2, 3, 10, 11), 3: (4, 6, 7, 9)}


class ParamOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    family: str
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(int(v) for v in self.params))
        if self.family not in FAMILIES:
            raise ParamOutOfRange(f"unknown family {self.family!r}; known: {FAMILIES}")


def _require(cond, msg):
    if not cond:
        raise ParamOutOfRange(msg)


def _rel_hamming(n, q):
    _require(n >= 1 and q >= 2, f"hamming needs n >= 1 and q >= 2, got ({n},{q})")
    npoints = q ** n
    _require(npoints <= MAX_POINTS, f"hamming({n},{q}) has {npoints} > {MAX_POINTS} points")
    pts = np.array(list(product(range(q), repeat=n)), dtype=np.int16)
    rel = np.zeros((npoints, npoints), dtype=np.uint16)
    for c in range(n):
        rel += pts[:, c][:, None] != pts[None, :, c]
    return rel, n


def _rel_johnson(v, k):
    _require(1 <= k and v >= 2 * k, f"johnson needs 1 <= k and v >= 2k, got ({v},{k})")
    npoints = comb(v, k)
    _require(npoints <= MAX_POINTS, f"johnson({v},{k}) has {npoints} > {MAX_POINTS} points")
    pts = [frozenset(c) for c in combinations(range(v), k)]
    rel = np.zeros((npoints, npoints), dtype=np.uint16)
    for a in range(npoints):
        for b in range(npoints):
            rel[a, b] = k - len(pts[a] & pts[b])
    return rel, k


def _rel_cycle(n):
    _require(3 <= n <= MAX_POINTS, f"cycle needs 3 <= n <= {MAX_POINTS}, got {n}")
    i = np.arange(n)
    diff = (i[:, None] - i[None, :]) % n
    rel = np.minimum(diff, n - diff).astype(np.uint16)
    return rel, n // 2


def _rel_complete(n):
    _require(2 <= n <= MAX_POINTS, f"complete needs 2 <= n <= {MAX_POINTS}, got {n}")
    rel = np.ones((n, n), dtype=np.uint16) - np.eye(n, dtype=np.uint16)
    return rel, 1


def _rel_disjoint_cliques(c, m):
    _require(c >= 2 and m >= 2, f"disjoint_cliques needs c, m >= 2, got ({c},{m})")
    n = c * m
    _require(n <= MAX_POINTS, f"disjoint_cliques({c},{m}) has {n} > {MAX_POINTS} points")
    block = np.arange(n) // m
    same = block[:, None] == block[None, :]
    rel = np.where(same, 1, 2).astype(np.uint16)
    np.fill_diagonal(rel, 0)
    return rel, 2


def _rel_cyclotomic13():
    lut = np.zeros(13, dtype=np.uint16)
    for cls, members in _CYCLO13.items():
        for v in members:
            lut[v] = cls
    i = np.arange(13)
    return lut[(i[None, :] - i[:, None]) % 13], 3


def generate(spec: FamilySpec) -> AssociationScheme:
    """Build and fully validate the requested family member."""
    fam, par = spec.family, spec.params

    if fam == "petersen":
        _require(par == (), "petersen takes no parameters")
        # johnson(5,2) with the sharing/disjoint classes swapped, so that A_1
        # is the disjointness (Petersen graph) relation
        return reorder_relations(generate(FamilySpec("johnson", (5, 2))), (0, 2, 1))
    if fam == "hypercube_reordered":
        _require(len(par) == 4 and sorted(par) == [0, 1, 2, 3] and par[0] == 0,
                 f"hypercube_reordered takes a permutation of 0..3 fixing 0, got {par}")
        return reorder_relations(generate(FamilySpec("hamming", (3, 2))), par)

    if fam == "hamming":
        _require(len(par) == 2, "hamming takes (n, q)")
        rel, d = _rel_hamming(*par)
    elif fam == "johnson":
        _require(len(par) == 2, "johnson takes (v, k)")
        rel, d = _rel_johnson(*par)
    elif fam == "cycle":
        _require(len(par) == 1, "cycle takes (n,)")
        rel, d = _rel_cycle(*par)
    elif fam == "complete":
        _require(len(par) == 1, "complete takes (n,)")
        rel, d = _rel_complete(*par)
    elif fam == "disjoint_cliques":
        _require(len(par) == 2, "disjoint_cliques takes (c, m)")
        rel, d = _rel_disjoint_cliques(*par)
    else:  # cyclotomic13
        _require(par == (), "cyclotomic13 takes no parameters")
        rel, d = _rel_cyclotomic13()

    return build_scheme(RelationMatrix(n=rel.shape[0], d=d, rel=rel))


def corpus():
    """(name, scheme, expected status) triples used across the test suite.

    Expected status is "yes"/"no" for clean verdicts, or "precondition-failed"
    for inputs whose spectral routes cannot run (the chain route still reports
    a negative on those).
    """
    entries = []

    def add(name, spec, expected):
        entries.append((name, generate(spec), expected))

    for n in range(5, 13):
        add(f"cycle({n})", FamilySpec("cycle", (n,)), "yes")
    for n, q in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (4, 3)]:
        add(f"hamming({n},{q})", FamilySpec("hamming", (n, q)), "yes")
    for v in range(4, 9):
        add(f"johnson({v},2)", FamilySpec("johnson", (v, 2)), "yes")
    add("johnson(7,3)", FamilySpec("johnson", (7, 3)), "yes")
    for n in range(2, 7):
        add(f"complete({n})", FamilySpec("complete", (n,)), "yes")
    add("petersen", FamilySpec("petersen"), "yes")

    add("cyclotomic13", FamilySpec("cyclotomic13"), "no")

    add("disjoint_cliques(3,3)", FamilySpec("disjoint_cliques", (3, 3)), "precondition-failed")
    # the 3-cube with the antipodal matching promoted to relation 1
    add("hamming(3,2)+A1=antipodal", FamilySpec("hypercube_reordered", (0, 3, 2, 1)),
        "precondition-failed")

    return entries
