from __future__ import annotations

import numpy as np
import pytest

from schemex.detect import detect
from schemex.families import FamilySpec, generate
from schemex.graph_tools import (
    Disconnected,
    Graph,
    NotDistanceRegular,
    NotRegular,
    distance_data,
    graph_spectrum,
    scheme_from_drg,
    spectral_excess_report,
)


def _cycle_graph(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def _path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def _petersen_graph():
    s = generate(FamilySpec("petersen"))
    A = s.adjacency(1)
    edges = [(u, v) for u in range(10) for v in range(u + 1, 10) if A[u, v]]
    return Graph.from_edges(10, edges)


def _cube_graph():
    # vertices 0..7, adjacent iff the binary labels differ in one bit
    edges = [
        (u, u ^ (1 << b)) for u in range(8) for b in range(3) if u < (u ^ (1 << b))
    ]
    return Graph.from_edges(8, edges)


class TestGraph:
    def test_from_edges(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2)])
        assert g.degrees == (1, 2, 1)
        assert g.edge_count() == 2
        A = g.adjacency_matrix()
        assert np.array_equal(A, A.T) and A.sum() == 4

    def test_rejects_loops_duplicates_range(self):
        with pytest.raises(ValueError):
            Graph.from_edges(2, [(0, 0)])
        with pytest.raises(ValueError):
            Graph.from_edges(2, [(0, 1), (1, 0)])
        with pytest.raises(ValueError):
            Graph.from_edges(2, [(0, 2)])


class TestDistances:
    def test_pentagon(self):
        dd = distance_data(_cycle_graph(5))
        assert dd.diameter == 2
        assert np.all(dd.excess == 2)
        assert np.all(dd.eccentricity == 2)

    def test_petersen(self):
        dd = distance_data(_petersen_graph())
        assert dd.diameter == 2
        assert np.all(dd.excess == 6)
        assert np.all(dd.gamma_counts == [1, 3, 6])

    def test_path_has_varying_excess(self):
        dd = distance_data(_path_graph(4))
        assert dd.diameter == 3
        assert tuple(dd.eccentricity) == (3, 2, 2, 3)
        # every vertex sees exactly one vertex at its maximal distance
        assert tuple(dd.excess) == (1, 1, 1, 1)

    def test_disconnected(self):
        g = Graph.from_edges(5, [(0, 1), (2, 3)])
        with pytest.raises(Disconnected) as exc:
            distance_data(g)
        assert exc.value.components == 3


class TestSpectrum:
    def test_complete_graph(self):
        g = Graph.from_edges(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])
        sp = graph_spectrum(g)
        assert np.allclose(sp.theta, [3, -1], atol=1e-9)
        assert np.allclose(sp.m, [1, 3])

    def test_petersen(self):
        sp = graph_spectrum(_petersen_graph())
        assert np.allclose(sp.theta, [3, 1, -2], atol=1e-9)
        assert np.allclose(sp.m, [1, 5, 4])

    def test_hexagon(self):
        sp = graph_spectrum(_cycle_graph(6))
        assert np.allclose(sp.theta, [2, 1, -1, -2], atol=1e-9)
        assert np.allclose(sp.m, [1, 2, 2, 1])

    def test_not_regular(self):
        with pytest.raises(NotRegular):
            graph_spectrum(_path_graph(4))

    def test_disconnected(self):
        g = Graph.from_edges(6, [(0, 1), (2, 3), (4, 5)])
        with pytest.raises(Disconnected):
            graph_spectrum(g)


class TestSpectralExcess:
    def test_petersen_is_drg(self):
        rep = spectral_excess_report(_petersen_graph())
        assert rep.drg is True
        assert rep.witness is None
        assert (rep.diameter, rep.d) == (2, 2)
        assert rep.pd_theta0 == pytest.approx(6.0, abs=1e-9)
        assert rep.excess_mean == pytest.approx(6.0)
        assert rep.excess_harmonic_mean == pytest.approx(6.0)

    def test_petersen_minus_edge(self):
        s = generate(FamilySpec("petersen"))
        A = s.adjacency(1)
        edges = [(u, v) for u in range(10) for v in range(u + 1, 10) if A[u, v]]
        g = Graph.from_edges(10, edges[1:])  # drop one edge: no longer regular
        with pytest.raises(NotRegular):
            spectral_excess_report(g)

    def test_prism_is_not_drg(self):
        # K_3 x K_2: vertex-transitive, 3-regular, but not distance-regular
        base = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
        rungs = [(0, 3), (1, 4), (2, 5)]
        g = Graph.from_edges(6, base + rungs)
        rep = spectral_excess_report(g)
        assert rep.drg is False
        assert rep.witness is not None
        # harmonic mean never exceeds the arithmetic mean
        assert rep.excess_harmonic_mean <= rep.excess_mean + 1e-12

    def test_cube(self):
        rep = spectral_excess_report(_cube_graph())
        assert rep.drg is True
        assert rep.pd_theta0 == pytest.approx(1.0, abs=1e-9)
        assert np.all(rep.excess == 1)


class TestSchemeFromDrg:
    def test_petersen_roundtrip(self):
        s = scheme_from_drg(_petersen_graph())
        fam = generate(FamilySpec("petersen"))
        assert np.array_equal(s.tensor.p, fam.tensor.p)
        assert detect(s).status == "yes"

    def test_cycle_roundtrip(self):
        s = scheme_from_drg(_cycle_graph(7))
        fam = generate(FamilySpec("cycle", (7,)))
        assert np.array_equal(s.tensor.p, fam.tensor.p)
        assert detect(s).ordering == (0, 1, 2, 3)

    def test_cube_roundtrip(self):
        s = scheme_from_drg(_cube_graph())
        fam = generate(FamilySpec("hamming", (3, 2)))
        assert np.array_equal(s.tensor.p, fam.tensor.p)

    def test_non_drg_raises(self):
        base = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
        rungs = [(0, 3), (1, 4), (2, 5)]
        with pytest.raises(NotDistanceRegular):
            scheme_from_drg(Graph.from_edges(6, base + rungs))

    def test_detect_agrees_on_random_drg_sources(self):
        # every metric scheme built from a distance-regular graph must come
        # back "yes" with the identity ordering
        for g in [_cycle_graph(9), _cube_graph(), _petersen_graph()]:
            s = scheme_from_drg(g)
            rep = detect(s)
            assert rep.status == "yes"
            assert rep.ordering == tuple(range(s.d + 1))
