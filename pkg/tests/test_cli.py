from __future__ import annotations

import json

import numpy as np
import pytest

from schemex.cli import (
    EXIT_DISAGREE,
    EXIT_INVALID,
    EXIT_NO,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_PRECONDITION,
    main,
)
from schemex.families import FamilySpec, generate


@pytest.fixture()
def scheme_file(tmp_path):
    def write(family, params=()):
        out = tmp_path / f"{family}.scheme"
        rc = main(["gen", family, *map(str, params), "-o", str(out)])
        assert rc == EXIT_OK
        return str(out)

    return write


@pytest.fixture()
def edge_file(tmp_path):
    def write(name, n, edges):
        out = tmp_path / f"{name}.edges"
        lines = [f"{n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
        out.write_text("\n".join(lines) + "\n")
        return str(out)

    return write


def _petersen_edges():
    s = generate(FamilySpec("petersen"))
    A = s.adjacency(1)
    return [(u, v) for u in range(10) for v in range(u + 1, 10) if A[u, v]]


class TestGen:
    def test_stdout_header(self, capsys):
        assert main(["gen", "cycle", "5"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "5 2"
        assert len(out.splitlines()) == 6

    def test_hamming_header(self, capsys):
        assert main(["gen", "hamming", "3", "2"]) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0] == "8 3"

    def test_johnson_header(self, capsys):
        assert main(["gen", "johnson", "5", "2"]) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0] == "10 2"

    def test_unknown_family(self, capsys):
        assert main(["gen", "paley", "13"]) == EXIT_PARSE
        assert "paley" in capsys.readouterr().err

    def test_bad_params(self, capsys):
        assert main(["gen", "cycle", "2"]) == EXIT_PARSE

    def test_roundtrip_through_validate(self, scheme_file, capsys):
        path = scheme_file("johnson", (5, 2))
        assert main(["validate", path]) == EXIT_OK
        assert "VALID n=10 d=2" in capsys.readouterr().out


class TestValidate:
    def test_ok(self, scheme_file, capsys):
        assert main(["validate", scheme_file("hamming", (3, 2))]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "VALID n=8 d=3"

    def test_axiom_failure(self, tmp_path, capsys):
        # path graph distances: pair products are not constant on classes
        bad = tmp_path / "bad.scheme"
        bad.write_text("3 2\n0 1 2\n1 0 1\n2 1 0\n")
        assert main(["validate", str(bad)]) == EXIT_INVALID
        assert capsys.readouterr().out.startswith("INVALID:")

    def test_parse_failure(self, tmp_path, capsys):
        bad = tmp_path / "garbled.scheme"
        bad.write_text("2 1\n0 x\nx 0\n")
        assert main(["validate", str(bad)]) == EXIT_PARSE
        assert capsys.readouterr().err != ""

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "nope")]) == EXIT_PARSE

    def test_wrong_row_count(self, tmp_path):
        bad = tmp_path / "short.scheme"
        bad.write_text("3 1\n0 1 1\n1 0 1\n")
        assert main(["validate", str(bad)]) == EXIT_PARSE


class TestDetect:
    def test_yes(self, scheme_file, capsys):
        assert main(["detect", scheme_file("hamming", (3, 2))]) == EXIT_OK
        out = capsys.readouterr().out
        assert "status=yes" in out
        assert "ordering=[0, 1, 2, 3]" in out
        assert "l=3" in out

    def test_no(self, scheme_file, capsys):
        assert main(["detect", scheme_file("cyclotomic13")]) == EXIT_NO
        assert "status=no" in capsys.readouterr().out

    def test_precondition(self, scheme_file, capsys):
        rc = main(["detect", scheme_file("disjoint_cliques", (3, 3))])
        assert rc == EXIT_PRECONDITION
        assert "status=precondition-failed" in capsys.readouterr().out

    def test_invalid_scheme(self, tmp_path):
        bad = tmp_path / "bad.scheme"
        bad.write_text("3 2\n0 1 2\n1 0 1\n2 1 0\n")
        assert main(["detect", str(bad)]) == EXIT_INVALID

    def test_json_contents(self, scheme_file, tmp_path):
        out = tmp_path / "report.json"
        assert main(["detect", scheme_file("hamming", (3, 2)),
                     "--json", str(out)]) == EXIT_OK
        d = json.loads(out.read_text())
        assert set(d) == {
            "n", "d", "valencies", "theta", "multiplicities", "P", "Q",
            "krein_min", "routes", "consensus", "residuals", "tol",
        }
        assert d["n"] == 8 and d["d"] == 3
        assert d["valencies"] == [1, 3, 3, 1]
        assert d["theta"] == [3, 1, -1, -3]
        assert d["multiplicities"] == [1, 3, 3, 1]
        assert d["consensus"] == {
            "verdict": "yes", "status": "yes", "preconditions_ok": True,
            "ordering": [0, 1, 2, 3], "l": 3,
        }
        assert set(d["routes"]) == {
            "tridiagonal", "nstar", "excess", "predistance", "q_poly"
        }
        assert all(v["verdict"] == "yes" for v in d["routes"].values())
        assert d["residuals"]["pq_identity"] < 1e-8
        assert d["residuals"]["mstar_max"] < 1e-8
        assert d["krein_min"] >= -1e-8 * 8
        assert np.allclose(d["P"], d["Q"])  # binary Hamming is self-dual

    def test_json_bytes_are_stable(self, scheme_file, tmp_path):
        src = scheme_file("johnson", (6, 2))
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["detect", src, "--json", str(a)]) == EXIT_OK
        assert main(["detect", src, "--json", str(b)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_tol_flag_recorded(self, scheme_file, tmp_path):
        out = tmp_path / "r.json"
        main(["detect", scheme_file("cycle", (5,)), "--tol", "1e-7",
              "--json", str(out)])
        assert json.loads(out.read_text())["tol"]["base"] == 1e-7

    def test_tol_env_fallback(self, scheme_file, tmp_path, monkeypatch):
        monkeypatch.setenv("SCHEMEX_TOL", "1e-9")
        out = tmp_path / "r.json"
        main(["detect", scheme_file("cycle", (5,)), "--json", str(out)])
        assert json.loads(out.read_text())["tol"]["base"] == 1e-9

    def test_flag_beats_env(self, scheme_file, tmp_path, monkeypatch):
        monkeypatch.setenv("SCHEMEX_TOL", "1e-9")
        out = tmp_path / "r.json"
        main(["detect", scheme_file("cycle", (5,)), "--tol", "1e-5",
              "--json", str(out)])
        assert json.loads(out.read_text())["tol"]["base"] == 1e-5


class TestGraph:
    def test_petersen(self, edge_file, capsys):
        path = edge_file("petersen", 10, _petersen_edges())
        assert main(["graph", path]) == EXIT_OK
        out = capsys.readouterr().out
        assert "n=10 k=3" in out
        assert "spectrum: 3^1 1^5 -2^4" in out
        assert "excess=6 p_d(theta0)=6.000000" in out
        assert "drg=true" in out

    def test_prism_not_drg(self, edge_file, capsys):
        edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5),
                 (0, 3), (1, 4), (2, 5)]
        assert main(["graph", edge_file("prism", 6, edges)]) == EXIT_NO
        assert "drg=false" in capsys.readouterr().out

    def test_star_is_not_regular(self, edge_file, capsys):
        edges = [(0, 1), (0, 2), (0, 3)]
        assert main(["graph", edge_file("star", 4, edges)]) == EXIT_PRECONDITION
        out = capsys.readouterr().out
        assert out.startswith("NOT APPLICABLE:")
        assert "degrees" in out

    def test_disconnected(self, edge_file):
        assert main(["graph", edge_file("pair", 4, [(0, 1), (2, 3)])]) \
            == EXIT_PRECONDITION

    def test_parse_error(self, tmp_path):
        bad = tmp_path / "bad.edges"
        bad.write_text("4 1\n0 q\n")
        assert main(["graph", str(bad)]) == EXIT_PARSE

    def test_json(self, edge_file, tmp_path):
        path = edge_file("petersen", 10, _petersen_edges())
        out = tmp_path / "g.json"
        assert main(["graph", path, "--json", str(out)]) == EXIT_OK
        d = json.loads(out.read_text())
        assert d["drg"] is True
        assert d["n"] == 10 and d["k"] == 3
        assert d["pd_theta0"] == pytest.approx(6.0)


class TestExitCodes:
    def test_distinct(self):
        codes = [EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_NO,
                 EXIT_PRECONDITION, EXIT_DISAGREE]
        assert codes == [0, 1, 2, 3, 4, 5]
