import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import (octahedron_halfspaces, square_halfspaces,
                      write_polytope_json)

FAST_BUDGET = ["--budget-interior", "5000", "--budget-shell", "5000",
               "--budget-far", "200"]


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "polyrep.cli", *args],
                          capture_output=True, text=True)


@pytest.fixture(scope="module")
def oct_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "octahedron.json"
    return write_polytope_json(path, 3, octahedron_halfspaces())


@pytest.fixture(scope="module")
def square_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "square.json"
    return write_polytope_json(path, 2, square_halfspaces())


@pytest.fixture(scope="module")
def square_build(square_file, tmp_path_factory):
    out = tmp_path_factory.mktemp("out")
    res = run_cli("build", str(square_file), "--seed", "11", "--out", str(out),
                  *FAST_BUDGET)
    assert res.returncode == 0, res.stderr
    return out / "square.rep.json", out / "square.cert.json"


def test_info_octahedron(oct_file):
    res = run_cli("info", str(oct_file))
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert payload["n_vertices"] == 6
    assert payload["n_edges"] == 12
    assert payload["n_facets"] == 8
    assert payload["diameter"] == pytest.approx(2.0)
    assert payload["euler_characteristic"] == 2


def test_info_cube_euler(tmp_path):
    from conftest import cube_halfspaces
    f = write_polytope_json(tmp_path / "cube.json", 3, cube_halfspaces())
    res = run_cli("info", str(f))
    payload = json.loads(res.stdout)
    assert payload["n_vertices"] - payload["n_edges"] + payload["n_facets"] == 2


def test_info_malformed_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    res = run_cli("info", str(bad))
    assert res.returncode == 2
    assert "malformed JSON" in res.stderr


def test_info_missing_field(tmp_path):
    bad = tmp_path / "nohs.json"
    bad.write_text(json.dumps({"dim": 2}))
    res = run_cli("info", str(bad))
    assert res.returncode == 2
    assert "halfspaces" in res.stderr


def test_info_vertex_crossvalidation(tmp_path):
    payload = {"dim": 2,
               "halfspaces": [{"a": list(a), "b": b}
                              for a, b in square_halfspaces()],
               "vertices": [[0, 0], [1, 0], [0, 1], [2, 2]]}
    f = tmp_path / "sq.json"
    f.write_text(json.dumps(payload))
    res = run_cli("info", str(f))
    assert res.returncode == 2
    assert "vertex" in res.stderr


def test_build_writes_files(square_build):
    rep_path, cert_path = square_build
    rep = json.loads(rep_path.read_text())
    cert = json.loads(cert_path.read_text())
    assert rep["mode"] == "polygon"
    assert len(rep["polys"]) == 2
    assert cert["verdict"] == "pass"
    assert rep["provenance"]["decision_substitute"] == "sampling"


def test_build_budget_exhaustion(oct_file, tmp_path):
    res = run_cli("build", str(oct_file), "--max-triples", "1",
                  "--out", str(tmp_path), *FAST_BUDGET)
    assert res.returncode == 3


def test_verify_round_trip(square_file, square_build, tmp_path):
    rep_path, cert_path = square_build
    res = run_cli("verify", str(square_file), str(rep_path), "--seed", "11",
                  *FAST_BUDGET)
    assert res.returncode == 0
    assert "verdict: pass" in res.stdout


def test_verify_same_seed_identical(square_file, square_build, tmp_path):
    rep_path, _ = square_build
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        res = run_cli("verify", str(square_file), str(rep_path),
                      "--seed", "3", "--out", str(out), *FAST_BUDGET)
        assert res.returncode == 0
        outs.append((out / "square.rep.verify.json").read_bytes())
    assert outs[0] == outs[1]


def test_verify_negated_poly_fails(square_file, square_build, tmp_path):
    rep_path, _ = square_build
    payload = json.loads(rep_path.read_text())
    poly0 = payload["polys"][0]
    payload["polys"][0] = {"kind": "lincomb", "const": 0.0,
                           "parts": [[-1.0, poly0]]}
    bad = tmp_path / "sabotaged.rep.json"
    bad.write_text(json.dumps(payload))
    res = run_cli("verify", str(square_file), str(bad), *FAST_BUDGET)
    assert res.returncode == 4
    assert "FAIL" in res.stdout
    assert "witness" in res.stdout


def test_verify_dimension_mismatch(oct_file, square_build):
    rep_path, _ = square_build
    res = run_cli("verify", str(oct_file), str(rep_path))
    assert res.returncode == 2


def test_build_determinism(square_file, tmp_path):
    blobs = []
    for sub in ("x", "y"):
        out = tmp_path / sub
        res = run_cli("build", str(square_file), "--seed", "21",
                      "--out", str(out), *FAST_BUDGET)
        assert res.returncode == 0
        blobs.append(((out / "square.rep.json").read_bytes(),
                      (out / "square.cert.json").read_bytes()))
    assert blobs[0][0] == blobs[1][0]
    assert blobs[0][1] == blobs[1][1]


def test_field_small_grid(square_file, square_build, tmp_path):
    rep_path, _ = square_build
    res = run_cli("field", str(square_file), str(rep_path), "--poly", "min",
                  "--res", "2", "--margin", "0.25", "--out", str(tmp_path))
    assert res.returncode == 0
    vtk = (tmp_path / "square.min.vtk").read_text().splitlines()
    assert vtk[0].startswith("# vtk DataFile")
    assert vtk[3] == "DATASET STRUCTURED_POINTS"
    assert vtk[4] == "DIMENSIONS 2 2 1"
    assert vtk[7] == "POINT_DATA 4"
    values = [float(v) for v in vtk[10:14]]
    assert len(values) == 4
    # corners of the inflated box lie outside the square: all negative
    assert all(v < 0 for v in values)
    csv = (tmp_path / "square.min.csv").read_text().splitlines()
    assert csv[0] == "x0,x1,value"
    assert len(csv) == 5


def test_field_deterministic(square_file, square_build, tmp_path):
    rep_path, _ = square_build
    blobs = []
    for sub in ("m", "n"):
        out = tmp_path / sub
        res = run_cli("field", str(square_file), str(rep_path),
                      "--poly", "0", "--res", "5", "--out", str(out))
        assert res.returncode == 0
        blobs.append((out / "square.0.vtk").read_bytes())
    assert blobs[0] == blobs[1]


def test_field_inside_nonnegative(square_file, square_build, tmp_path):
    rep_path, _ = square_build
    res = run_cli("field", str(square_file), str(rep_path), "--poly", "min",
                  "--res", "9", "--margin", "0.0", "--out", str(tmp_path))
    assert res.returncode == 0
    lines = (tmp_path / "square.min.csv").read_text().splitlines()[1:]
    for row in lines:
        x0, x1, val = map(float, row.split(","))
        if 1e-3 < x0 < 1 - 1e-3 and 1e-3 < x1 < 1 - 1e-3:
            assert val >= -1e-9
