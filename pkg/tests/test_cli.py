import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from submanifold_states import cli
from submanifold_states.experiments import count_product_sections, load_experiment, shipped_experiments
from submanifold_states.serialize import (
    density_from_csv,
    density_from_dict,
    density_from_json,
    density_to_csv,
    density_to_json,
    dumps,
)
from submanifold_states.states import DegenerateStateError, DensityMatrix, NumericalError

from .oracles import random_density


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("n1, n2, N, expected", [(1, 1, 3, (4, 4, 16)), (1, 2, 2, (3, 6, 18)), (2, 2, 1, (3, 3, 9))])
def test_dims(capsys, n1, n2, N, expected):
    code, out, _ = run(capsys, "dims", str(n1), str(n2), str(N), "--format", "json")
    assert code == 0
    row = json.loads(out)
    assert (row["d1"], row["d2"], row["dN"]) == expected


def test_dims_table_and_usage_errors(capsys):
    code, out, _ = run(capsys, "dims", "1", "1", "1", "2")
    assert code == 0 and len(out.strip().splitlines()) == 3
    with pytest.raises(SystemExit) as exc:
        cli.main(["dims", "0", "1", "2"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["dims", "1", "x", "2"])
    assert exc.value.code == 2


def test_shipped_corpus():
    assert set(shipped_experiments()) == {
        "point", "circle_point", "circle_circle", "torus", "full_product", "diagonal_circle_r",
    }


def test_run_point(capsys):
    code, out, _ = run(capsys, "run", "point", "--deterministic")
    assert code == 0
    doc = json.loads(out)
    for r in doc["results"]:
        assert r["report"]["entropy"] < 1e-10
        assert r["report"]["purity"] == pytest.approx(1.0, abs=1e-10)
        assert r["report"]["separable_verdict"] == "separable_certified"


def test_run_full_product(capsys):
    code, out, _ = run(capsys, "run", "full_product", "--deterministic", "--emit-matrix")
    assert code == 0
    for r in json.loads(out)["results"]:
        rho = density_from_dict(r["rho"])
        d1, d2 = rho.dims
        assert np.linalg.norm(rho.matrix - np.eye(d1 * d2) / (d1 * d2)) < 1e-7


def test_run_diagonal_circle(capsys):
    code, out, _ = run(capsys, "run", "diagonal_circle_r", "--deterministic")
    assert code == 0
    rep = json.loads(out)["results"][0]["report"]
    assert rep["concurrence"] < 1e-10
    assert rep["eof"] < 1e-10
    assert rep["ppt"] == "PPT"
    assert rep["ppt_min_eigenvalue"] > -1e-10


def test_run_csv(capsys):
    code, out, _ = run(capsys, "run", "circle_circle", "--format", "csv", "--deterministic")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["N"]) for r in rows] == [1, 2, 3]
    assert all(float(r["product_residual"]) < 1e-9 for r in rows)


def test_run_from_file_and_bad_schema(capsys, tmp_path):
    spec = {"schema": 1, "n1": 1, "n2": 1, "N": {"from": 1, "to": 2},
            "submanifold": {"kind": "torus", "params": {"r1": 0.5, "r2": 0.5}, "nodes": 32}}
    p = tmp_path / "t.json"
    p.write_text(json.dumps(spec))
    code, out, _ = run(capsys, "run", str(p), "--deterministic")
    assert code == 0 and len(json.loads(out)["results"]) == 2
    spec["schema"] = 7
    p.write_text(json.dumps(spec))
    code, _, err = run(capsys, "run", str(p))
    assert code == 2 and "schema" in err
    code, _, _ = run(capsys, "run", "no_such_experiment")
    assert code == 2


def test_exit_codes_for_failures(capsys, monkeypatch):
    def degenerate(*a, **k):
        raise DegenerateStateError("zero trace")

    def numerical(*a, **k):
        raise NumericalError("negative eigenvalue")

    monkeypatch.setattr(cli, "run_one", degenerate)
    assert run(capsys, "run", "point")[0] == 3
    monkeypatch.setattr(cli, "run_one", numerical)
    assert run(capsys, "run", "point")[0] == 4


def test_sweep_radius_rows(capsys):
    code, out, _ = run(capsys, "sweep", "diagonal_circle_r", "radius", "0.5,1,2", "--deterministic")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 3
    assert all(float(r["concurrence"]) < 1e-10 for r in rows)


def test_sweep_N_product(capsys):
    code, out, _ = run(capsys, "sweep", "circle_circle", "N", "1:4", "--deterministic")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["N"]) for r in rows] == [1, 2, 3, 4]
    assert all(float(r["product_residual"]) < 1e-9 for r in rows)


def test_sweep_nodes_plateau(capsys):
    code, out, _ = run(capsys, "sweep", "torus", "nodes", "4,8,16,32", "--deterministic")
    rows = list(csv.DictReader(io.StringIO(out)))
    res = {(int(r["nodes"]), int(r["N"])): float(r["convergence_residual"]) for r in rows}
    # trapezoid is exact once nodes exceed the top frequency 2N
    for (m, N), v in res.items():
        if m // 2 > 2 * N:
            assert v < 1e-12


def test_sweep_records_failures(capsys):
    code, out, _ = run(capsys, "sweep", "diagonal_circle_r", "radius", "1,-1", "--deterministic")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["error"] == "" and "radius" in rows[1]["error"]


def test_deterministic_output_is_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"out{k}.json"
        subprocess.run([sys.executable, "-m", "submanifold_states.cli", "run", "torus", "--deterministic", "-o", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_floats_have_17_digits():
    assert dumps(0.1) == "0.10000000000000001"
    assert dumps({"a": [1.0, 2]}) == '{\n  "a": [1.0, 2]\n}'
    assert json.loads(dumps({"x": 1 / 3}))["x"] == 1 / 3


def test_density_roundtrips(rng):
    rho = DensityMatrix(random_density(rng, 6), (2, 3))
    for back in (density_from_json(density_to_json(rho)), density_from_csv(density_to_csv(rho))):
        assert back.dims == (2, 3)
        np.testing.assert_array_equal(back.matrix, rho.matrix)


@pytest.mark.parametrize("n1", [1, 2])
@pytest.mark.parametrize("n2", [1, 2])
@pytest.mark.parametrize("N", range(0, 7))
def test_lemma_dimension_identity(n1, n2, N):
    from math import comb

    assert count_product_sections(n1, n2, N) == comb(N + n1, n1) * comb(N + n2, n2)


def test_load_by_name_or_suffix():
    assert load_experiment("torus").name == load_experiment("torus.json").name == "torus"
