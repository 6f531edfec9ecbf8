import csv
import io
import json
import math

import numpy as np
import pytest

from sectorbounds import bounds as bd
from sectorbounds.cli import main as cli_main
from sectorbounds.errors import InvalidInput, NonSquare, SchemaError
from sectorbounds.io import matrix_from_obj, parse_matrix_file, write_matrix_file
from sectorbounds.matrix import random_matrix
from sectorbounds.norms import IDENTITY, TRACE
from sectorbounds.sweep import (
    S_SENTINEL,
    SweepConfig,
    TrialRecord,
    curve_rows,
    emit_curve,
    hunt_sensitivity,
    log_grid,
    read_sweep,
    run_sweep,
    shrink_flagged,
    write_sweep,
)

DIAG_OBJ = {"n": 2, "re": [[1, 0], [0, 1]], "im": [[1, 0], [0, -1]]}


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


# matrix files


def test_parse_matrix_examples(tmp_path):
    A = parse_matrix_file(_write(tmp_path / "a.json", {"n": 1, "re": [[2]], "im": [[0]]}))
    np.testing.assert_array_equal(A, [[2]])
    A = parse_matrix_file(_write(tmp_path / "b.json", DIAG_OBJ))
    np.testing.assert_array_equal(A, np.diag([1 + 1j, 1 - 1j]))


@pytest.mark.parametrize(
    "obj,err",
    [
        ({"n": 2, "re": [[1, 0], [0, 1]], "im": [[0]]}, SchemaError),
        ({"n": 2, "re": [[1, 0], [0, 1]]}, SchemaError),
        ({"n": 2, "re": [[1, 0], [0, "x"]], "im": [[0, 0], [0, 0]]}, SchemaError),
        ({"n": 0, "re": [], "im": []}, SchemaError),
        ({"n": 2, "re": [[1, 0, 0], [0, 1, 0]], "im": [[0, 0, 0], [0, 0, 0]]}, NonSquare),
        ([1, 2], SchemaError),
    ],
)
def test_matrix_schema_errors(obj, err):
    with pytest.raises(err):
        matrix_from_obj(obj)


def test_bad_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"n": 1,\n "re": [[1]] "im": [[0]]}')
    with pytest.raises(SchemaError, match="line 2"):
        parse_matrix_file(str(p))


def test_matrix_roundtrip_exact(tmp_path):
    A = random_matrix("ginibre", 7, 3) * 1e-7
    write_matrix_file(tmp_path / "m.json", A)
    np.testing.assert_array_equal(parse_matrix_file(tmp_path / "m.json"), A)


# sweeps


def test_config_validation():
    with pytest.raises(SchemaError):
        SweepConfig.from_obj({"trials": 3})
    with pytest.raises(SchemaError):
        SweepConfig.from_obj({"master_seed": 1, "bogus": 2})
    with pytest.raises(InvalidInput):
        SweepConfig(master_seed=1, n_range=(1, 4))
    with pytest.raises(InvalidInput):
        SweepConfig(master_seed=1, alpha_range=(0.1, 2.0))
    cfg = SweepConfig(master_seed=5, trials=3)
    assert SweepConfig.from_obj(cfg.to_obj()) == cfg


def test_zero_trials():
    buf = io.StringIO()
    footer = write_sweep(SweepConfig(master_seed=1, trials=0), buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 1 and json.loads(lines[0]) == {"footer": footer}
    assert footer["trials"] == 0 and footer["violations"] == 0


def test_sweep_deterministic_and_roundtrip():
    cfg = SweepConfig(master_seed=2024, trials=6, n_range=(2, 6))
    a, b = io.StringIO(), io.StringIO()
    write_sweep(cfg, a)
    write_sweep(cfg, b)
    assert a.getvalue() == b.getvalue()
    records, footer = read_sweep(a.getvalue().splitlines())
    assert len(records) == 6 and footer["violations"] == 0
    for rec in records:
        assert TrialRecord.from_dict(json.loads(rec.to_json())) == rec
        assert rec.wall_time is None
        assert rec.error is None and rec.reports


def test_timing_flag_keeps_wall_time():
    rec = next(run_sweep(SweepConfig(master_seed=1, trials=1, n_range=(2, 3))))
    assert json.loads(rec.to_json(timing=True))["wall_time"] > 0
    assert json.loads(rec.to_json())["wall_time"] is None


def test_worker_count_does_not_change_records():
    cfg = SweepConfig(master_seed=77, trials=5, n_range=(2, 5), s_values=(1.0,))
    one = [r.to_json() for r in run_sweep(cfg, workers=1)]
    two = [r.to_json() for r in run_sweep(cfg, workers=2)]
    assert one == two


def test_errors_are_in_band():
    cfg = SweepConfig(master_seed=3, trials=2, n_range=(2, 4), kinds=("zpc",), alpha_range=(1.3, 1.4))
    records = list(run_sweep(cfg))
    assert len(records) == 2
    assert all(rec.skipped and not rec.reports for rec in records)


# hunt


def test_shrink_examples():
    diag = bd.PartitionedMatrix(np.diag([1 + 1j, 1 - 1j]), 1)
    survives = bd.verify_bound(diag, math.pi / 4, IDENTITY, TRACE, bd.m2(1))
    assert not shrink_flagged(survives)  # 3.6 >= 2.83
    tight = bd.PartitionedMatrix(np.array([[2.0, 1.0], [1.0, 2.0]]), 1)
    assert shrink_flagged(bd.verify_bound(tight, None, IDENTITY, TRACE, bd.BoundKind("lee")))


def test_hunt_small():
    rep = hunt_sensitivity(SweepConfig(master_seed=9, trials=15, n_range=(2, 6)))
    assert rep["passed"]
    assert rep["rhs_shrink_tight"]["rate"] >= 0.99
    assert rep["non_sectorial"]["rate"] == 1.0
    assert rep["alpha_under_report"]["rate"] == 1.0


# curves


def _curve_matrix():
    return bd.PartitionedMatrix(random_matrix("sectorial", 5, 8, 0.7), 2)


def test_curve_row_count_and_order(tmp_path):
    out = tmp_path / "c.csv"
    rows = emit_curve(_curve_matrix(), None, IDENTITY, TRACE, ["main", "m2", "zpt", "mao"], log_grid(1e-3, 1e3, 64), out)
    assert rows == 64 * 2 + 2
    with open(out, newline="", encoding="utf-8") as fh:
        data = list(csv.reader(fh))
    assert data[0] == ["s", "kind", "norm", "lhs", "rhs", "margin"]
    kinds = [r[1] for r in data[1:]]
    assert kinds == sorted(kinds)
    assert [r[0] for r in data[1:] if r[1] in ("mao", "zpt")] == [S_SENTINEL] * 2


def test_curve_minimum_at_one():
    rows = curve_rows(_curve_matrix(), None, IDENTITY, TRACE, ["main"], log_grid(0.1, 10, 21))
    best = min(rows, key=lambda r: float(r[4]))
    assert float(best[0]) == pytest.approx(1.0, abs=1e-12)


def test_curve_rerun_identical(tmp_path):
    args = (_curve_matrix(), None, IDENTITY, TRACE, ["main", "zpt"], log_grid(0.5, 2, 9))
    emit_curve(*args, tmp_path / "a.csv")
    emit_curve(*args, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


# CLI


def test_cli_angle(tmp_path, capsys):
    assert cli_main(["angle", _write(tmp_path / "d.json", DIAG_OBJ)]) == 0
    out = json.loads(capsys.readouterr().out)
    for m in ("whitened", "bisection", "fov_sampling"):
        assert out[m] == pytest.approx(math.pi / 4, abs=1e-8)
    bad = {"n": 2, "re": [[1, 1], [1, 1]], "im": [[0, -1], [1, 0]]}
    assert cli_main(["angle", "--method", "bisection", _write(tmp_path / "j.json", bad)]) == 2


def test_cli_verify(tmp_path, capsys):
    f = _write(tmp_path / "d.json", DIAG_OBJ)
    assert cli_main(["verify", "--kind", "m2", "--s", "1", "--norm", "trace", "--split", "1", f]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["rhs"] == pytest.approx(4.0) and rep["holds"]
    assert cli_main(["verify", "--kind", "nope", "--split", "1", f]) == 3
    assert cli_main(["verify", "--kind", "lee", "--split", "1", f]) == 3


def test_cli_witness(tmp_path, capsys):
    block = {"n": 2, "re": [[1, 1], [1, 1]], "im": [[0, 0], [0, 0]]}
    assert cli_main(["witness", "--ineq", "lemma21", "--show-witness", _write(tmp_path / "b.json", block)]) == 0
    lines = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert [d["label"] for d in lines] == ["mr", "swap"]
    assert "witnesses" in lines[0]
    assert cli_main(["witness", "--ineq", "e41", _write(tmp_path / "d.json", DIAG_OBJ)]) == 0
    odd = {"n": 1, "re": [[1]], "im": [[0]]}
    assert cli_main(["witness", "--ineq", "lemma21", _write(tmp_path / "o.json", odd)]) == 3


def test_cli_sweep_and_hunt(tmp_path, capsys):
    cfg = _write(tmp_path / "cfg.json", {"master_seed": 4, "trials": 3, "n_range": [2, 4]})
    out_a, out_b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert cli_main(["sweep", "--config", cfg, "--out", str(out_a)]) == 0
    assert cli_main(["sweep", "--config", cfg, "--out", str(out_b), "--workers", "2"]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    assert cli_main(["hunt", "--config", cfg]) == 0
    capsys.readouterr()


def test_cli_curve(tmp_path, capsys):
    f = _write(tmp_path / "d.json", DIAG_OBJ)
    out = tmp_path / "c.csv"
    assert cli_main(["curve", "--split", "1", "--alpha", str(math.pi / 4), "--s-grid", "0.1", "10", "8",
                     "--out", str(out), f]) == 0
    assert len(out.read_text().splitlines()) == 1 + 8 * 2 + 2
    capsys.readouterr()


def test_cli_input_errors(tmp_path, capsys):
    assert cli_main(["angle", str(tmp_path / "missing.json")]) == 3
    with pytest.raises(SystemExit) as exc:
        cli_main(["verify", "--kind", "main"])
    assert exc.value.code == 3
    cfg = _write(tmp_path / "cfg.json", {"trials": 3})
    assert cli_main(["sweep", "--config", cfg]) == 3
    capsys.readouterr()
