import csv
import glob
import json
import os
import xml.etree.ElementTree as ET
from collections import defaultdict

import numpy as np
import pytest

from snipe.exceptions import ConfigInvalid, EmptyReport
from snipe.harness.cli import main
from snipe.harness.plot import emit_plot
from snipe.harness.report import TRACE_HEADER, ExperimentReport, TraceRow, emit_csv, read_csv
from snipe.harness.runner import resolve_workers, run_experiment, run_trial
from snipe.harness.spec import ExperimentSpec, evaluate_expression, load_spec, resolve_stream
from snipe.model import StreamConfig

CONFIGS = os.path.join(os.path.dirname(__file__), "..", "configs")
SVG = "{http://www.w3.org/2000/svg}"


def small_spec(**kw):
    doc = dict(
        name="tiny",
        stream={"n": 20, "r": 2, "p": 0.5, "T": 16, "seed": 3},
        sweep={"axis": "p", "values": [0.5, 1.0]},
        trials=2,
    )
    doc.update(kw)
    return ExperimentSpec.from_dict(doc)


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


# -- specs ------------------------------------------------------------------

def test_expressions():
    assert evaluate_expression("3*r/n", {"r": 5, "n": 100}) == pytest.approx(0.15)
    assert evaluate_expression("2**3 - -1", {}) == 9
    with pytest.raises(ConfigInvalid):
        evaluate_expression("__import__('os')", {})
    with pytest.raises(ConfigInvalid):
        evaluate_expression("q + 1", {})
    with pytest.raises(ConfigInvalid):
        evaluate_expression("1/0", {})


def test_resolve_stream_couples_fields():
    cfg = resolve_stream({"n": 100, "r": 5, "p": "3*r/n", "b": "2*r", "T": "500*r"})
    assert (cfg.n, cfg.r, cfg.T) == (100, 5, 2500)
    assert cfg.p == pytest.approx(0.15)
    assert set(cfg.block_sizes) == {10}


@pytest.mark.parametrize(
    "change",
    [
        {"extra": 1},
        {"stream": {"n": 20, "r": 2, "p": 0.5, "T": 16, "colour": 1}},
        {"sweep": {"axis": "seed", "values": [1]}},
        {"sweep": {"axis": "p", "values": []}},
        {"sweep": {"axis": "p", "values": [1.5]}},
        {"estimators": ["pca"]},
        {"trials": 0},
        {"options": {"speed": 1}},
        {"stream": {"n": 20, "r": 2, "p": 0.5, "T": "r/3"}},
    ],
)
def test_invalid_specs(change):
    with pytest.raises(ConfigInvalid):
        small_spec(**change)


def test_load_spec_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigInvalid):
        load_spec(path)


EXPECTED_CONFIGS = {
    "fig1_trace", "fig3a_probability", "fig3b_rank", "fig3c_ambient",
    "fig3d_block", "coherence", "fig5_compare",
}


def test_shipped_configs_load():
    paths = glob.glob(os.path.join(CONFIGS, "*.json"))
    names = {load_spec(p).name for p in paths}
    assert EXPECTED_CONFIGS <= names


def test_rank_sweep_couples_probability():
    spec = load_spec(os.path.join(CONFIGS, "fig3b_rank.json"))
    for r, cfg in spec.points():
        assert cfg.n == 100 and cfg.p == pytest.approx(3 * r / 100) and cfg.T == 500 * r


# -- runner -----------------------------------------------------------------

def test_trivial_run_single_row():
    spec = small_spec(
        stream={"n": 10, "r": 2, "p": 1.0, "b": 4, "T": 4},
        sweep={"axis": "p", "values": [1.0]},
        trials=1,
    )
    report = run_experiment(spec)
    assert len(report) == 1
    assert report.rows[0].error < 1e-10


def test_row_count_and_range():
    spec = small_spec(estimators=["snipe", "zero_fill"])
    report = run_experiment(spec)
    K = spec.points()[0][1].K
    assert len(report) == 2 * 2 * 2 * K
    assert all(0.0 <= row.error <= 1.0 for row in report.rows)
    keys = [(r.estimator, r.axis_value, r.trial, r.block_k) for r in report.rows]
    order = {"snipe": 0, "zero_fill": 1}
    assert keys == sorted(keys, key=lambda k: (order[k[0]], k[1], k[2], k[3]))


def test_paired_streams_give_identical_snipe_traces():
    cfg = StreamConfig.uniform(20, 2, 0.5, 4, 20, seed=5)
    _, alone = run_trial(cfg, ("snipe",))
    _, together = run_trial(cfg, ("snipe", "grouse", "zero_fill"))
    assert alone["snipe"] == together["snipe"]


def test_parallel_matches_serial():
    spec = small_spec(trials=3, estimators=["snipe", "grouse"])
    a = run_experiment(spec, workers=1)
    b = run_experiment(spec, workers=3)
    assert a.rows == b.rows


def test_workers_env_override(monkeypatch):
    monkeypatch.setenv("SNIPE_WORKERS", "3")
    assert resolve_workers(1) == 3
    monkeypatch.delenv("SNIPE_WORKERS")
    assert resolve_workers(None) == 1


# -- CSV --------------------------------------------------------------------

def test_csv_empty_report(tmp_path):
    path = tmp_path / "e.csv"
    emit_csv(ExperimentReport("e", "p"), path)
    assert path.read_bytes() == (",".join(TRACE_HEADER) + "\n").encode()


def test_csv_one_row(tmp_path):
    path = tmp_path / "o.csv"
    emit_csv(ExperimentReport("o", "p", [TraceRow("snipe", "p", 0.5, 0, 1, 6, 0.1)]), path)
    lines = path.read_bytes().split(b"\n")
    assert lines == [",".join(TRACE_HEADER).encode(), b"snipe,p,0.5,0,1,6,0.10000000000000001", b""]


def test_csv_rerun_is_byte_identical(tmp_path):
    spec = small_spec()
    emit_csv(run_experiment(spec), tmp_path / "a.csv")
    emit_csv(run_experiment(spec), tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert b"\r" not in (tmp_path / "a.csv").read_bytes()


def test_csv_round_trip_is_exact(tmp_path):
    report = run_experiment(small_spec())
    emit_csv(report, tmp_path / "r.csv")
    back = read_csv(tmp_path / "r.csv")
    assert [r.error for r in back.rows] == [r.error for r in report.rows]


def test_summary_means_recomputable_from_csv(tmp_path, capsys):
    cfg = write_json(tmp_path / "s.json", {
        "name": "s", "stream": {"n": 20, "r": 2, "p": 0.4, "T": 24, "seed": 1},
        "sweep": {"axis": "p", "values": [0.4, 0.8]}, "trials": 4,
    })
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
    groups = defaultdict(list)
    with open(tmp_path / "s.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            groups[(row["estimator"], row["axis_value"], row["block_k"])].append(float(row["error"]))
    with open(tmp_path / "s_summary.csv", newline="") as fh:
        summary = list(csv.DictReader(fh))
    assert len(summary) == len(groups)
    for row in summary:
        vals = groups[(row["estimator"], row["axis_value"], row["block_k"])]
        assert abs(float(row["mean"]) - sum(vals) / len(vals)) <= 1e-12
        assert int(row["trials"]) == len(vals)


# -- plots ------------------------------------------------------------------

def polylines(path):
    return ET.parse(path).getroot().iter(SVG + "polyline")


def test_plot_single_series_one_polyline(tmp_path):
    rows = [TraceRow("snipe", "p", 0.5, 0, k, 6 * k, e) for k, e in ((1, 0.3), (2, 0.01))]
    emit_plot(ExperimentReport("x", "p", rows), tmp_path / "x.svg")
    lines = list(polylines(tmp_path / "x.svg"))
    assert len(lines) == 1
    assert len(lines[0].get("points").split()) == 2


def test_plot_clamps_zero_to_floor(tmp_path):
    rows = [TraceRow("snipe", "p", 1.0, 0, k, k, e) for k, e in ((1, 1e-3), (2, 0.0))]
    emit_plot(ExperimentReport("z", "p", rows), tmp_path / "z.svg")
    text = (tmp_path / "z.svg").read_text()
    assert "nan" not in text.lower() and "inf" not in text.lower()
    pts = [tuple(map(float, p.split(","))) for p in next(polylines(tmp_path / "z.svg")).get("points").split()]
    assert pts[1][1] > pts[0][1]  # lower error is drawn further down
    assert "1e-16" in text


def test_plot_empty_report(tmp_path):
    with pytest.raises(EmptyReport):
        emit_plot(ExperimentReport("e", "p"), tmp_path / "e.svg")


def test_plot_is_well_formed(tmp_path):
    spec = small_spec(estimators=["snipe", "zero_fill"])
    emit_plot(run_experiment(spec), tmp_path / "w.svg")
    root = ET.parse(tmp_path / "w.svg").getroot()
    assert root.tag == SVG + "svg"
    assert len(list(polylines(tmp_path / "w.svg"))) == 4


# -- CLI --------------------------------------------------------------------

def fig1_small(tmp_path):
    return write_json(tmp_path / "fig1.json", {
        "name": "fig1", "stream": {"n": 60, "r": 3, "p": 0.3, "b": "2*r", "T": 120, "seed": 0},
        "sweep": {"axis": "p", "values": [0.3]}, "trials": 3,
    })


def test_cli_simulate(tmp_path, capsys):
    cfg = fig1_small(tmp_path)
    assert main(["simulate", "--config", cfg, "--seed", "7", "--out", str(tmp_path / "o")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("final_dG=")
    float(out.strip().split("=")[1])
    with open(tmp_path / "o" / "fig1.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert {r["trial"] for r in rows} == {"0"}
    assert (tmp_path / "o" / "fig1.svg").exists()


def test_cli_seed_changes_stream(tmp_path, capsys):
    cfg = fig1_small(tmp_path)
    main(["simulate", "--config", cfg, "--seed", "7", "--out", str(tmp_path)])
    main(["simulate", "--config", cfg, "--seed", "8", "--out", str(tmp_path)])
    a, b = capsys.readouterr().out.split()
    assert a != b


def test_cli_compare(tmp_path, capsys):
    cfg = fig1_small(tmp_path)
    assert main(["compare", "--config", cfg, "--trials", "1", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    for name in ("snipe", "grouse", "zero_fill"):
        assert f"estimator={name}" in out


def test_cli_missing_config(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    assert main(["sweep", "--config", missing]) == 1
    assert missing in capsys.readouterr().err


def test_cli_invalid_config(tmp_path, capsys):
    cfg = write_json(tmp_path / "bad.json", {"name": "bad", "stream": {}, "sweep": {}})
    assert main(["sweep", "--config", cfg]) == 1
    assert "invalid configuration" in capsys.readouterr().err


def test_cli_bad_arguments():
    assert main(["simulate"]) == 1
    assert main(["frobnicate"]) == 1


def test_cli_runtime_error(tmp_path, capsys):
    cfg = fig1_small(tmp_path)
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["simulate", "--config", cfg, "--out", str(blocker)]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_oracle_check(capsys):
    assert main(["oracle-check", "--trials", "500"]) == 0
    assert "max_rel_err<1e-8" in capsys.readouterr().out
