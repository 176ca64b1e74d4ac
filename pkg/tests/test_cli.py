"""End-to-end checks of the apxadder command line via an in-process main()."""

import csv
import dataclasses
import json
from fractions import Fraction

import pytest

import apxadder.cli as cli
from apxadder import compute_metrics, demo_config, parse_table

MED_KEYS = {
    "med", "med_float", "er", "msed", "ed_tot",
    "iterations", "trace_length", "wall_ms",
}

DEMO_ARGS = ["med", "--m", "2", "--k", "1",
             "--table-slot", "0:demo-lsb", "--table-slot", "1:demo-msb"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


# --- med ----------------------------------------------------------------


def test_med_demo_json(capsys):
    payload = run_json(capsys, *DEMO_ARGS)
    assert set(payload) == MED_KEYS
    assert payload["med"] == "3/2"
    assert payload["med_float"] == 1.5
    assert payload["er"] == "3/4"
    assert payload["msed"] == "4"
    assert payload["ed_tot"] == {"00": 2, "01": 12, "10": 0, "11": 10}
    assert payload["iterations"] == 20
    assert payload["trace_length"] == 20
    assert payload["wall_ms"] >= 0.0


def test_med_exact_tables_give_zero_error(capsys):
    payload = run_json(capsys, "med", "--m", "6", "--k", "2", "--table", "exact")
    assert payload["med"] == "0"
    assert payload["er"] == "0"
    assert payload["msed"] == "0"


def test_med_table_file_and_slot_override(capsys, tmp_path):
    path = tmp_path / "lsb.tt"
    path.write_text(cli.DEMO_LSB_TT)
    payload = run_json(
        capsys, "med", "--m", "2", "--k", "1",
        "--table", "exact", "--table-slot", f"0:{path}",
        "--table-slot", "1:demo-msb",
    )
    assert payload["med"] == "3/2"


def test_med_rejects_k_not_dividing_m(capsys):
    code, _, err = run(capsys, "med", "--m", "5", "--k", "2", "--table", "exact")
    assert code == 2
    assert "k must divide m" in err


def test_med_rejects_wrong_table_count(capsys):
    code, _, err = run(capsys, "med", "--m", "4", "--k", "1",
                       "--table", "exact", "--table", "exact")
    assert code == 2
    assert "need 1 or 4" in err


def test_med_rejects_missing_slot(capsys):
    code, _, err = run(capsys, "med", "--m", "2", "--k", "1",
                       "--table-slot", "0:exact")
    assert code == 2
    assert "slot(s) [1]" in err


def test_med_rejects_bad_slot_index(capsys):
    code, _, err = run(capsys, "med", "--m", "2", "--k", "1",
                       "--table", "exact", "--table-slot", "5:exact")
    assert code == 2
    assert "out of range" in err


def test_med_reports_tt_parse_error_with_line(capsys, tmp_path):
    path = tmp_path / "broken.tt"
    lines = cli.DEMO_LSB_TT.strip().splitlines()
    lines[3] = "0 1 0 : 9 9"
    path.write_text("\n".join(lines) + "\n")
    code, _, err = run(capsys, "med", "--m", "2", "--k", "1",
                       "--table", str(path))
    assert code == 2
    assert "line 4" in err


def test_med_trace_matches_demo_fold(capsys, tmp_path):
    trace = tmp_path / "trace.csv"
    run_json(capsys, *DEMO_ARGS, "--trace", str(trace))
    with open(trace, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == list(cli._TRACE_FIELDS)
    body = rows[1:]
    assert len(body) == 20
    assert body[0] == ["1", "0", "00", "0", "0", "0", "0", "0", "0", "0", "00"]
    assert body[1] == ["2", "0", "00", "0", "1", "0", "1", "1", "0", "1", "01"]
    # zero-mass carry pairs are logged but not folded
    assert body[6] == ["7", "1", "10", "0", "0"] + ["NA"] * 6
    assert body[11] == ["12", "1", "11", "0", "1", "1", "0", "1", "0", "0", "11"]
    assert body[19] == ["20", "1", "11", "1", "1", "1", "1", "1", "0", "2", "11"]
    skips = [r for r in body if r[5] == "NA"]
    assert [r[0] for r in skips] == ["7", "11", "15", "19"]


def test_med_manifest_reproduces_run(capsys, tmp_path):
    manifest = tmp_path / "run.json"
    first = run_json(capsys, *DEMO_ARGS, "--manifest", str(manifest))
    saved = json.loads(manifest.read_text())
    assert saved["seed"] == 0
    assert saved["command"] == DEMO_ARGS + ["--manifest", str(manifest)]
    second = run_json(capsys, *saved["command"])
    first.pop("wall_ms"), second.pop("wall_ms")
    assert first == second


# --- check ---------------------------------------------------------------


def test_check_demo_passes(capsys):
    code, out, _ = run(capsys, "check", "--m", "2", "--k", "1",
                       "--table-slot", "0:demo-lsb", "--table-slot", "1:demo-msb")
    assert code == 0
    assert "ok:" in out and "med=3/2" in out


def test_check_json_flag_after_subcommand(capsys):
    payload = run_json(capsys, "check", "--m", "2", "--k", "1",
                       "--table-slot", "0:demo-lsb", "--table-slot", "1:demo-msb",
                       "--json")
    assert payload["match"] is True
    assert payload["engine"] == payload["exhaustive"]


def test_check_detects_engine_corruption(capsys, monkeypatch):
    def corrupted(config, **kw):
        hist, report = compute_metrics(config, **kw)
        return hist, dataclasses.replace(report, med=report.med + Fraction(1, 7))

    monkeypatch.setattr(cli, "compute_metrics", corrupted)
    code, out, _ = run(capsys, "check", "--m", "2", "--k", "1",
                       "--table-slot", "0:demo-lsb", "--table-slot", "1:demo-msb")
    assert code == 1
    assert "MISMATCH" in out
    assert "med=23/14" in out      # corrupted engine value
    assert "med=3/2" in out        # exhaustive truth


def test_check_refuses_wide_configs(capsys):
    code, _, err = run(capsys, "check", "--m", "16", "--k", "1", "--table", "exact")
    assert code == 2
    assert "m <= 14" in err


# --- mc ------------------------------------------------------------------


def test_mc_point_estimate(capsys):
    payload = run_json(capsys, "--seed", "3", "mc", "--m", "2", "--k", "1",
                       "--table-slot", "0:demo-lsb", "--table-slot", "1:demo-msb",
                       "--samples", "64")
    assert payload["trials"] == 1
    assert payload["samples"] == 64
    assert payload["exact_med"] == "3/2"
    assert payload["abs_error"] == pytest.approx(
        abs(payload["estimate"] - 1.5))
    assert "err_median" not in payload


def test_mc_distribution(capsys):
    payload = run_json(capsys, "mc", "--m", "4", "--k", "1", "--table", "exact",
                       "--samples", "32", "--trials", "5", "--seed", "9")
    assert payload["trials"] == 5
    # exact slots add exactly, so every trial sees zero error
    for key in ("err_min", "err_q1", "err_median", "err_q3", "err_max"):
        assert payload[key] == 0.0


def test_mc_rejects_bad_trials(capsys):
    code, _, err = run(capsys, "mc", "--m", "2", "--k", "1", "--table", "exact",
                       "--samples", "16", "--trials", "3")
    assert code == 2
    assert "--trials" in err


# --- bench ---------------------------------------------------------------


def test_bench_csv_round_trip(capsys, tmp_path):
    out = tmp_path / "bench.csv"
    code, _, err = run(capsys, "--quiet", "bench", "--m-list", "4",
                       "--samples-list", "16,32", "--trials", "5",
                       "--out", str(out))
    assert code == 0, err
    with open(out, newline="") as fh:
        header = fh.readline().strip()
    assert header == ",".join(cli._BENCH_FIELDS)
    rows = cli.read_bench_csv(out)
    assert [(r.m, r.S) for r in rows] == [(4, 16), (4, 32)]
    for row in rows:
        assert row.n == 4 and row.k == 1 and row.trials == 5
        assert row.exact_ms > 0 and row.mc_ms > 0
        assert row.speedup == pytest.approx(row.mc_ms / row.exact_ms)
        assert row.mc_err_min <= row.mc_err_q1 <= row.mc_err_median
        assert row.mc_err_median <= row.mc_err_q3 <= row.mc_err_max
    manifest = json.loads((tmp_path / "bench.csv.manifest.json").read_text())
    assert manifest["rows"] == 2


def test_bench_writes_stdout_by_default(capsys):
    code, out, _ = run(capsys, "--quiet", "bench", "--m-list", "2",
                       "--samples-list", "8", "--trials", "5")
    assert code == 0
    assert out.splitlines()[0] == ",".join(cli._BENCH_FIELDS)
    assert len(out.splitlines()) == 2


def test_bench_rejects_bad_list(capsys):
    code, _, err = run(capsys, "bench", "--m-list", "4,x", "--samples-list", "8")
    assert code == 2
    assert "comma-separated" in err


# --- gen -----------------------------------------------------------------


def test_gen_writes_parseable_tables(capsys, tmp_path):
    out = tmp_path / "tabs"
    code, _, _ = run(capsys, "--quiet", "--seed", "11", "gen",
                     "--k", "2", "--slots", "3", "--out", str(out))
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["k"] == 2 and manifest["slots"] == 3
    assert manifest["seed"] == 11
    assert manifest["files"] == ["slot_0.tt", "slot_1.tt", "slot_2.tt"]
    for name in manifest["files"]:
        table = parse_table((out / name).read_text())
        assert table.width == 2


def test_gen_same_seed_same_bytes(capsys, tmp_path):
    a, b, c = (tmp_path / x for x in "abc")
    run(capsys, "--seed", "7", "gen", "--k", "1", "--slots", "2", "--out", str(a))
    # seed accepted before or after the subcommand
    run(capsys, "gen", "--k", "1", "--slots", "2", "--out", str(b), "--seed", "7")
    run(capsys, "--seed", "8", "gen", "--k", "1", "--slots", "2", "--out", str(c))
    read = lambda d: [(d / f"slot_{i}.tt").read_text() for i in range(2)]
    assert read(a) == read(b)
    assert read(a) != read(c)


def test_gen_output_feeds_med(capsys, tmp_path):
    out = tmp_path / "tabs"
    run(capsys, "--quiet", "--seed", "5", "gen", "--k", "1", "--slots", "4",
        "--out", str(out))
    tables = [str(out / f"slot_{i}.tt") for i in range(4)]
    argv = ["med", "--m", "4", "--k", "1"]
    for t in tables:
        argv += ["--table", t]
    payload = run_json(capsys, *argv)
    assert Fraction(payload["med"]) >= 0


# --- plumbing ------------------------------------------------------------


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
    assert "apxadder" in capsys.readouterr().out


def test_missing_table_file_exits_2(capsys, tmp_path):
    code, _, err = run(capsys, "med", "--m", "2", "--k", "1",
                       "--table", str(tmp_path / "nope.tt"))
    assert code == 2
    assert "error:" in err


def test_signed_flag_changes_demo_med(capsys):
    payload = run_json(capsys, *DEMO_ARGS, "--signed")
    assert payload["med"] == "2"
    assert payload["ed_tot"] == {"00": 2, "01": 20, "10": 0, "11": 10}
