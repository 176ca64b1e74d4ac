"""Command-line front end.

Subcommands:

* ``med``    exact MED/ER/MSED as JSON, optional fold trace CSV
* ``check``  histogram engine vs exhaustive enumeration (exit 1 on mismatch)
* ``mc``     Monte Carlo estimate or error distribution
* ``bench``  engine vs Monte Carlo runtime/accuracy sweep as CSV
* ``gen``    write seeded random slot tables as .tt files

Exit codes: 0 success, 1 check mismatch, 2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import platform
import statistics
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .histogram import compute_metrics
from .oracle import mc_error_distribution, mc_estimate, exhaustive_metrics
from .tables import (
    DEMO_LSB_TT,
    DEMO_MSB_TT,
    AdderConfig,
    TableFormatError,
    exact_table,
    format_table,
    parse_table,
    random_config,
    random_table,
    _slot_seeds,
)

_TRACE_FIELDS = (
    "iteration", "slot", "carry_pair", "a", "b",
    "cout_exact", "sum_exact", "cout_approx", "sum_approx", "diff", "matrix",
)

_BENCH_FIELDS = (
    "n", "m", "k", "S", "trials", "exact_ms", "mc_ms", "speedup", "exact_med",
    "mc_err_min", "mc_err_q1", "mc_err_median", "mc_err_q3", "mc_err_max",
)


@dataclass(frozen=True)
class BenchRow:
    """One line of the benchmark sweep; floats survive a CSV round trip."""

    n: int
    m: int
    k: int
    S: int
    trials: int
    exact_ms: float
    mc_ms: float
    speedup: float
    exact_med: float
    mc_err_min: float
    mc_err_q1: float
    mc_err_median: float
    mc_err_q3: float
    mc_err_max: float


# --- config assembly --------------------------------------------------------


def _load_table(spec: str, k: int):
    if spec == "exact":
        return exact_table(k)
    if spec == "demo-lsb":
        return parse_table(DEMO_LSB_TT)
    if spec == "demo-msb":
        return parse_table(DEMO_MSB_TT)
    return parse_table(Path(spec).read_text())


def _build_config(args) -> AdderConfig:
    if args.k < 1 or args.m % args.k:
        raise ValueError("k must divide m")
    nslots = args.m // args.k
    specs: list[str | None] = [None] * nslots
    base = args.table or []
    if len(base) == 1:
        specs = [base[0]] * nslots
    elif len(base) == nslots:
        specs = list(base)
    elif base:
        raise ValueError(f"--table given {len(base)} times; need 1 or {nslots}")
    for item in args.table_slot or []:
        idx_text, _, spec = item.partition(":")
        if not spec:
            raise ValueError(f"--table-slot needs INDEX:FILE, got {item!r}")
        try:
            idx = int(idx_text)
        except ValueError:
            raise ValueError(f"bad slot index in {item!r}") from None
        if not 0 <= idx < nslots:
            raise ValueError(f"slot index {idx} out of range 0..{nslots - 1}")
        specs[idx] = spec
    missing = [i for i, s in enumerate(specs) if s is None]
    if missing:
        raise ValueError(f"no table for slot(s) {missing}; use --table or --table-slot")
    slots = tuple(_load_table(s, args.k) for s in specs)
    return AdderConfig(
        args.n or args.m,
        args.m,
        args.k,
        slots,
        sign_mode=-1 if args.signed else 1,
        initial_carry=args.cin,
    )


def _manifest(args, extra: dict) -> dict:
    return {
        "command": list(args.argv),
        "seed": args.seed,
        "version": __version__,
        "host": f"{platform.platform()} / Python {platform.python_version()}",
        "timestamp": datetime.now(timezone.utc).isoformat(),
        **extra,
    }


def _emit(args, text: str) -> None:
    if not args.quiet:
        print(text)


# --- subcommands -------------------------------------------------------------


def _write_trace(path: str, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_TRACE_FIELDS)
        for r in records:
            pair = f"{r.carry_exact}{r.carry_approx}"
            if r.skipped:
                w.writerow([r.iteration, r.slot, pair, r.a, r.b] + ["NA"] * 6)
            else:
                w.writerow([
                    r.iteration, r.slot, pair, r.a, r.b,
                    r.cout_exact, r.sum_exact, r.cout_approx, r.sum_approx,
                    r.diff, f"{r.target >> 1}{r.target & 1}",
                ])


def cmd_med(args) -> int:
    config = _build_config(args)
    if args.trace:
        records = []
        _, report = compute_metrics(config, record_sink=lambda rec, mats: records.append(rec))
        _write_trace(args.trace, records)
    else:
        _, report = compute_metrics(config)
    payload = {
        "med": str(report.med),
        "med_float": float(report.med),
        "er": str(report.er),
        "msed": str(report.msed),
        "ed_tot": {
            "00": report.ed_totals[0],
            "01": report.ed_totals[1],
            "10": report.ed_totals[2],
            "11": report.ed_totals[3],
        },
        "iterations": report.iterations,
        "trace_length": report.iterations,
        "wall_ms": report.wall_time * 1000.0,
    }
    print(json.dumps(payload, indent=2))
    if args.manifest:
        tables = list(args.table or []) + list(args.table_slot or [])
        Path(args.manifest).write_text(
            json.dumps(_manifest(args, {"tables": tables}), indent=2) + "\n"
        )
    return 0


def cmd_check(args) -> int:
    config = _build_config(args)
    if config.m > args.max_m:
        raise ValueError(f"check is limited to m <= {args.max_m}, got m={config.m}")
    _, report = compute_metrics(config)
    med, er, msed = exhaustive_metrics(config)
    ok = report.med == med and report.er == er and report.msed == msed
    if args.json_out:
        print(json.dumps({
            "match": ok,
            "engine": {"med": str(report.med), "er": str(report.er), "msed": str(report.msed)},
            "exhaustive": {"med": str(med), "er": str(er), "msed": str(msed)},
        }, indent=2))
    elif not ok:
        print("MISMATCH between histogram engine and exhaustive enumeration:")
        print(f"  engine:     med={report.med} er={report.er} msed={report.msed}")
        print(f"  exhaustive: med={med} er={er} msed={msed}")
    else:
        _emit(args, f"ok: med={med} er={er} msed={msed} (engine matches exhaustive enumeration)")
    return 0 if ok else 1


def cmd_mc(args) -> int:
    config = _build_config(args)
    _, report = compute_metrics(config)
    if args.trials == 1:
        st = mc_estimate(config, args.samples, args.seed, exact_med=report.med)
    elif args.trials >= 5:
        st = mc_error_distribution(
            config, args.samples, args.trials, args.seed, exact_med=report.med
        )
    else:
        raise ValueError("use --trials 1 or at least 5")
    payload = {
        "samples": st.samples,
        "trials": args.trials,
        "estimate": st.estimate,
        "exact_med": str(report.med),
        "exact_med_float": float(report.med),
        "abs_error": st.abs_error,
    }
    if args.trials > 1:
        payload.update(
            err_min=st.err_min, err_q1=st.err_q1, err_median=st.err_median,
            err_q3=st.err_q3, err_max=st.err_max,
        )
    print(json.dumps(payload, indent=2))
    return 0


def _time_median(fn, reps: int):
    times = []
    result = None
    for _ in range(reps):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), result


def _bench_row(m: int, k: int, n: int, samples: int, trials: int, seed: int,
               reps: int = 5) -> BenchRow:
    configs = [random_config(m, k, seed + t) for t in range(trials)]
    # one untimed warm-up covers jit compilation and allocator effects
    compute_metrics(configs[0])
    mc_estimate(configs[0], samples, seed)
    exact_times, mc_times, errors, meds = [], [], [], []
    for t, cfg in enumerate(configs):
        te, (_, report) = _time_median(lambda: compute_metrics(cfg), reps)
        tm, st = _time_median(
            lambda: mc_estimate(cfg, samples, seed + t, exact_med=report.med), reps
        )
        exact_times.append(te)
        mc_times.append(tm)
        errors.append(st.abs_error)
        meds.append(float(report.med))
    exact_ms = 1000.0 * statistics.median(exact_times)
    mc_ms = 1000.0 * statistics.median(mc_times)
    q = np.percentile(errors, [0, 25, 50, 75, 100])
    return BenchRow(
        n, m, k, samples, trials, exact_ms, mc_ms, mc_ms / exact_ms,
        float(np.mean(meds)), float(q[0]), float(q[1]), float(q[2]), float(q[3]),
        float(q[4]),
    )


def write_bench_csv(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(_BENCH_FIELDS)
    for r in rows:
        w.writerow([getattr(r, f) for f in _BENCH_FIELDS])


def read_bench_csv(path) -> list[BenchRow]:
    """Parse a bench CSV back into rows; inverse of :func:`write_bench_csv`."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(BenchRow(**{
                f: (int if f in ("n", "m", "k", "S", "trials") else float)(rec[f])
                for f in _BENCH_FIELDS
            }))
    return rows


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from None


def cmd_bench(args) -> int:
    m_list = _int_list(args.m_list)
    samples_list = _int_list(args.samples_list)
    if not m_list or not samples_list:
        raise ValueError("--m-list and --samples-list must be non-empty")
    rows = []
    for m in m_list:
        for samples in samples_list:
            rows.append(_bench_row(
                m, args.k, args.n or m, samples, args.trials, args.seed
            ))
            _emit(args, f"done m={m} S={samples}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_bench_csv(rows, fh)
        manifest = _manifest(args, {"rows": len(rows), "out": str(args.out)})
        Path(str(args.out) + ".manifest.json").write_text(
            json.dumps(manifest, indent=2) + "\n"
        )
    else:
        write_bench_csv(rows, sys.stdout)
    return 0


def cmd_gen(args) -> int:
    if args.k < 1 or args.slots < 1:
        raise ValueError("--k and --slots must be >= 1")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for i, s in enumerate(_slot_seeds(args.seed, args.slots)):
        path = out / f"slot_{i}.tt"
        path.write_text(format_table(random_table(args.k, s)))
        files.append(path.name)
        _emit(args, str(path))
    manifest = _manifest(args, {"k": args.k, "slots": args.slots, "files": files})
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return 0


# --- parser ------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    # also accepted after the subcommand; SUPPRESS keeps the global value
    # unless the subcommand repeats the flag
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--json", dest="json_out", action="store_true", default=argparse.SUPPRESS)
    p.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--m", type=int, required=True, help="approximated width in bits")
    p.add_argument("--k", type=int, default=1, help="sub-adder width (default 1)")
    p.add_argument("--n", type=int, default=None, help="total adder width (default m)")
    p.add_argument("--table", action="append", metavar="FILE",
                   help="slot table: path, 'exact', 'demo-lsb' or 'demo-msb'; "
                        "give once for all slots or once per slot")
    p.add_argument("--table-slot", action="append", metavar="I:FILE",
                   help="assign FILE to slot I (overrides --table)")
    p.add_argument("--signed", action="store_true",
                   help="two's-complement operands (experimental)")
    p.add_argument("--cin", type=int, choices=(0, 1), default=0,
                   help="carry into slot 0 (default 0)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apxadder",
        description="Exact error metrics for approximate LSB adders.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
    parser.add_argument("--json", dest="json_out", action="store_true",
                        help="structured output where supported")
    parser.add_argument("--quiet", action="store_true", help="suppress progress text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("med", help="exact MED/ER/MSED as JSON")
    _add_config_flags(p)
    p.add_argument("--trace", metavar="FILE", help="write the fold trace as CSV")
    p.add_argument("--manifest", metavar="FILE", help="write a run manifest as JSON")
    _add_common(p)
    p.set_defaults(func=cmd_med)

    p = sub.add_parser("check", help="engine vs exhaustive enumeration")
    _add_config_flags(p)
    p.add_argument("--max-m", type=int, default=14,
                   help="refuse configs wider than this (default 14)")
    _add_common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("mc", help="Monte Carlo MED estimate")
    _add_config_flags(p)
    p.add_argument("--samples", type=int, required=True, help="operand pairs per trial")
    p.add_argument("--trials", type=int, default=1,
                   help="1 for a point estimate, >=5 for an error distribution")
    _add_common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("bench", help="engine vs Monte Carlo sweep, CSV output")
    p.add_argument("--m-list", required=True, help="comma-separated widths")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--n", type=int, default=None, help="reported total width (default m)")
    p.add_argument("--samples-list", required=True, help="comma-separated sample counts")
    p.add_argument("--trials", type=int, default=5, help="random adders per case (default 5)")
    p.add_argument("--out", metavar="FILE", help="CSV path (default stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write seeded random slot tables")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--slots", type=int, required=True)
    p.add_argument("--out", required=True, metavar="DIR")
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    args = _build_parser().parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except (TableFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
