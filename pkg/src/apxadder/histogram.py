"""Carry-state error-histogram propagation and exact metric finalization.

The engine walks the slot chain once.  Its state is a quartet of
histograms, one per (exact carry, approximate carry) pair: row d, column 0
counts operand pairs whose exact minus approximate partial sum is +d, column
1 counts -d.  Each slot folds every (a, b) input combination of that slot
into the next quartet by shifting whole histograms, so the cost per slot is
proportional to the histogram size, not to the number of operand pairs.

After the last slot the quartet is collapsed into exact rational metrics:

* MED, the mean absolute error distance,
* ER, the probability of a wrong output,
* MSED, the mean squared error distance.

Counts are dense uint64 arrays.  Their total is 2**(2m) <= 2**56 for the
supported m <= 28, so individual counters cannot overflow; every reduction
that could exceed 64 bits is done in exact Python integers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .tables import AdderConfig

__all__ = [
    "COUNT_DTYPE",
    "ErrorHistogram",
    "TraceRecord",
    "MedReport",
    "initial_histogram",
    "sum_difference",
    "shift_accumulate",
    "advance_slot",
    "compute_metrics",
    "matrix_error_total",
    "med_from_histogram",
    "er_from_histogram",
    "msed_from_histogram",
    "iteration_count",
    "iteration_bound",
]

COUNT_DTYPE = np.uint64


@dataclass(frozen=True, eq=False)
class ErrorHistogram:
    """Quartet of signed-difference histograms after some number of slots.

    ``mats`` has shape (4, 2**bits_processed, 2); the first index is the
    carry pair ``(cout_exact << 1) | cout_approx``.  Instances are immutable:
    the backing array is marked read-only on construction.
    """

    mats: np.ndarray
    bits_processed: int

    def __post_init__(self):
        if self.mats.shape != (4, 1 << self.bits_processed, 2):
            raise ValueError(f"bad histogram shape {self.mats.shape}")
        if self.mats.dtype != COUNT_DTYPE:
            raise ValueError(f"histogram dtype must be {COUNT_DTYPE}")
        self.mats.setflags(write=False)

    def matrix(self, cout_exact: int, cout_approx: int) -> np.ndarray:
        """Read-only view of the histogram for one carry pair."""
        return self.mats[(cout_exact << 1) | cout_approx]

    def total_count(self) -> int:
        """Total mass; equals 2**(2*bits_processed) after slot 0 ran."""
        return int(self.mats.sum(dtype=COUNT_DTYPE))


@dataclass(frozen=True)
class TraceRecord:
    """One iteration of the fold: which input hit which carry pair.

    Skipped iterations (source histogram all zero) carry ``None`` in the
    evaluation fields and ``target is None``.
    """

    iteration: int
    slot: int
    carry_exact: int
    carry_approx: int
    a: int
    b: int
    cout_exact: int | None = None
    sum_exact: int | None = None
    cout_approx: int | None = None
    sum_approx: int | None = None
    diff: int | None = None
    target: int | None = None

    @property
    def skipped(self) -> bool:
        return self.target is None


@dataclass(frozen=True)
class MedReport:
    """Exact metrics plus engine accounting for one configuration.

    ``ed_totals`` holds the per-carry-pair absolute error-distance totals in
    carry-pair order 00, 01, 10, 11; their sum over 2**(2m) is ``med``.
    ``iterations`` counts fold iterations (skips included), ``row_ops``
    counts histogram rows accumulated, ``wall_time`` is seconds.
    """

    med: Fraction
    er: Fraction
    msed: Fraction
    ed_totals: tuple[int, int, int, int]
    iterations: int
    row_ops: int
    wall_time: float


def initial_histogram(initial_carry: int = 0) -> ErrorHistogram:
    """Quartet before any slot: one pair with zero difference, carries equal."""
    if initial_carry not in (0, 1):
        raise ValueError("initial_carry must be 0 or 1")
    mats = np.zeros((4, 1, 2), dtype=COUNT_DTYPE)
    mats[(initial_carry << 1) | initial_carry, 0, 0] = 1
    return ErrorHistogram(mats, 0)


def sum_difference(sum_exact: int, sum_approx: int, bit_offset: int) -> int:
    """Weighted difference the current slot contributes at bit position p."""
    return (sum_exact - sum_approx) << bit_offset


def shift_accumulate(src: np.ndarray, dst: np.ndarray, diff: int) -> None:
    """Accumulate src into dst with every stored difference moved by diff.

    src rows hold differences +d (column 0) and -d (column 1); adding the
    signed offset sends each count to the row/column of ``|offset +- d|``.
    Raises IndexError when a target row would fall outside dst; that is
    impossible for differences produced by a valid slot and means an
    internal fault.
    """
    rows = src.shape[0]
    if diff == 0:
        if rows > dst.shape[0]:
            raise IndexError(f"cannot place {rows} rows into {dst.shape[0]}")
        dst[:rows] += src
        return
    mag = abs(diff)
    if mag < rows or mag + rows > dst.shape[0]:
        raise IndexError(
            f"offset {diff} out of range for {rows} -> {dst.shape[0]} rows"
        )
    col = 0 if diff > 0 else 1
    # same-sign counts move away from zero, opposite-sign counts fold across
    # it; |diff| >= rows keeps both slices inside dst and row 0 untouched.
    dst[mag : mag + rows, col] += src[:, col]
    dst[mag - rows + 1 : mag + 1, col] += src[::-1, 1 - col]


def advance_slot(
    config: AdderConfig,
    slot_index: int,
    hist: ErrorHistogram,
    record_sink=None,
    first_iteration: int = 1,
) -> ErrorHistogram:
    """Fold one slot's inputs into the next quartet (reference path).

    ``record_sink(record, mats)`` is called once per iteration with the
    working output array; copy anything you need to keep.  Slot 0 only
    visits the single carry pair fixed by ``initial_carry``; later slots
    visit all four, counting but not evaluating all-zero sources.
    """
    k = config.k
    p = slot_index * k
    if hist.bits_processed != p:
        raise ValueError(
            f"slot {slot_index} expects {p} processed bits, "
            f"histogram has {hist.bits_processed}"
        )
    mask = (1 << k) - 1
    out = np.zeros((4, 1 << (p + k), 2), dtype=COUNT_DTYPE)
    table = config.slots[slot_index]
    live = [bool(hist.mats[j].any()) for j in range(4)]
    init_pair = (config.initial_carry << 1) | config.initial_carry
    pairs = (init_pair,) if slot_index == 0 else (0, 1, 2, 3)
    iteration = first_iteration
    for a in range(1 << k):
        for b in range(1 << k):
            for pair in pairs:
                ce, ca = pair >> 1, pair & 1
                if not live[pair]:
                    if record_sink is not None:
                        record_sink(
                            TraceRecord(iteration, slot_index, ce, ca, a, b), out
                        )
                    iteration += 1
                    continue
                total = a + b + ce
                cout_e, sum_e = total >> k, total & mask
                cout_a, sum_a = table.evaluate(ca, a, b)
                diff = sum_difference(sum_e, sum_a, p)
                target = (cout_e << 1) | cout_a
                shift_accumulate(hist.mats[pair], out[target], diff)
                if record_sink is not None:
                    record_sink(
                        TraceRecord(
                            iteration, slot_index, ce, ca, a, b,
                            cout_e, sum_e, cout_a, sum_a, diff, target,
                        ),
                        out,
                    )
                iteration += 1
    return ErrorHistogram(out, p + k)


def compute_metrics(config: AdderConfig, record_sink=None):
    """Run the full fold and finalize; returns (ErrorHistogram, MedReport).

    Without a sink the active kernel backend does the propagation; with one,
    the slower reference path runs and reports every iteration.  Both paths
    produce bit-identical histograms.
    """
    t0 = time.perf_counter()
    if record_sink is None:
        from . import backend

        couts, sums = config.slot_arrays()
        mats, iterations, row_ops = backend.kernels.propagate_histogram(
            couts, sums, config.k, config.m, config.initial_carry
        )
        hist = ErrorHistogram(np.asarray(mats), config.m)
        iterations, row_ops = int(iterations), int(row_ops)
    else:
        hist = initial_histogram(config.initial_carry)
        iterations = row_ops = 0

        def counting_sink(rec, mats):
            nonlocal iterations, row_ops
            iterations += 1
            if not rec.skipped:
                row_ops += 1 << (rec.slot * config.k)
            record_sink(rec, mats)

        for i in range(config.slot_count):
            hist = advance_slot(
                config, i, hist, counting_sink, first_iteration=iterations + 1
            )
    med, er, msed, totals = _finalize(hist, config.m, config.sign_mode)
    report = MedReport(
        med, er, msed, totals, iterations, row_ops, time.perf_counter() - t0
    )
    return hist, report


# --- finalization ----------------------------------------------------------


def _plane_geometry(m: int) -> tuple[int, int, int]:
    """Digit-plane split for exact weighted sums over a 2**m-row histogram.

    Total mass is <= 2**(2m), so with plane weights below 2**L and
    L = 62 - 2m every partial sum stays under 2**62 in uint64.  The row
    index d needs ceil(m/L) planes, d**2 needs ceil(2m/L).
    """
    plane_bits = max(1, 62 - 2 * m)
    d_planes = -(-m // plane_bits) if m else 1
    d2_planes = -(-2 * m // plane_bits) if m else 1
    return plane_bits, d_planes, d2_planes


def _matrix_reductions(mat: np.ndarray, m: int):
    """Per-column mass, first and second moments of one histogram.

    Returns exact Python ints (sum_pos, sum_neg, d_pos, d_neg, d2_pos,
    d2_neg); the plane accumulation runs on the active kernel backend.
    """
    from . import backend

    plane_bits, d_planes, d2_planes = _plane_geometry(m)
    s0, s1, s2 = backend.kernels.matrix_moment_planes(
        mat, plane_bits, d_planes, d2_planes
    )

    def combine(planes) -> int:
        return sum(int(v) << (plane_bits * j) for j, v in enumerate(planes))

    return (
        int(s0[0]),
        int(s0[1]),
        combine(s1[0]),
        combine(s1[1]),
        combine(s2[0]),
        combine(s2[1]),
    )


def _finalize(hist: ErrorHistogram, m: int, sign_mode: int):
    totals = []
    med_sum = 0
    msed_sum = 0
    zero_hits = 0
    for idx in range(4):
        ce, ca = idx >> 1, idx & 1
        sp, sn, s1p, s1n, s2p, s2n = _matrix_reductions(hist.mats[idx], m)
        if ce == ca:
            ed_tot = s1p + s1n
            msed_sum += s2p + s2n
            zero_hits += int(hist.mats[idx][0, 0])
        else:
            # carry mismatch shifts every stored difference by mu*(ce-ca)*2**m
            offset = (sign_mode * (ce - ca)) << m
            ed_tot = abs(offset * (sp + sn) + (s1p - s1n))
            msed_sum += (sp + sn) * offset * offset + 2 * offset * (s1p - s1n) + s2p + s2n
        totals.append(ed_tot)
        med_sum += ed_tot
    denom = 1 << (2 * m)
    return (
        Fraction(med_sum, denom),
        Fraction(denom - zero_hits, denom),
        Fraction(msed_sum, denom),
        tuple(totals),
    )


def matrix_error_total(
    mat: np.ndarray, cout_exact: int, cout_approx: int, m: int, sign_mode: int = 1
) -> int:
    """Total absolute error distance contributed by one carry pair."""
    sp, sn, s1p, s1n, _, _ = _matrix_reductions(mat, m)
    if cout_exact == cout_approx:
        return s1p + s1n
    offset = (sign_mode * (cout_exact - cout_approx)) << m
    return abs(offset * (sp + sn) + (s1p - s1n))


def med_from_histogram(hist: ErrorHistogram, sign_mode: int = 1) -> Fraction:
    """Mean error distance of a fully propagated quartet."""
    m = hist.bits_processed
    total = sum(
        matrix_error_total(hist.mats[idx], idx >> 1, idx & 1, m, sign_mode)
        for idx in range(4)
    )
    return Fraction(total, 1 << (2 * m))


def er_from_histogram(hist: ErrorHistogram) -> Fraction:
    """Probability that the approximate result differs from the exact one."""
    m = hist.bits_processed
    correct = int(hist.mats[0][0, 0]) + int(hist.mats[3][0, 0])
    denom = 1 << (2 * m)
    return Fraction(denom - correct, denom)


def msed_from_histogram(hist: ErrorHistogram, sign_mode: int = 1) -> Fraction:
    """Mean squared error distance of a fully propagated quartet."""
    return _finalize(hist, hist.bits_processed, sign_mode)[2]


def iteration_count(m: int, k: int) -> int:
    """Fold iterations the engine performs: 2**(2k) * (4*m/k - 3)."""
    if k < 1 or m % k:
        raise ValueError("k must divide m")
    return (1 << (2 * k)) * (4 * (m // k) - 3)


def iteration_bound(m: int, k: int) -> int:
    """Upper bound (m/k) * 2**(2k+2): all four pairs in every slot."""
    if k < 1 or m % k:
        raise ValueError("k must divide m")
    return (m // k) * (1 << (2 * k + 2))
