"""Independent baselines: exhaustive enumeration and Monte Carlo estimation.

These never touch the histogram engine's propagation logic; they chain the
slot tables pair by pair, so agreement with :func:`compute_metrics` is a
real cross-check, not a tautology.  Both model unsigned operands and refuse
signed configurations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .histogram import compute_metrics
from .tables import AdderConfig

__all__ = [
    "EXHAUSTIVE_MAX_M",
    "McStats",
    "exhaustive_metrics",
    "mc_estimate",
    "mc_error_distribution",
]

# 2**(2m) pairs: m=14 is 268M evaluations, the practical single-core limit
EXHAUSTIVE_MAX_M = 14
# the enumeration kernels accumulate in int64; safe while 4m + 2 <= 63
_ENUM_SAFE_MAX_M = 15


@dataclass(frozen=True)
class McStats:
    """Monte Carlo outcome: point estimate plus optional error statistics.

    ``abs_error`` is |estimate - exact MED| when the exact value was
    available.  The quartile fields summarize absolute errors across
    repeated trials and stay None for single runs.
    """

    samples: int
    estimate: float
    abs_error: float | None = None
    err_min: float | None = None
    err_q1: float | None = None
    err_median: float | None = None
    err_q3: float | None = None
    err_max: float | None = None


def _require_unsigned(config: AdderConfig, what: str) -> None:
    if config.sign_mode != 1:
        raise ValueError(f"{what} models unsigned error distance only")


def exhaustive_metrics(config: AdderConfig) -> tuple[Fraction, Fraction, Fraction]:
    """Exact (med, er, msed) by enumerating every operand pair.

    Guarded to m <= 14; use the histogram engine beyond that.
    """
    _require_unsigned(config, "the exhaustive oracle")
    if config.m > EXHAUSTIVE_MAX_M:
        raise ValueError(
            f"exhaustive enumeration is limited to m <= {EXHAUSTIVE_MAX_M}, got m={config.m}"
        )
    from . import backend

    couts, sums = config.slot_arrays()
    total, total_sq, nonzero = backend.kernels.exhaustive_ed_sums(
        couts, sums, config.k, config.m, config.initial_carry
    )
    denom = 1 << (2 * config.m)
    return (
        Fraction(int(total), denom),
        Fraction(int(nonzero), denom),
        Fraction(int(total_sq), denom),
    )


def mc_estimate(
    config: AdderConfig,
    samples: int,
    seed: int,
    exact_med: Fraction | None = None,
) -> McStats:
    """Estimate MED from uniform operand pairs drawn with the given seed.

    When ``samples`` covers the whole input space (>= 2**(2m)) the sampler
    switches to exhaustive enumeration and the estimate is exact.
    """
    _require_unsigned(config, "Monte Carlo estimation")
    if samples < 1:
        raise ValueError("need at least one sample")
    from . import backend

    couts, sums = config.slot_arrays()
    pair_count = 1 << (2 * config.m)
    if samples >= pair_count:
        if config.m > _ENUM_SAFE_MAX_M:
            raise ValueError(
                f"full coverage needs enumeration, supported for m <= {_ENUM_SAFE_MAX_M}; "
                "lower the sample count"
            )
        total, _, _ = backend.kernels.exhaustive_ed_sums(
            couts, sums, config.k, config.m, config.initial_carry
        )
        estimate = Fraction(int(total), pair_count)
    else:
        rng = np.random.default_rng(seed)
        a = rng.integers(0, 1 << config.m, size=samples, dtype=np.int64)
        b = rng.integers(0, 1 << config.m, size=samples, dtype=np.int64)
        ed = backend.kernels.pairwise_ed(
            couts, sums, config.k, config.m, config.initial_carry, a, b
        )
        estimate = Fraction(int(ed.sum(dtype=np.int64)), samples)
    abs_error = None if exact_med is None else float(abs(estimate - exact_med))
    return McStats(samples=samples, estimate=float(estimate), abs_error=abs_error)


def mc_error_distribution(
    config: AdderConfig,
    samples: int,
    trials: int,
    seed: int,
    exact_med: Fraction | None = None,
) -> McStats:
    """Distribution of |MC estimate - exact MED| over repeated trials.

    Trial t uses seed ``seed + t``.  The exact MED comes from the histogram
    engine unless supplied.  Needs trials >= 5 for meaningful quartiles.
    """
    if trials < 5:
        raise ValueError("need at least 5 trials for a distribution")
    if exact_med is None:
        exact_med = compute_metrics(config)[1].med
    estimates = []
    errors = []
    for t in range(trials):
        st = mc_estimate(config, samples, seed + t, exact_med=exact_med)
        estimates.append(st.estimate)
        errors.append(st.abs_error)
    mean_est = float(np.mean(estimates))
    q = np.percentile(errors, [0, 25, 50, 75, 100])
    return McStats(
        samples=samples,
        estimate=mean_est,
        abs_error=float(abs(mean_est - float(exact_med))),
        err_min=float(q[0]),
        err_q1=float(q[1]),
        err_median=float(q[2]),
        err_q3=float(q[3]),
        err_max=float(q[4]),
    )
