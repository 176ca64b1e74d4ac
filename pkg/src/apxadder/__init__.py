"""Exact error metrics for approximate LSB adders.

Adders built from chained k-bit sub-adder truth tables are analyzed three
ways: a carry-state histogram engine that computes the mean error distance
(MED), error rate (ER) and mean squared error distance (MSED) exactly in one
pass over the slot chain, an exhaustive enumeration oracle, and a seeded
Monte Carlo baseline.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("apxadder")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .tables import (
    AdderConfig,
    SubAdderTable,
    TableFormatError,
    approx_add,
    demo_config,
    exact_table,
    format_table,
    parse_table,
    random_config,
    random_table,
)
from .histogram import (
    ErrorHistogram,
    MedReport,
    TraceRecord,
    advance_slot,
    compute_metrics,
    er_from_histogram,
    initial_histogram,
    iteration_bound,
    iteration_count,
    matrix_error_total,
    med_from_histogram,
    msed_from_histogram,
    shift_accumulate,
    sum_difference,
)
from .oracle import (
    EXHAUSTIVE_MAX_M,
    McStats,
    exhaustive_metrics,
    mc_error_distribution,
    mc_estimate,
)

__all__ = [
    "__version__",
    "AdderConfig",
    "SubAdderTable",
    "TableFormatError",
    "approx_add",
    "demo_config",
    "exact_table",
    "format_table",
    "parse_table",
    "random_config",
    "random_table",
    "ErrorHistogram",
    "MedReport",
    "TraceRecord",
    "advance_slot",
    "compute_metrics",
    "er_from_histogram",
    "initial_histogram",
    "iteration_bound",
    "iteration_count",
    "matrix_error_total",
    "med_from_histogram",
    "msed_from_histogram",
    "shift_accumulate",
    "sum_difference",
    "EXHAUSTIVE_MAX_M",
    "McStats",
    "exhaustive_metrics",
    "mc_error_distribution",
    "mc_estimate",
    "active_backend",
]


def active_backend() -> str:
    """Name of the kernel backend in use ('numba' or 'numpy')."""
    from . import backend

    return backend.NAME
