"""Truth-table models for k-bit sub-adders and chained approximate adders.

An approximate adder is described by its lower m bits: a chain of m/k
sub-adder slots, each a complete truth table mapping (cin, a, b) to
(cout, sum) for k-bit operands.  The upper n-m bits are assumed exact and
never enter the error computation.  Tables are stored as flat byte strings
indexed by ``(cin << 2k) | (a << k) | b`` so they stay immutable, hashable
and cheap to hand to the numeric kernels.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TableFormatError",
    "SubAdderTable",
    "AdderConfig",
    "exact_table",
    "random_table",
    "random_config",
    "parse_table",
    "format_table",
    "approx_add",
    "demo_config",
    "DEMO_LSB_TT",
    "DEMO_MSB_TT",
]

# Histograms take 4 * 2**m * 2 uint64 counters; m=28 is already 18 GiB.
MAX_WIDTH = 28


class TableFormatError(ValueError):
    """Raised when .tt text violates the truth-table grammar."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def _row_index(width: int, cin: int, a: int, b: int) -> int:
    return (cin << (2 * width)) | (a << width) | b


@dataclass(frozen=True)
class SubAdderTable:
    """Complete (cin, a, b) -> (cout, sum) mapping of one k-bit adder slot.

    :param width: operand width k in bits.
    :param couts: carry-out per row, one byte per (cin, a, b) combination.
    :param sums: sum output per row, same indexing as ``couts``.
    """

    width: int
    couts: bytes
    sums: bytes

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("sub-adder width must be >= 1")
        rows = 1 << (2 * self.width + 1)
        if len(self.couts) != rows or len(self.sums) != rows:
            raise ValueError(
                f"width {self.width} needs {rows} output entries, "
                f"got {len(self.couts)}/{len(self.sums)}"
            )
        if any(c > 1 for c in self.couts):
            raise ValueError("carry-out values must be 0 or 1")
        top = 1 << self.width
        if any(s >= top for s in self.sums):
            raise ValueError(f"sum outputs must be < {top}")

    def evaluate(self, cin: int, a: int, b: int) -> tuple[int, int]:
        """Look up one row; returns (cout, sum)."""
        top = 1 << self.width
        if cin not in (0, 1) or not (0 <= a < top) or not (0 <= b < top):
            raise ValueError(f"inputs ({cin},{a},{b}) out of range for width {self.width}")
        idx = _row_index(self.width, cin, a, b)
        return self.couts[idx], self.sums[idx]

    @property
    def is_exact(self) -> bool:
        """True when every row equals true binary addition a + b + cin."""
        couts, sums = self.output_arrays()
        idx = np.arange(len(self.couts))
        mask = (1 << self.width) - 1
        cin = idx >> (2 * self.width)
        a = (idx >> self.width) & mask
        b = idx & mask
        total = a + b + cin
        return bool(
            np.array_equal(couts, total >> self.width)
            and np.array_equal(sums, total & mask)
        )

    def output_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Zero-copy uint8 views (couts, sums) for the kernels."""
        return (
            np.frombuffer(self.couts, dtype=np.uint8),
            np.frombuffer(self.sums, dtype=np.uint8),
        )


@functools.lru_cache(maxsize=None)
def exact_table(width: int) -> SubAdderTable:
    """The correct k-bit full adder as a truth table."""
    if width < 1:
        raise ValueError("sub-adder width must be >= 1")
    idx = np.arange(1 << (2 * width + 1))
    mask = (1 << width) - 1
    total = ((idx >> width) & mask) + (idx & mask) + (idx >> (2 * width))
    return SubAdderTable(
        width,
        bytes((total >> width).astype(np.uint8)),
        bytes((total & mask).astype(np.uint8)),
    )


def random_table(width: int, seed: int) -> SubAdderTable:
    """Uniformly random table; identical seeds give identical tables."""
    rng = np.random.default_rng(seed)
    vals = rng.integers(0, 1 << (width + 1), size=1 << (2 * width + 1))
    mask = (1 << width) - 1
    return SubAdderTable(
        width,
        bytes((vals >> width).astype(np.uint8)),
        bytes((vals & mask).astype(np.uint8)),
    )


def _slot_seeds(seed: int, count: int) -> list[int]:
    rng = np.random.default_rng(seed)
    return [int(s) for s in rng.integers(0, 2**63, size=count)]


@dataclass(frozen=True)
class AdderConfig:
    """An n-bit adder whose lower m bits come from chained sub-adder slots.

    :param n: total adder width; bits above m are exact.
    :param m: approximated width, a multiple of k.
    :param k: sub-adder operand width.
    :param slots: m//k tables, index 0 = least significant.
    :param sign_mode: +1 for unsigned operands, -1 for two's complement.
    :param initial_carry: carry fed into slot 0 of both the exact and the
        approximate chain.
    """

    n: int
    m: int
    k: int
    slots: tuple[SubAdderTable, ...]
    sign_mode: int = 1
    initial_carry: int = 0

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.m < 1 or self.m > self.n:
            raise ValueError("need 1 <= m <= n")
        if self.m > MAX_WIDTH:
            raise ValueError(f"m is capped at {MAX_WIDTH} (dense histograms)")
        if self.m % self.k:
            raise ValueError("k must divide m")
        if len(self.slots) != self.m // self.k:
            raise ValueError(f"expected {self.m // self.k} slot tables, got {len(self.slots)}")
        for i, t in enumerate(self.slots):
            if not isinstance(t, SubAdderTable):
                raise ValueError(f"slot {i} is not a SubAdderTable")
            if t.width != self.k:
                raise ValueError(f"slot {i} has width {t.width}, expected {self.k}")
        if self.sign_mode not in (1, -1):
            raise ValueError("sign_mode must be +1 or -1")
        if self.initial_carry not in (0, 1):
            raise ValueError("initial_carry must be 0 or 1")

    @property
    def slot_count(self) -> int:
        return self.m // self.k

    def slot_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Stacked uint8 lookup arrays (couts, sums), one row per slot."""
        couts = np.stack([t.output_arrays()[0] for t in self.slots])
        sums = np.stack([t.output_arrays()[1] for t in self.slots])
        return couts, sums


def random_config(
    m: int,
    k: int,
    seed: int,
    *,
    n: int | None = None,
    sign_mode: int = 1,
    initial_carry: int = 0,
) -> AdderConfig:
    """Adder with independently random slots, reproducible from one seed."""
    if k < 1 or m % k:
        raise ValueError("k must divide m")
    slots = tuple(random_table(k, s) for s in _slot_seeds(seed, m // k))
    return AdderConfig(n or m, m, k, slots, sign_mode, initial_carry)


def approx_add(config: AdderConfig, a_value: int, b_value: int) -> tuple[int, int]:
    """Run the slot chain on m-bit operands; returns (carry_out, sum_value)."""
    top = 1 << config.m
    if not (0 <= a_value < top) or not (0 <= b_value < top):
        raise ValueError(f"operands must be in [0, {top})")
    mask = (1 << config.k) - 1
    carry = config.initial_carry
    total = 0
    for i, table in enumerate(config.slots):
        p = i * config.k
        carry, s = table.evaluate(carry, (a_value >> p) & mask, (b_value >> p) & mask)
        total |= s << p
    return carry, total


# --- .tt text format ------------------------------------------------------
#
#   # comment
#   k=<int>
#   <cin> <a> <b> : <cout> <s>     one row per line, binary fields, MSB first
#
# All 2**(2k+1) rows must be present exactly once; serialization emits them
# in ascending (cin, a, b) order so equal tables produce equal bytes.


def _parse_bits(token: str, width: int, name: str, line: int) -> int:
    if len(token) != width or any(c not in "01" for c in token):
        raise TableFormatError(
            f"field {name} must be {width} binary digit(s), got {token!r}", line
        )
    return int(token, 2)


def parse_table(text: str) -> SubAdderTable:
    """Parse .tt text; raises :class:`TableFormatError` with a line number."""
    width = None
    couts = sums = seen = None
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if width is None:
            if not line.startswith("k=") :
                raise TableFormatError("expected header 'k=<int>'", ln)
            try:
                width = int(line[2:])
            except ValueError:
                raise TableFormatError(f"bad width {line[2:]!r}", ln) from None
            if width < 1:
                raise TableFormatError("width must be >= 1", ln)
            rows = 1 << (2 * width + 1)
            couts, sums, seen = bytearray(rows), bytearray(rows), bytearray(rows)
            continue
        tok = line.split()
        if len(tok) != 6 or tok[3] != ":":
            raise TableFormatError("expected '<cin> <a> <b> : <cout> <s>'", ln)
        cin = _parse_bits(tok[0], 1, "cin", ln)
        a = _parse_bits(tok[1], width, "a", ln)
        b = _parse_bits(tok[2], width, "b", ln)
        cout = _parse_bits(tok[4], 1, "cout", ln)
        s = _parse_bits(tok[5], width, "s", ln)
        idx = _row_index(width, cin, a, b)
        if seen[idx]:
            raise TableFormatError(f"duplicate row ({cin},{a},{b})", ln)
        seen[idx] = 1
        couts[idx] = cout
        sums[idx] = s
    if width is None:
        raise TableFormatError("missing 'k=<int>' header")
    if not all(seen):
        idx = seen.index(0)
        mask = (1 << width) - 1
        raise TableFormatError(
            f"missing row ({idx >> (2 * width)},{(idx >> width) & mask},{idx & mask})"
        )
    return SubAdderTable(width, bytes(couts), bytes(sums))


def format_table(table: SubAdderTable) -> str:
    """Canonical .tt text; byte-stable round trip with :func:`parse_table`."""
    w = table.width
    lines = [f"k={w}"]
    for cin in (0, 1):
        for a in range(1 << w):
            for b in range(1 << w):
                cout, s = table.evaluate(cin, a, b)
                lines.append(f"{cin} {a:0{w}b} {b:0{w}b} : {cout} {s:0{w}b}")
    return "\n".join(lines) + "\n"


# Bundled 2-bit demonstration adder (k=1): an approximate half-adder cell in
# the low slot and an approximate full-adder cell in the high slot.  The
# cin=1 rows of the low slot follow the exact full adder; they are
# unreachable when the chain starts with carry-in 0.

DEMO_LSB_TT = """\
k=1
0 0 0 : 0 0
0 0 1 : 1 0
0 1 0 : 0 1
0 1 1 : 1 1
1 0 0 : 0 1
1 0 1 : 1 0
1 1 0 : 1 0
1 1 1 : 1 1
"""

DEMO_MSB_TT = """\
k=1
0 0 0 : 0 0
0 0 1 : 0 1
0 1 0 : 1 1
0 1 1 : 1 1
1 0 0 : 0 1
1 0 1 : 1 0
1 1 0 : 1 1
1 1 1 : 1 0
"""


@functools.lru_cache(maxsize=None)
def demo_config(n: int = 2) -> AdderConfig:
    """The bundled m=2, k=1 demonstration adder."""
    return AdderConfig(n, 2, 1, (parse_table(DEMO_LSB_TT), parse_table(DEMO_MSB_TT)))
