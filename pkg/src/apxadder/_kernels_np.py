"""Pure-numpy hot kernels: the fallback backend when numba is unavailable.

Same signatures and bit-identical results as the jitted versions in
``_kernels``; slot tables arrive as stacked uint8 lookup arrays indexed by
``(cin << 2k) | (a << k) | b``.
"""

from __future__ import annotations

import numpy as np

from .histogram import COUNT_DTYPE, shift_accumulate

# cap on elements touched per vectorized chunk of the pair enumeration
_CHUNK_ELEMS = 1 << 22


def propagate_histogram(cout_tbl, sum_tbl, k, m, initial_carry):
    """Fold all slots; returns (mats[4, 2**m, 2], iterations, row_ops)."""
    ct = cout_tbl.astype(np.int64)
    st = sum_tbl.astype(np.int64)
    mask = (1 << k) - 1
    cur = np.zeros((4, 1, 2), dtype=COUNT_DTYPE)
    cur[(initial_carry << 1) | initial_carry, 0, 0] = 1
    init_pair = (initial_carry << 1) | initial_carry
    iterations = 0
    row_ops = 0
    for i in range(m // k):
        p = i * k
        rows_in = 1 << p
        out = np.zeros((4, 1 << (p + k), 2), dtype=COUNT_DTYPE)
        live = [bool(cur[j].any()) for j in range(4)]
        pairs = (init_pair,) if i == 0 else (0, 1, 2, 3)
        for a in range(1 << k):
            for b in range(1 << k):
                for pair in pairs:
                    iterations += 1
                    if not live[pair]:
                        continue
                    ce, ca = pair >> 1, pair & 1
                    total = a + b + ce
                    idx = (ca << (2 * k)) | (a << k) | b
                    diff = ((total & mask) - int(st[i, idx])) << p
                    target = ((total >> k) << 1) | int(ct[i, idx])
                    shift_accumulate(cur[pair], out[target], diff)
                    row_ops += rows_in
        cur = out
    return cur, iterations, row_ops


def exhaustive_ed_sums(cout_tbl, sum_tbl, k, m, initial_carry):
    """Enumerate all 2**(2m) operand pairs; returns (sum_ed, sum_ed2, nonzero).

    int64 is safe through m=15: sum_ed <= 2**(3m+1), sum_ed2 <= 2**(4m+2).
    """
    ct = cout_tbl.astype(np.int64)
    st = sum_tbl.astype(np.int64)
    n = 1 << m
    mask = (1 << k) - 1
    nslots = m // k
    b_all = np.arange(n, dtype=np.int64)
    chunk = max(1, _CHUNK_ELEMS // n)
    total = total_sq = nonzero = 0
    for a0 in range(0, n, chunk):
        a_col = np.arange(a0, min(a0 + chunk, n), dtype=np.int64)[:, None]
        carry = np.full((a_col.shape[0], n), initial_carry, dtype=np.int64)
        approx = np.zeros((a_col.shape[0], n), dtype=np.int64)
        for s in range(nslots):
            p = s * k
            idx = (carry << (2 * k)) | (((a_col >> p) & mask) << k) | ((b_all >> p) & mask)
            approx |= st[s][idx] << p
            carry = ct[s][idx]
        approx += carry << m
        ed = np.abs(a_col + b_all + initial_carry - approx)
        total += int(ed.sum(dtype=np.int64))
        total_sq += int((ed * ed).sum(dtype=np.int64))
        nonzero += int(np.count_nonzero(ed))
    return total, total_sq, nonzero


def matrix_moment_planes(mat, plane_bits, d_planes, d2_planes):
    """Digit-plane moment sums of one histogram: (s0[2], s1[2,J1], s2[2,J2]).

    s1[c, j] accumulates sum(count * j-th base-2**plane_bits digit of d) for
    column c, likewise s2 for d**2.  With plane_bits <= 62 - 2m nothing
    wraps; the caller reassembles exact integers from the planes.
    """
    rows = mat.shape[0]
    mask = np.uint64((1 << plane_bits) - 1)
    step = np.uint64(plane_bits)
    s0 = mat.sum(axis=0, dtype=COUNT_DTYPE)
    s1 = np.zeros((2, d_planes), dtype=COUNT_DTYPE)
    s2 = np.zeros((2, d2_planes), dtype=COUNT_DTYPE)
    w = np.arange(rows, dtype=COUNT_DTYPE)
    d2 = w * w  # d < 2**28 so d*d < 2**56
    digit = np.empty(rows, dtype=COUNT_DTYPE)
    prod = np.empty(rows, dtype=COUNT_DTYPE)
    for j in range(d_planes):
        np.bitwise_and(w, mask, out=digit)
        for c in (0, 1):
            np.multiply(digit, mat[:, c], out=prod)
            s1[c, j] = prod.sum(dtype=COUNT_DTYPE)
        np.right_shift(w, step, out=w)
    for j in range(d2_planes):
        np.bitwise_and(d2, mask, out=digit)
        for c in (0, 1):
            np.multiply(digit, mat[:, c], out=prod)
            s2[c, j] = prod.sum(dtype=COUNT_DTYPE)
        np.right_shift(d2, step, out=d2)
    return s0, s1, s2


def pairwise_ed(cout_tbl, sum_tbl, k, m, initial_carry, a_vals, b_vals):
    """Error distance for given operand pairs; returns an int64 array."""
    ct = cout_tbl.astype(np.int64)
    st = sum_tbl.astype(np.int64)
    mask = (1 << k) - 1
    carry = np.full(a_vals.shape, initial_carry, dtype=np.int64)
    approx = np.zeros(a_vals.shape, dtype=np.int64)
    for s in range(m // k):
        p = s * k
        idx = (carry << (2 * k)) | (((a_vals >> p) & mask) << k) | ((b_vals >> p) & mask)
        approx |= st[s][idx] << p
        carry = ct[s][idx]
    approx += carry << m
    return np.abs(a_vals + b_vals + initial_carry - approx)
