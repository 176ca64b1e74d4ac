"""Numba-jitted hot kernels: the default backend when numba imports.

Mirrors ``_kernels_np`` exactly; both backends must stay bit-identical.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def propagate_histogram(cout_tbl, sum_tbl, k, m, initial_carry):
    """Fold all slots; returns (mats[4, 2**m, 2], iterations, row_ops)."""
    ct = cout_tbl.astype(np.int64)
    st = sum_tbl.astype(np.int64)
    mask = (1 << k) - 1
    init_pair = (initial_carry << 1) | initial_carry
    cur = np.zeros((4, 1, 2), dtype=np.uint64)
    cur[init_pair, 0, 0] = 1
    iterations = 0
    row_ops = 0
    for i in range(m // k):
        p = i * k
        rows_in = 1 << p
        out = np.zeros((4, 1 << (p + k), 2), dtype=np.uint64)
        live = np.zeros(4, dtype=np.bool_)
        for j in range(4):
            for r in range(rows_in):
                if cur[j, r, 0] != 0 or cur[j, r, 1] != 0:
                    live[j] = True
                    break
        for a in range(1 << k):
            for b in range(1 << k):
                for pair in range(4):
                    if i == 0 and pair != init_pair:
                        continue
                    iterations += 1
                    if not live[pair]:
                        continue
                    ce = pair >> 1
                    ca = pair & 1
                    total = a + b + ce
                    idx = (ca << (2 * k)) | (a << k) | b
                    diff = ((total & mask) - st[i, idx]) << p
                    target = ((total >> k) << 1) | ct[i, idx]
                    if diff == 0:
                        for r in range(rows_in):
                            out[target, r, 0] += cur[pair, r, 0]
                            out[target, r, 1] += cur[pair, r, 1]
                    elif diff > 0:
                        # counts keep column 0 when moving away from zero
                        for r in range(rows_in):
                            out[target, diff + r, 0] += cur[pair, r, 0]
                            out[target, diff - r, 0] += cur[pair, r, 1]
                    else:
                        mag = -diff
                        for r in range(rows_in):
                            out[target, mag + r, 1] += cur[pair, r, 1]
                            out[target, mag - r, 1] += cur[pair, r, 0]
                    row_ops += rows_in
        cur = out
    return cur, iterations, row_ops


@njit(cache=True)
def exhaustive_ed_sums(cout_tbl, sum_tbl, k, m, initial_carry):
    """Enumerate all 2**(2m) operand pairs; returns (sum_ed, sum_ed2, nonzero).

    int64 is safe through m=15: sum_ed <= 2**(3m+1), sum_ed2 <= 2**(4m+2).
    """
    ct = cout_tbl.astype(np.int64)
    st = sum_tbl.astype(np.int64)
    n = 1 << m
    mask = (1 << k) - 1
    nslots = m // k
    total = np.int64(0)
    total_sq = np.int64(0)
    nonzero = np.int64(0)
    for a in range(n):
        for b in range(n):
            carry = initial_carry
            approx = 0
            for s in range(nslots):
                p = s * k
                idx = (carry << (2 * k)) | (((a >> p) & mask) << k) | ((b >> p) & mask)
                approx |= st[s, idx] << p
                carry = ct[s, idx]
            approx += carry << m
            ed = a + b + initial_carry - approx
            if ed != 0:
                if ed < 0:
                    ed = -ed
                nonzero += 1
                total += ed
                total_sq += ed * ed
    return total, total_sq, nonzero


@njit(cache=True)
def matrix_moment_planes(mat, plane_bits, d_planes, d2_planes):
    """Digit-plane moment sums of one histogram: (s0[2], s1[2,J1], s2[2,J2]).

    Single pass; with plane_bits <= 62 - 2m every accumulator stays under
    2**62, so uint64 never wraps.
    """
    s0 = np.zeros(2, dtype=np.uint64)
    s1 = np.zeros((2, d_planes), dtype=np.uint64)
    s2 = np.zeros((2, d2_planes), dtype=np.uint64)
    mask = (np.uint64(1) << np.uint64(plane_bits)) - np.uint64(1)
    step = np.uint64(plane_bits)
    zero = np.uint64(0)
    for r in range(mat.shape[0]):
        c0 = mat[r, 0]
        c1 = mat[r, 1]
        if c0 == zero and c1 == zero:
            continue
        d = np.uint64(r)
        d2 = d * d
        for c in range(2):
            cnt = mat[r, c]
            if cnt == zero:
                continue
            s0[c] += cnt
            w = d
            j = 0
            while w != zero:
                s1[c, j] += cnt * (w & mask)
                w >>= step
                j += 1
            w = d2
            j = 0
            while w != zero:
                s2[c, j] += cnt * (w & mask)
                w >>= step
                j += 1
    return s0, s1, s2


@njit(cache=True)
def pairwise_ed(cout_tbl, sum_tbl, k, m, initial_carry, a_vals, b_vals):
    """Error distance for given operand pairs; returns an int64 array."""
    ct = cout_tbl.astype(np.int64)
    st = sum_tbl.astype(np.int64)
    mask = (1 << k) - 1
    nslots = m // k
    out = np.empty(a_vals.shape[0], dtype=np.int64)
    for i in range(a_vals.shape[0]):
        a = a_vals[i]
        b = b_vals[i]
        carry = initial_carry
        approx = 0
        for s in range(nslots):
            p = s * k
            idx = (carry << (2 * k)) | (((a >> p) & mask) << k) | ((b >> p) & mask)
            approx |= st[s, idx] << p
            carry = ct[s, idx]
        approx += carry << m
        ed = a + b + initial_carry - approx
        out[i] = ed if ed >= 0 else -ed
    return out
