"""Hot numeric kernels: numba-jitted with a pure-numpy fallback.

The jitted path is used when numba imports cleanly and the environment
variable MINGAPS_NO_NUMBA is unset (or "0"); otherwise the numpy
implementations take over. Both variants stay importable so
benchmarks/bench_kernels.py can time them side by side.

Everything here works on fixed-width (int64/float64) data. The exact
wide-integer circle arithmetic lives in mingaps.circle and deliberately
stays in pure Python: arbitrary-precision mantissas are outside numba's
domain and are not the hot path at desk scale.
"""

from __future__ import annotations

import math
import os

import numpy as np

ENV_FLAG = "MINGAPS_NO_NUMBA"


def _numba_requested() -> bool:
    if os.environ.get(ENV_FLAG, "").strip() not in ("", "0"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _numba_requested()


# ---------------------------------------------------------------------------
# numpy implementations (always available)
# ---------------------------------------------------------------------------

def prime_flags_numpy(limit: int) -> np.ndarray:
    """Boolean primality table for 0..limit (inclusive)."""
    flags = np.ones(limit + 1, dtype=np.bool_)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


def squarefree_flags_numpy(limit: int) -> np.ndarray:
    """Boolean squarefree table for 0..limit (inclusive); 0 is marked False."""
    flags = np.ones(limit + 1, dtype=np.bool_)
    flags[0] = False
    for d in range(2, math.isqrt(limit) + 1):
        flags[d * d :: d * d] = False
    return flags


def sorted_pair_diffs_numpy(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Run-length encode all positive pairwise differences of distinct int64 values.

    Returns (keys ascending, counts). The caller guards the O(N^2) pair count.
    """
    vals = np.sort(values)
    n = len(vals)
    chunks = []
    for i in range(n - 1):
        chunks.append(vals[i + 1 :] - vals[i])
    diffs = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
    diffs.sort()
    keys, counts = _rle_sorted(diffs)
    return keys, counts


def _rle_sorted(sorted_arr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(sorted_arr) == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    boundaries = np.flatnonzero(np.diff(sorted_arr)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(sorted_arr)]))
    return sorted_arr[starts].copy(), (ends - starts).astype(np.int64)


def gcd_weighted_sum_numpy(keys: np.ndarray, counts: np.ndarray) -> float:
    """sum_{p,q} c_p c_q gcd(k_p,k_q)/sqrt(k_p k_q) over positive keys.

    Uses w_i = c_i / sqrt(k_i) so each term is w_i w_j gcd(k_i, k_j).
    """
    w = counts.astype(np.float64) / np.sqrt(keys.astype(np.float64))
    total = 0.0
    block = max(1, int(4e6) // max(1, len(keys)))
    for s in range(0, len(keys), block):
        e = min(s + block, len(keys))
        g = np.gcd(keys[s:e, None], keys[None, :]).astype(np.float64)
        total += float(w[s:e] @ g @ w)
    return total


def variance_pair_sum_numpy(
    keys: np.ndarray, counts: np.ndarray, fhat: np.ndarray, k_max: int
) -> tuple[float, float]:
    """Double sum over positive difference keys feeding the spectral variance.

    For each key pair (v1, v2) with g = gcd and b_i = v_i/g, accumulates
    counts1*counts2 * sum_{l>=1, l*max(b1,b2)<=k_max} fhat[l*b2]*fhat[l*b1].
    Also returns the envelope tail base sum_{pairs} c1*c2 * t / (b1^2 b2^2)
    where t = 1/(3 L^3) bounds the dropped sum_{l>L} l^-4 (t = zeta(4) when
    no term fit at all).
    """
    zeta4 = math.pi**4 / 90.0
    nkeys = len(keys)
    total = 0.0
    tail_base = 0.0
    for i in range(nkeys):
        vi = int(keys[i])
        ci = float(counts[i])
        for j in range(i, nkeys):
            vj = int(keys[j])
            w = ci * float(counts[j]) * (2.0 if j > i else 1.0)
            g = math.gcd(vi, vj)
            b1 = vi // g
            b2 = vj // g
            lmax = k_max // max(b1, b2)
            if lmax >= 1:
                s = float(np.dot(fhat[b2 : lmax * b2 + 1 : b2], fhat[b1 : lmax * b1 + 1 : b1]))
                total += w * s
                t = 1.0 / (3.0 * float(lmax) ** 3)
            else:
                t = zeta4
            tail_base += w * t / (float(b1) * float(b1) * float(b2) * float(b2))
    return total, tail_base


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if NUMBA_ENABLED:
    from numba import njit

    @njit(cache=True)
    def prime_flags_numba(limit):  # pragma: no cover - timed via public wrapper
        flags = np.ones(limit + 1, dtype=np.bool_)
        flags[0] = False
        flags[1] = False
        p = 2
        while p * p <= limit:
            if flags[p]:
                for q in range(p * p, limit + 1, p):
                    flags[q] = False
            p += 1
        return flags

    @njit(cache=True)
    def squarefree_flags_numba(limit):  # pragma: no cover
        flags = np.ones(limit + 1, dtype=np.bool_)
        flags[0] = False
        d = 2
        while d * d <= limit:
            for q in range(d * d, limit + 1, d * d):
                flags[q] = False
            d += 1
        return flags

    @njit(cache=True)
    def _pair_diffs_numba(vals):  # pragma: no cover
        n = len(vals)
        total = n * (n - 1) // 2
        out = np.empty(total, dtype=np.int64)
        idx = 0
        for i in range(n - 1):
            vi = vals[i]
            for j in range(i + 1, n):
                out[idx] = vals[j] - vi
                idx += 1
        out.sort()
        return out

    @njit(cache=True)
    def _rle_numba(sorted_arr):  # pragma: no cover
        n = len(sorted_arr)
        if n == 0:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        nkeys = 1
        for i in range(1, n):
            if sorted_arr[i] != sorted_arr[i - 1]:
                nkeys += 1
        keys = np.empty(nkeys, dtype=np.int64)
        counts = np.zeros(nkeys, dtype=np.int64)
        k = 0
        keys[0] = sorted_arr[0]
        counts[0] = 1
        for i in range(1, n):
            if sorted_arr[i] != sorted_arr[i - 1]:
                k += 1
                keys[k] = sorted_arr[i]
            counts[k] += 1
        return keys, counts

    def sorted_pair_diffs_numba(values):
        vals = np.sort(values)
        return _rle_numba(_pair_diffs_numba(vals))

    @njit(cache=True)
    def gcd_weighted_sum_numba(keys, counts):  # pragma: no cover
        n = len(keys)
        total = 0.0
        for i in range(n):
            ki = keys[i]
            wi = counts[i] / math.sqrt(ki)
            for j in range(i, n):
                g = math.gcd(ki, keys[j])
                term = wi * (counts[j] / math.sqrt(keys[j])) * g
                if j > i:
                    term *= 2.0
                total += term
        return total

    @njit(cache=True)
    def variance_pair_sum_numba(keys, counts, fhat, k_max):  # pragma: no cover
        zeta4 = math.pi**4 / 90.0
        n = len(keys)
        total = 0.0
        tail_base = 0.0
        for i in range(n):
            vi = keys[i]
            ci = counts[i]
            for j in range(i, n):
                vj = keys[j]
                w = float(ci * counts[j])
                if j > i:
                    w *= 2.0
                g = math.gcd(vi, vj)
                b1 = vi // g
                b2 = vj // g
                bmax = b1 if b1 > b2 else b2
                lmax = k_max // bmax
                if lmax >= 1:
                    s = 0.0
                    for ell in range(1, lmax + 1):
                        s += fhat[ell * b2] * fhat[ell * b1]
                    total += w * s
                    t = 1.0 / (3.0 * float(lmax) ** 3)
                else:
                    t = zeta4
                tail_base += w * t / (float(b1) * float(b1) * float(b2) * float(b2))
        return total, tail_base

    prime_flags = prime_flags_numba
    squarefree_flags = squarefree_flags_numba
    sorted_pair_diffs = sorted_pair_diffs_numba
    gcd_weighted_sum = gcd_weighted_sum_numba
    variance_pair_sum = variance_pair_sum_numba
else:
    prime_flags = prime_flags_numpy
    squarefree_flags = squarefree_flags_numpy
    sorted_pair_diffs = sorted_pair_diffs_numpy
    gcd_weighted_sum = gcd_weighted_sum_numpy
    variance_pair_sum = variance_pair_sum_numpy
