"""Difference histograms and additive energy.

The histogram R(v) = #{ordered pairs m != n with a(m) - a(n) = v} is the
shared backbone: additive energy is N^2 + sum_{v != 0} R(v)^2, and the
same key/count arrays feed the GCD sums and the spectral variance later.
Since R(v) = R(-v), only positive keys are stored.

Values that fit comfortably in int64 run through the accelerated kernels;
anything wider (lacunary tails, custom files) falls back to exact Python
counting.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, ResourceGuardError
from .sequences import IntegerSequence

MAX_HISTOGRAM_N = 10**5
MAX_PAIRS_IN_MEMORY = 120_000_000  # ~1 GB of int64 diffs for the kernel path
MAX_BRUTEFORCE_N = 40
INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class DifferenceHistogram:
    """Counts R(v) over positive differences v; the negative side mirrors it."""

    n: int
    keys: tuple[int, ...]  # ascending positive difference values
    counts: tuple[int, ...]

    @property
    def total_pairs(self) -> int:
        return self.n * (self.n - 1)

    @property
    def num_signed_keys(self) -> int:
        return 2 * len(self.keys)

    def count(self, v: int) -> int:
        """R(v) for any nonzero v (0 for differences that never occur)."""
        if v == 0:
            raise ConfigError("R(v) is defined for nonzero v")
        i = np.searchsorted(self.keys, abs(v))
        if i < len(self.keys) and self.keys[i] == abs(v):
            return self.counts[i]
        return 0

    def signed_items(self):
        """Iterate (v, R(v)) over both signs; handy for small exact checks."""
        for k, c in zip(self.keys, self.counts):
            yield -k, c
        for k, c in zip(self.keys, self.counts):
            yield k, c

    def square_sum(self) -> int:
        """sum_{v != 0} R(v)^2, exact."""
        return 2 * sum(c * c for c in self.counts)

    def arrays_int64(self) -> tuple[np.ndarray, np.ndarray]:
        if self.keys and self.keys[-1] >= INT64_SAFE:
            raise ResourceGuardError("histogram keys exceed int64; no kernel path")
        return (
            np.asarray(self.keys, dtype=np.int64),
            np.asarray(self.counts, dtype=np.int64),
        )


def difference_histogram(seq: IntegerSequence, n: int) -> DifferenceHistogram:
    """Exact counts over all ordered pairs of the length-n prefix."""
    if not 2 <= n <= len(seq):
        raise ConfigError(f"prefix length {n} outside 2..{len(seq)}")
    if n > MAX_HISTOGRAM_N:
        raise ResourceGuardError(
            f"difference histogram is O(N^2); N={n} exceeds the {MAX_HISTOGRAM_N} guard, "
            "rerun with a smaller N"
        )
    values = seq.values[:n]
    if max(abs(v) for v in values) < INT64_SAFE // 2:
        pairs = n * (n - 1) // 2
        if pairs > MAX_PAIRS_IN_MEMORY:
            raise ResourceGuardError(
                f"{pairs} pairwise differences exceed the in-memory guard "
                f"({MAX_PAIRS_IN_MEMORY}); rerun with a smaller N"
            )
        keys, counts = _kernels.sorted_pair_diffs(np.asarray(values, dtype=np.int64))
        return DifferenceHistogram(n, tuple(int(k) for k in keys), tuple(int(c) for c in counts))
    # wide values: exact Python pass
    ctr: Counter[int] = Counter()
    svals = sorted(values)
    for i in range(n - 1):
        vi = svals[i]
        for j in range(i + 1, n):
            ctr[svals[j] - vi] += 1
    items = sorted(ctr.items())
    return DifferenceHistogram(n, tuple(k for k, _ in items), tuple(c for _, c in items))


@dataclass(frozen=True)
class EnergyReport:
    n: int
    energy: int
    diag_sum: int  # sum_{v != 0} R(v)^2
    trivial_count: int  # 2 N^2 - N, the Sidon floor

    @property
    def exponent(self) -> float:
        """log E / log N, the scaling diagnostic."""
        import math

        return math.log(self.energy) / math.log(self.n)


def additive_energy(seq: IntegerSequence, n: int) -> EnergyReport:
    """E = #{(n1,n2,n3,n4): a(n1)+a(n2) = a(n3)+a(n4)} via the histogram identity."""
    hist = difference_histogram(seq, n)
    diag = hist.square_sum()
    energy = n * n + diag
    # histogram identity and the universal bounds, asserted on every call
    assert n * n <= energy <= n**3, "energy outside [N^2, N^3]"
    assert energy >= 2 * n * n - n, "energy below the Sidon floor"
    return EnergyReport(n=n, energy=energy, diag_sum=diag, trivial_count=2 * n * n - n)


def additive_energy_bruteforce(seq: IntegerSequence, n: int) -> int:
    """Literal quadruple count: compare every ordered pair sum against every other.

    Independent of the difference-histogram route; guarded to small n.
    """
    if not 2 <= n <= len(seq):
        raise ConfigError(f"prefix length {n} outside 2..{len(seq)}")
    if n > MAX_BRUTEFORCE_N:
        raise ResourceGuardError(
            f"brute-force energy is O(N^4); N={n} exceeds the {MAX_BRUTEFORCE_N} guard"
        )
    values = seq.values[:n]
    if max(abs(v) for v in values) < INT64_SAFE // 2:
        a = np.asarray(values, dtype=np.int64)
        sums = (a[:, None] + a[None, :]).ravel()
        return int(np.sum(sums[:, None] == sums[None, :]))
    sums_list = [x + y for x in values for y in values]
    return sum(1 for s in sums_list for t in sums_list if s == t)


def energy_scan(seq: IntegerSequence, ns: list[int]) -> list[tuple[int, int, float]]:
    """Rows (N, E, log E / log N) for an ascending list of prefix lengths."""
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ConfigError("scan lengths must be strictly ascending")
    rows = []
    for n in ns:
        rep = additive_energy(seq, n)
        rows.append((n, rep.energy, rep.exponent))
    return rows
