"""Exact fixed-point arithmetic on the unit circle.

Angles and orbit points are B-bit dyadics m / 2^B in [0, 1), held as plain
Python ints so products alpha * a(n) reduce mod 2^B without any rounding.
Floating point cannot resolve gaps near 1/N^2 against the cancellation in
alpha * a(n) when a(n) is large; everything here stays integer until a
value is explicitly converted for display or window evaluation.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass

from .errors import ConfigError
from .sequences import IntegerSequence

MIN_BITS = 64


@dataclass(frozen=True)
class Dyadic:
    """Exact point (or length) on the circle: value = mantissa / 2^bits.

    Tiny precisions are allowed for hand-checkable cases; experiment
    configs enforce the MIN_BITS floor where gap statistics are at stake.
    """

    mantissa: int
    bits: int

    def __post_init__(self):
        if self.bits < 1:
            raise ConfigError(f"precision must be >= 1 bit, got {self.bits}")
        if not 0 <= self.mantissa < (1 << self.bits):
            raise ConfigError("mantissa outside [0, 2^bits)")

    def as_float(self) -> float:
        return mantissa_to_float(self.mantissa, self.bits)

    def __float__(self) -> float:
        return self.as_float()

    def as_fraction(self):
        from fractions import Fraction

        return Fraction(self.mantissa, 1 << self.bits)

    def hex_str(self) -> str:
        return f"{self.mantissa:x}:{self.bits}"

    @classmethod
    def from_hex(cls, s: str) -> "Dyadic":
        try:
            mant, bits = s.rsplit(":", 1)
            return cls(int(mant, 16), int(bits))
        except (ValueError, TypeError):
            raise ConfigError(f"malformed dyadic literal {s!r}") from None

    def decimal_str(self) -> str:
        """17-significant-digit decimal rendering (display only; hex is exact)."""
        return format(self.as_float(), ".17g")


def mantissa_to_float(mantissa: int, bits: int) -> float:
    """Round mantissa / 2^bits to float without overflowing huge mantissas."""
    if mantissa == 0:
        return 0.0
    shift = max(mantissa.bit_length() - 64, 0)
    return math.ldexp(mantissa >> shift, shift - bits)


def angle_from_rational(p: int, q: int, bits: int) -> Dyadic:
    """Best B-bit approximation of p/q mod 1: mantissa = floor((p mod q) 2^B / q)."""
    if q <= 0:
        raise ConfigError(f"denominator must be positive, got {q}")
    return Dyadic(((p % q) << bits) // q, bits)


def derive_rng(seed: int, index: int) -> random.Random:
    """Independent deterministic stream for sample #index of a seeded run.

    String seeding hashes via sha512 inside random.Random, so streams are
    stable across platforms and do not depend on execution order.
    """
    return random.Random(f"{seed}:{index}")


def sample_angle(rng: random.Random, bits: int) -> Dyadic:
    """Uniform B-bit dyadic angle from the given stream."""
    return Dyadic(rng.getrandbits(bits), bits)


def recommended_bits(max_abs_value: int, n: int) -> int:
    """Precision floor keeping dyadic-alpha truncation far below the 1/N^2 gap scale."""
    value_bits = max(max_abs_value, 1).bit_length()
    return value_bits + 2 * math.ceil(math.log2(max(n, 2))) + 40


def default_bits(seq: IntegerSequence, n: int | None = None) -> int:
    """House defaults: 128 bits for polynomially-growing families, more for huge values."""
    if seq.family in ("monomial", "primes", "squarefree", "naturals"):
        return 128
    return max(seq.max_abs(n or len(seq)), 1).bit_length() + 128


@dataclass(frozen=True)
class Orbit:
    """The exact points alpha * a(n) mod 1 for n = 1..n_points."""

    alpha: Dyadic
    mantissas: tuple[int, ...]
    bits: int
    source: str

    @property
    def n_points(self) -> int:
        return len(self.mantissas)

    def point(self, n: int) -> Dyadic:
        """1-indexed orbit point as an exact dyadic."""
        return Dyadic(self.mantissas[n - 1], self.bits)

    def prefix(self, n: int) -> "Orbit":
        if not 2 <= n <= self.n_points:
            raise ConfigError(f"prefix length {n} outside 2..{self.n_points}")
        return Orbit(self.alpha, self.mantissas[:n], self.bits, self.source)


def orbit(alpha: Dyadic, seq: IntegerSequence, n: int) -> Orbit:
    """Exact orbit: mantissa_k = (alpha.mantissa * a(k)) mod 2^bits, no rounding."""
    if not 2 <= n <= len(seq):
        raise ConfigError(f"orbit length {n} outside 2..{len(seq)}")
    bits = alpha.bits
    rec = recommended_bits(seq.max_abs(n), n)
    if bits < rec:
        warnings.warn(
            f"precision {bits} bits is below the recommended {rec} for "
            f"{seq.label} at N={n}; gap statistics may be truncation-limited",
            stacklevel=2,
        )
    mask = (1 << bits) - 1
    am = alpha.mantissa
    pts = tuple((am * v) & mask for v in seq.values[:n])
    return Orbit(alpha, pts, bits, seq.label)


def circle_distance(x: Dyadic, y: Dyadic) -> Dyadic:
    """Exact distance to the nearest integer of x - y; lands in [0, 1/2]."""
    if x.bits != y.bits:
        raise ConfigError(f"precision mismatch: {x.bits} vs {y.bits} bits")
    modulus = 1 << x.bits
    d = (x.mantissa - y.mantissa) % modulus
    return Dyadic(min(d, modulus - d), x.bits)


@dataclass(frozen=True)
class GapReport:
    """Consecutive circular gaps of an orbit, exact in mantissa units."""

    bits: int
    gaps: tuple[int, ...]  # ascending, in units of 2^-bits; sum is exactly 2^bits
    delta_min: Dyadic
    distinct_gap_count: int
    collision: bool

    @property
    def n_points(self) -> int:
        return len(self.gaps)

    def gap(self, i: int) -> Dyadic:
        return Dyadic(self.gaps[i], self.bits)


def minimal_gap(orb: Orbit) -> GapReport:
    """Sort the points; gaps are the circular neighbor differences incl. wraparound."""
    n = orb.n_points
    if n < 2:
        raise ConfigError("minimal gap needs at least 2 points")
    s = sorted(orb.mantissas)
    modulus = 1 << orb.bits
    gaps = [s[i + 1] - s[i] for i in range(n - 1)]
    gaps.append(s[0] + modulus - s[-1])
    gaps.sort()
    dmin = gaps[0]
    distinct = 1
    for i in range(1, n):
        if gaps[i] != gaps[i - 1]:
            distinct += 1
    return GapReport(
        bits=orb.bits,
        gaps=tuple(gaps),
        delta_min=Dyadic(dmin, orb.bits),
        distinct_gap_count=distinct,
        collision=(dmin == 0),
    )


def distinct_gap_count(orb: Orbit) -> int:
    """Number of distinct exact gap lengths among the consecutive circular gaps."""
    return minimal_gap(orb).distinct_gap_count
