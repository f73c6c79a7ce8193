"""Integer sequence families whose fractional-part orbits get studied.

All values are Python ints (arbitrary precision): the lacunary family
overflows any fixed width, and the circle arithmetic downstream needs
exact products. Sequences are materialized eagerly and immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import ConfigError

MAX_MONOMIAL_DEGREE = 16
MAX_LACUNARY_LENGTH = 4096
MAX_SIEVED_LENGTH = 10**7

FAMILIES = ("monomial", "lacunary", "primes", "squarefree", "naturals", "custom")


@dataclass(frozen=True)
class IntegerSequence:
    """A finite list of pairwise-distinct integers a(1..N), 1-indexed via a()."""

    label: str
    values: tuple[int, ...]
    family: str
    param: int | None = None
    _skip_check: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown sequence family {self.family!r}")
        if len(self.values) < 2:
            raise ConfigError("sequence must have at least 2 values")
        if not self._skip_check:
            _check_distinct(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def a(self, n: int) -> int:
        """1-indexed access: a(1) is the first value."""
        if not 1 <= n <= len(self.values):
            raise ConfigError(f"index {n} outside 1..{len(self.values)}")
        return self.values[n - 1]

    def max_abs(self, n: int | None = None) -> int:
        vals = self.values if n is None else self.values[:n]
        return max(abs(v) for v in vals)

    @property
    def params_str(self) -> str:
        if self.family == "monomial":
            return f"d={self.param}"
        if self.family == "lacunary":
            return f"q={self.param}"
        return ""

    @property
    def spec_str(self) -> str:
        return f"{self.family}:{self.params_str}" if self.params_str else self.family


def _check_distinct(values) -> None:
    # sort-and-scan; generated families are increasing so the sort is cheap
    prev = None
    increasing = True
    for v in values:
        if prev is not None and v <= prev:
            increasing = False
            break
        prev = v
    if increasing:
        return
    ordered = sorted(values)
    for i in range(1, len(ordered)):
        if ordered[i] == ordered[i - 1]:
            raise ConfigError(f"duplicate value {ordered[i]} in sequence")


def generate_monomial(d: int, n: int) -> IntegerSequence:
    """a(k) = k^d for k = 1..n."""
    if not 1 <= d <= MAX_MONOMIAL_DEGREE:
        raise ConfigError(f"monomial degree must be in 1..{MAX_MONOMIAL_DEGREE}, got {d}")
    if n < 2:
        raise ConfigError(f"sequence length must be >= 2, got {n}")
    values = tuple(k**d for k in range(1, n + 1))
    return IntegerSequence(f"monomial:d={d}", values, "monomial", d, _skip_check=True)


def generate_lacunary(q: int, n: int) -> IntegerSequence:
    """a(k) = q^k for k = 1..n."""
    if q < 2:
        raise ConfigError(f"lacunary base must be >= 2, got {q}")
    if not 2 <= n <= MAX_LACUNARY_LENGTH:
        raise ConfigError(f"lacunary length must be in 2..{MAX_LACUNARY_LENGTH}, got {n}")
    values = []
    acc = 1
    for _ in range(n):
        acc *= q
        values.append(acc)
    return IntegerSequence(f"lacunary:q={q}", tuple(values), "lacunary", q, _skip_check=True)


def generate_naturals(n: int) -> IntegerSequence:
    """a(k) = k."""
    if n < 2:
        raise ConfigError(f"sequence length must be >= 2, got {n}")
    return IntegerSequence("naturals", tuple(range(1, n + 1)), "naturals", _skip_check=True)


def generate_primes(n: int) -> IntegerSequence:
    """First n primes, sieved with the p_n ~ n log n bound and regrown if short."""
    if not 2 <= n <= MAX_SIEVED_LENGTH:
        raise ConfigError(f"prime count must be in 2..{MAX_SIEVED_LENGTH}, got {n}")
    # Rosser-style upper bound with margin; regrow loop covers tiny n too.
    limit = 64 + int(1.2 * n * (math.log(max(n, 2)) + math.log(math.log(max(n, 3)))))
    while True:
        flags = _kernels.prime_flags(limit)
        primes = np.flatnonzero(flags)
        if len(primes) >= n:
            break
        limit *= 2
    values = tuple(int(p) for p in primes[:n])
    return IntegerSequence("primes", values, "primes", _skip_check=True)


def generate_squarefree(n: int) -> IntegerSequence:
    """First n squarefree positive integers (1 included)."""
    if not 2 <= n <= MAX_SIEVED_LENGTH:
        raise ConfigError(f"squarefree count must be in 2..{MAX_SIEVED_LENGTH}, got {n}")
    # density 6/pi^2 ~ 0.6079, so ~1.645 n with margin
    limit = 64 + int(1.8 * n)
    while True:
        flags = _kernels.squarefree_flags(limit)
        sf = np.flatnonzero(flags)
        if len(sf) >= n:
            break
        limit *= 2
    values = tuple(int(v) for v in sf[:n])
    return IntegerSequence("squarefree", values, "squarefree", _skip_check=True)


def load_sequence(path) -> IntegerSequence:
    """Read a sequence file: one decimal integer per line, '#' comments ignored."""
    p = Path(path)
    values: list[int] = []
    seen: dict[int, int] = {}
    with p.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                v = int(line)
            except ValueError:
                raise ConfigError(f"{p.name}: parse error at line {lineno}: {line!r}") from None
            if v in seen:
                raise ConfigError(
                    f"{p.name}: duplicate value {v} at line {lineno} (first seen at line {seen[v]})"
                )
            seen[v] = lineno
            values.append(v)
    if len(values) < 2:
        raise ConfigError(f"{p.name}: need at least 2 values, got {len(values)}")
    return IntegerSequence(f"file:{p.name}", tuple(values), "custom", _skip_check=True)


def write_sequence(seq: IntegerSequence, path) -> None:
    """Emit a sequence file readable by load_sequence."""
    p = Path(path)
    with p.open("w", encoding="utf-8") as fh:
        fh.write(f"# {seq.label} length={len(seq)}\n")
        for v in seq.values:
            fh.write(f"{v}\n")


def from_spec(spec: str, n: int) -> IntegerSequence:
    """Build a sequence from a CLI-style spec string.

    Accepted forms: monomial:d=2, lacunary:q=2, primes, squarefree,
    naturals, file:PATH (n is ignored for file: beyond a length check).
    """
    name, _, arg = spec.partition(":")
    if name == "monomial":
        return generate_monomial(_parse_param(arg, "d"), n)
    if name == "lacunary":
        return generate_lacunary(_parse_param(arg, "q"), n)
    if name == "primes":
        return generate_primes(n)
    if name == "squarefree":
        return generate_squarefree(n)
    if name == "naturals":
        return generate_naturals(n)
    if name == "file":
        seq = load_sequence(arg)
        if n > len(seq):
            raise ConfigError(f"requested N={n} but {arg} holds only {len(seq)} values")
        return seq
    raise ConfigError(f"unknown sequence spec {spec!r}")


def _parse_param(arg: str, key: str) -> int:
    k, _, v = arg.partition("=")
    if k != key or not v:
        raise ConfigError(f"expected {key}=<int>, got {arg!r}")
    try:
        return int(v)
    except ValueError:
        raise ConfigError(f"expected {key}=<int>, got {arg!r}") from None
