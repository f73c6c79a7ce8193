"""The smoothed pair-counting statistic and its moment theory.

D(N, M)(alpha) sums the periodized window F_M over all ordered pairs of
orbit points, so it counts pairs at circle distance below 1/(2M) with a
smooth weight. Its mean over alpha is N(N-1)/M exactly; its variance is
controlled by a GCD-weighted double sum over the difference histogram,
which this module evaluates both by Monte Carlo and by the exact
(truncated) spectral formula:

    Var D = sum_{v1,v2 != 0} sum_{k1,k2 != 0} c(k1) c(k2) R(v1) R(v2)
            [k1 v1 = k2 v2],         c(k) = fhat(k/M) / M.

The resonance constraint k1 v1 = k2 v2 is solved exactly by
(k1, k2) = l (v2/g, v1/g), g = gcd(|v1|, |v2|), l != 0; evenness of fhat
collapses the four sign combinations of (v1, v2) onto positive keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .circle import Dyadic, Orbit, derive_rng, orbit, sample_angle
from .energy import DifferenceHistogram, additive_energy, difference_histogram
from .errors import ConfigError, ResourceGuardError
from .sequences import IntegerSequence
from .window import Window

MAX_FOURIER_N = 64
MAX_GCD_KEYS = 50_000
DEFAULT_KMAX_FACTOR = 200  # fhat ~ y^-2 leaves a ~1/200 relative tail
TAIL_WARN_FRACTION = 0.01


@dataclass(frozen=True)
class PairCountResult:
    value: float
    n: int
    m: int
    alpha: Dyadic
    window: str
    contributing_pairs: int  # ordered pairs that contributed a positive term


def smoothed_pair_count(
    seq: IntegerSequence, n: int, m: int, alpha: Dyadic, w: Window
) -> PairCountResult:
    """Exact-support evaluation of D(n, m)(alpha).

    Sorts the orbit once, then a circular forward sweep enumerates exactly
    the unordered pairs at circle distance < 1/(2m); each contributes the
    window value twice (both orderings). Summation uses math.fsum so the
    result is independent of enumeration order.
    """
    return pair_count_of_orbit(orbit(alpha, seq, n), m, w)


def pair_count_of_orbit(orb: Orbit, m: int, w: Window) -> PairCountResult:
    """Same statistic evaluated on an existing orbit (or orbit prefix)."""
    if m < 1:
        raise ConfigError(f"scale m must be >= 1, got {m}")
    s = sorted(orb.mantissas)
    alpha, n, bits = orb.alpha, orb.n_points, orb.bits
    modulus = 1 << bits
    # pair at forward arc d contributes iff m*d/2^bits < 1/2, i.e. 2*m*d < 2^bits
    limit = modulus
    two_m = 2 * m
    arcs: list[int] = []
    npts = len(s)
    for i in range(npts):
        si = s[i]
        for step in range(1, npts):
            j = i + step
            arc = s[j] - si if j < npts else s[j - npts] + modulus - si
            if two_m * arc >= limit:
                break
            arcs.append(arc)
    if not arcs:
        return PairCountResult(0.0, n, m, alpha, w.kind, 0)
    xs = np.array([m * _arc_to_float(a, bits) for a in arcs], dtype=float)
    terms = w.value(xs)
    positive = int(np.count_nonzero(terms > 0.0))
    value = 2.0 * math.fsum(terms.tolist())
    return PairCountResult(value, n, m, alpha, w.kind, 2 * positive)


def _arc_to_float(arc: int, bits: int) -> float:
    if arc == 0:
        return 0.0
    shift = max(arc.bit_length() - 64, 0)
    return math.ldexp(arc >> shift, shift - bits)


def pair_correlation(seq: IntegerSequence, n: int, alpha: Dyadic, w: Window) -> float:
    """Gap statistic at the mean-spacing scale: D(n, n)(alpha) / n."""
    return smoothed_pair_count(seq, n, n, alpha, w).value / n


# ---------------------------------------------------------------------------
# Monte Carlo moments
# ---------------------------------------------------------------------------


@dataclass
class VarianceReport:
    mc_mean: float
    mc_variance: float
    mc_stderr: float  # standard error of the mean
    samples: int
    mc_variance_stderr: float | None = None  # via batching
    fourier_variance: float | None = None
    truncation_k: int | None = None
    bound_rhs: float | None = None  # (1/m) N^eps E, reporting only
    bound_epsilon: float | None = None


def sample_pair_counts(
    seq: IntegerSequence,
    n: int,
    m: int,
    w: Window,
    samples: int,
    seed: int,
    bits: int = 128,
) -> np.ndarray:
    """D values over independent uniform dyadic angles; deterministic per (seed, index)."""
    if samples < 2:
        raise ConfigError(f"need at least 2 samples, got {samples}")
    out = np.empty(samples, dtype=float)
    for i in range(samples):
        alpha = sample_angle(derive_rng(seed, i), bits)
        out[i] = smoothed_pair_count(seq, n, m, alpha, w).value
    return out


def mc_report(
    seq: IntegerSequence,
    n: int,
    m: int,
    w: Window,
    samples: int,
    seed: int,
    bits: int = 128,
    var_batches: int = 25,
    epsilon: float = 0.1,
    with_bound: bool = True,
) -> VarianceReport:
    """Mean/variance of D over sampled angles, with batched stderr of the variance."""
    values = sample_pair_counts(seq, n, m, w, samples, seed, bits)
    mean = float(np.mean(values))
    var = float(np.var(values, ddof=1))
    stderr = math.sqrt(var / samples)
    var_se = None
    if samples >= 2 * var_batches:
        per_batch = samples // var_batches
        batched = values[: per_batch * var_batches].reshape(var_batches, per_batch)
        bvars = np.var(batched, axis=1, ddof=1)
        var_se = float(np.std(bvars, ddof=1) / math.sqrt(var_batches))
    rhs = None
    if with_bound:
        rhs = additive_energy(seq, n).energy * n**epsilon / m
    return VarianceReport(
        mc_mean=mean,
        mc_variance=var,
        mc_stderr=stderr,
        samples=samples,
        mc_variance_stderr=var_se,
        bound_rhs=rhs,
        bound_epsilon=epsilon if with_bound else None,
    )


# ---------------------------------------------------------------------------
# Exact spectral variance and GCD machinery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FourierVariance:
    value: float
    k_max: int
    tail_estimate: float  # envelope bound on the discarded |k| > k_max mass
    tail_fraction: float
    truncated: bool  # True when the tail estimate exceeds the 1% policy

    def __float__(self) -> float:
        return self.value


def fourier_variance(
    seq: IntegerSequence, n: int, m: int, w: Window, k_max: int | None = None
) -> FourierVariance:
    """Truncated exact evaluation of the spectral variance formula."""
    if n > MAX_FOURIER_N:
        raise ResourceGuardError(
            f"spectral variance is O(V^2 L); N={n} exceeds the {MAX_FOURIER_N} guard"
        )
    if k_max is None:
        k_max = DEFAULT_KMAX_FACTOR * m
    if k_max < 16 * m:
        raise ConfigError(f"k_max={k_max} below the 16*m floor for scale m={m}")
    hist = difference_histogram(seq, n)
    keys, counts = hist.arrays_int64()
    fhat = w.fourier_table(m, k_max)
    total, tail_base = _kernels.variance_pair_sum(keys, counts, fhat, int(k_max))
    scale = 8.0 / (m * m)
    value = scale * total
    # |fhat(y)| <= A/y^2 with y = l b / m turns the discarded l-tail into
    # A^2 m^4 / (b1 b2)^2 * sum_{l > L} l^-4; the kernel already folded in
    # the per-pair l-tail factor
    tail = scale * (w.envelope**2) * (float(m) ** 4) * tail_base
    frac = tail / abs(value) if value != 0.0 else math.inf
    return FourierVariance(
        value=value,
        k_max=int(k_max),
        tail_estimate=tail,
        tail_fraction=frac,
        truncated=frac > TAIL_WARN_FRACTION,
    )


def gcd_sum(hist: DifferenceHistogram) -> float:
    """sum over signed key pairs of R(v1) R(v2) gcd(|v1|,|v2|) / sqrt(|v1 v2|)."""
    if len(hist.keys) > MAX_GCD_KEYS:
        raise ResourceGuardError(
            f"gcd sum is O(V^2); {len(hist.keys)} distinct differences exceed "
            f"the {MAX_GCD_KEYS} guard"
        )
    try:
        keys, counts = hist.arrays_int64()
    except ResourceGuardError:
        return 4.0 * _gcd_weighted_sum_bigint(hist.keys, hist.counts)
    # signs contribute a flat factor of 4: R(v) = R(-v) and the term
    # depends only on |v1|, |v2|
    return 4.0 * float(_kernels.gcd_weighted_sum(keys, counts))


def _gcd_weighted_sum_bigint(keys, counts) -> float:
    # keys can exceed float range, so gcd/sqrt ratios go through log space;
    # diagonal terms are exactly c^2 and stay exact
    logs = [math.log(k) for k in keys]
    total = 0.0
    for i, ki in enumerate(keys):
        ci = counts[i]
        total += float(ci * ci)
        for j in range(i + 1, len(keys)):
            g = math.gcd(ki, keys[j])
            ratio = math.exp(math.log(g) - 0.5 * (logs[i] + logs[j]))
            total += 2.0 * ci * counts[j] * ratio
    return total


def kernel_bound_check(
    v1: int, v2: int, m: int, w: Window, k_max: int | None = None
) -> tuple[float, float]:
    """Truncated resonance-kernel sum against its GCD bound.

    Returns (lhs, rhs): lhs = sum_{k1 v1 = k2 v2, 0 < |k_i| <= k_max}
    c(k1) c(k2); rhs = (1/m) gcd(|v1|,|v2|)/sqrt(|v1 v2|). Callers assert
    lhs <= C_w * rhs with the window's frozen kernel constant.
    """
    if v1 == 0 or v2 == 0:
        raise ConfigError("kernel check needs nonzero v1, v2")
    if k_max is None:
        k_max = DEFAULT_KMAX_FACTOR * m
    g = math.gcd(abs(v1), abs(v2))
    b1 = abs(v1) // g
    b2 = abs(v2) // g
    lmax = k_max // max(b1, b2)
    lhs = 0.0
    if lmax >= 1:
        fhat = w.fourier_table(m, int(k_max))
        ls = np.arange(1, lmax + 1)
        lhs = 2.0 * float(np.dot(fhat[ls * b2], fhat[ls * b1])) / (m * m)
    rhs = g / (m * math.sqrt(abs(v1) * abs(v2)))
    return lhs, rhs
