import math
import random

import numpy as np
import pytest
from scipy.integrate import quad

from mingaps import (
    ConfigError,
    Dyadic,
    ResourceGuardError,
    angle_from_rational,
    derive_rng,
    difference_histogram,
    fourier_variance,
    gcd_sum,
    generate_lacunary,
    generate_monomial,
    generate_naturals,
    get_window,
    kernel_bound_check,
    mc_report,
    minimal_gap,
    orbit,
    pair_correlation,
    pair_count_of_orbit,
    sample_angle,
    sample_pair_counts,
    smoothed_pair_count,
)
from mingaps.sequences import IntegerSequence

TRI = get_window("triangle")
BUMP = get_window("bump")


def brute_pair_count(orb, m, w):
    """Literal double sum over ordered pairs via the periodized window."""
    mod = 1 << orb.bits
    total = 0.0
    for i, a in enumerate(orb.mantissas):
        for j, b in enumerate(orb.mantissas):
            if i == j:
                continue
            total += w.periodized(m, ((a - b) % mod) / mod)
    return total


def test_far_pair_is_zero():
    seq = IntegerSequence("pair", (1, 3), "custom")
    alpha = angle_from_rational(1, 5, 64)  # points at 0.2 and 0.6, distance 0.4
    res = smoothed_pair_count(seq, 2, 10, alpha, TRI)
    assert res.value == 0.0
    assert res.contributing_pairs == 0


def test_duplicated_point_contributes_peak_value():
    # alpha = 1/2 on naturals duplicates points; each coincident ordered pair
    # contributes F_M(0) = f(0) = 2
    res = smoothed_pair_count(generate_naturals(4), 4, 100, angle_from_rational(1, 2, 64), TRI)
    assert res.value >= 4.0


def test_sweep_matches_literal_double_sum():
    seq = generate_monomial(2, 100)
    for trial, m in ((0, 7), (1, 50), (2, 311), (3, 1)):
        alpha = sample_angle(derive_rng(1234, trial), 128)
        orb = orbit(alpha, seq, 100)
        res = pair_count_of_orbit(orb, m, TRI)
        brute = brute_pair_count(orb, m, TRI)
        assert res.value == pytest.approx(brute, rel=1e-9)


def test_sweep_matches_literal_double_sum_bump():
    seq = generate_monomial(3, 60)
    alpha = sample_angle(derive_rng(77, 0), 128)
    orb = orbit(alpha, seq, 60)
    assert pair_count_of_orbit(orb, 40, BUMP).value == pytest.approx(
        brute_pair_count(orb, 40, BUMP), rel=1e-9
    )


def test_value_zero_iff_no_contributing_pairs():
    rng = random.Random(8)
    seq = generate_monomial(2, 30)
    for i in range(20):
        alpha = sample_angle(derive_rng(31, i), 128)
        res = smoothed_pair_count(seq, 30, rng.choice([10, 100, 10_000]), alpha, TRI)
        assert (res.value == 0.0) == (res.contributing_pairs == 0)


def test_scale_guard():
    with pytest.raises(ConfigError):
        smoothed_pair_count(generate_naturals(4), 4, 0, angle_from_rational(1, 3, 64), TRI)


def test_pair_correlation_definition_and_far_pair():
    seq = IntegerSequence("pair", (1, 3), "custom")
    alpha = angle_from_rational(1, 5, 64)
    assert pair_correlation(seq, 2, alpha, TRI) == 0.0
    seq2 = generate_monomial(2, 64)
    alpha2 = sample_angle(derive_rng(4, 4), 128)
    d = smoothed_pair_count(seq2, 64, 64, alpha2, TRI)
    assert pair_correlation(seq2, 64, alpha2, TRI) == d.value / 64


def test_pair_correlation_poissonian_mean():
    # quadratic orbits have Poissonian pair correlation: values near 1
    seq = generate_monomial(2, 1000)
    vals = [
        pair_correlation(seq, 1000, sample_angle(derive_rng(6, i), 128), TRI)
        for i in range(100)
    ]
    assert abs(float(np.mean(vals)) - 1.0) < 0.15


def test_mc_mean_small_exact_case():
    # N=2 with difference 1: exact mean of D is 2/M
    seq = IntegerSequence("pair01", (0, 1), "custom")
    rep = mc_report(seq, 2, 8, TRI, samples=4000, seed=3, bits=96, with_bound=False)
    assert abs(rep.mc_mean - 2.0 / 8) <= 5 * rep.mc_stderr


def test_mc_mean_monomial():
    rep = mc_report(generate_monomial(2, 100), 100, 1000, TRI, samples=400, seed=5)
    assert abs(rep.mc_mean - 9.9) <= 5 * rep.mc_stderr
    assert rep.bound_rhs is not None and rep.bound_rhs > 0
    assert rep.bound_epsilon == 0.1


def test_mc_determinism():
    seq = generate_monomial(2, 50)
    v1 = sample_pair_counts(seq, 50, 100, TRI, 2, seed=11, bits=128)
    v2 = sample_pair_counts(seq, 50, 100, TRI, 2, seed=11, bits=128)
    assert np.array_equal(v1, v2)
    v3 = sample_pair_counts(seq, 50, 100, TRI, 2, seed=12, bits=128)
    assert not np.array_equal(v1, v3)


def test_fixed_alpha_is_deterministic():
    # resampling D at one fixed alpha has zero spread
    seq = generate_naturals(64)
    alpha = angle_from_rational(1, 64, 64)
    d1 = smoothed_pair_count(seq, 64, 16, alpha, TRI).value
    d2 = smoothed_pair_count(seq, 64, 16, alpha, TRI).value
    assert d1 == d2


def test_variance_quadrature_oracle_n2():
    # D(alpha) = 2 F_M(alpha) for the pair {0, 1}; integrate the square directly
    seq = IntegerSequence("pair01", (0, 1), "custom")
    m = 16
    mean = 2.0 / m
    lo = 1.0 / (2 * m)

    def integrand(x):
        return (2.0 * TRI.periodized(m, x) - mean) ** 2

    segs = [(0.0, lo), (lo, 1.0 - lo), (1.0 - lo, 1.0)]
    vq = sum(quad(integrand, a, b, epsabs=1e-12, limit=200)[0] for a, b in segs)
    fv = fourier_variance(seq, 2, m, TRI, k_max=320 * m)
    assert abs(fv.value - vq) < 1e-6
    assert not fv.truncated


def test_variance_fourier_vs_mc():
    seq = generate_monomial(2, 20)
    rep = mc_report(seq, 20, 50, TRI, samples=20_000, seed=11, bits=128)
    fv = fourier_variance(seq, 20, 50, TRI, k_max=10_000)
    combined = rep.mc_variance_stderr + fv.tail_estimate
    assert abs(fv.value - rep.mc_variance) <= 3 * combined


def test_variance_fourier_permutation_invariant():
    # the formula sees only the difference histogram, not the ordering
    vals = (3, 11, 17, 40, 41, 55)
    seq1 = IntegerSequence("a", vals, "custom")
    seq2 = IntegerSequence("b", tuple(reversed(vals)), "custom")
    f1 = fourier_variance(seq1, 6, 12, TRI)
    f2 = fourier_variance(seq2, 6, 12, TRI)
    assert f1.value == f2.value


def test_variance_fourier_guards():
    seq = generate_monomial(2, 100)
    with pytest.raises(ResourceGuardError):
        fourier_variance(seq, 65, 10, TRI)
    with pytest.raises(ConfigError):
        fourier_variance(seq, 10, 100, TRI, k_max=100)


def test_variance_fourier_tail_warning_flag():
    seq = generate_monomial(2, 12)
    fv = fourier_variance(seq, 12, 64, TRI, k_max=16 * 64)
    full = fourier_variance(seq, 12, 64, TRI, k_max=400 * 64)
    # the flagged tail estimate must dominate the actual truncation error
    assert abs(full.value - fv.value) <= fv.tail_estimate + full.tail_estimate


def test_monotonicity_in_n_exact():
    rng = random.Random(17)
    seq = generate_monomial(2, 128)
    for i in range(10):
        alpha = sample_angle(derive_rng(23, i), 128)
        m = rng.choice([5, 50, 500])
        orb = orbit(alpha, seq, 128)
        prev = 0.0
        for n in (8, 16, 32, 64, 128):
            val = pair_count_of_orbit(orb.prefix(n), m, TRI).value
            assert val >= prev  # fsum makes the non-negative-term growth exact
            prev = val


def test_threshold_implication():
    # delta_min <= 1/(4M) forces D >= 1 for windows with f >= 1 on [-1/4, 1/4]
    rng = random.Random(29)
    seq = generate_monomial(2, 40)
    checked = 0
    for i in range(60):
        alpha = sample_angle(derive_rng(37, i), 128)
        orb = orbit(alpha, seq, 40)
        rep = minimal_gap(orb)
        dm = rep.delta_min.mantissa
        if dm == 0:
            continue
        # choose M so the exact event 4*M*dm <= 2^bits holds
        m = ((1 << orb.bits) // (4 * dm)) or 1
        if 4 * m * dm > (1 << orb.bits):
            continue
        val = pair_count_of_orbit(orb, m, TRI).value
        assert val >= 1.0
        checked += 1
    assert checked >= 40


def test_gcd_sum_hand_case():
    h = difference_histogram(generate_naturals(3), 3)
    # positive keys {1: 2, 2: 1}; signed total = 4 * (4 + 2/sqrt2 + 2/sqrt2*... )
    expected = 4.0 * (4.0 + 2.0 * math.sqrt(2.0) / 2.0 * 2.0 / math.sqrt(2.0) + 1.0)
    # spelled out: (1,1): 4; (1,2)+(2,1): 2 * 2*1*1/sqrt(2); (2,2): 1
    expected = 4.0 * (4.0 + 2.0 * (2.0 / math.sqrt(2.0)) + 1.0)
    assert gcd_sum(h) == pytest.approx(expected, rel=1e-12)
    assert gcd_sum(h) == pytest.approx(20.0 + 8.0 * math.sqrt(2.0), rel=1e-12)


def test_gcd_sum_dominates_square_sum():
    for seq, n in (
        (generate_monomial(2, 60), 60),
        (generate_naturals(100), 100),
        (generate_lacunary(2, 30), 30),
    ):
        h = difference_histogram(seq, n)
        assert gcd_sum(h) >= h.square_sum()


def test_gcd_sum_bigint_path_consistency():
    # shifting values beyond int64 must not change the histogram, hence the sum
    vals = (1, 5, 12, 44)
    big = tuple(v * 2**70 for v in vals)
    h_small = difference_histogram(IntegerSequence("s", vals, "custom"), 4)
    h_big = difference_histogram(IntegerSequence("b", big, "custom"), 4)
    # dilation by 2^70 scales keys uniformly: gcd/sqrt ratios are unchanged
    assert gcd_sum(h_big) == pytest.approx(gcd_sum(h_small), rel=1e-9)


def test_gcd_sum_sidon_ratio_recorded():
    # ratio against exp(10 log N / log log N) * sum R^2 is reported, not gated
    n = 8
    h = difference_histogram(generate_lacunary(2, n), n)
    bound = math.exp(10 * math.log(n) / math.log(math.log(n))) * h.square_sum()
    ratio = gcd_sum(h) / bound
    assert 0.0 < ratio < 1.0


def test_kernel_check_diagonal_case():
    lhs, rhs = kernel_bound_check(1, 1, 100, TRI)
    assert rhs == 1.0 / 100
    assert lhs > 0
    assert lhs <= TRI.kernel_constant * rhs


def test_kernel_check_sign_symmetry():
    a = kernel_bound_check(1, 1, 50, TRI)
    b = kernel_bound_check(1, -1, 50, TRI)
    c = kernel_bound_check(-1, -1, 50, TRI)
    assert a == b == c


def test_kernel_check_against_direct_enumeration():
    # independent oracle: scan all k1 in range, solve k1 v1 = k2 v2 directly
    for v1, v2, m in ((2, 3, 10), (4, 6, 7), (5, -15, 12), (1, 1, 9)):
        k_max = 240
        lhs, _ = kernel_bound_check(v1, v2, m, TRI, k_max=k_max)
        brute = 0.0
        for k1 in range(-k_max, k_max + 1):
            if k1 == 0:
                continue
            num = k1 * v1
            if num % v2:
                continue
            k2 = num // v2
            if k2 == 0 or abs(k2) > k_max:
                continue
            brute += (TRI.fourier(k1 / m) / m) * (TRI.fourier(k2 / m) / m)
        assert lhs == pytest.approx(brute, rel=1e-12, abs=1e-18)


def test_kernel_check_rejects_zero():
    with pytest.raises(ConfigError):
        kernel_bound_check(0, 3, 10, TRI)


def test_kernel_bound_grid():
    rng = random.Random(41)
    for w in (TRI, BUMP):
        for _ in range(25):
            v1 = rng.choice([1, -1, 2, 3, 12, 35, -36, 100])
            v2 = rng.choice([1, -2, 3, 5, 12, -35, 36, 360])
            m = rng.choice([4, 10, 100])
            lhs, rhs = kernel_bound_check(v1, v2, m, w)
            assert lhs <= w.kernel_constant * rhs
