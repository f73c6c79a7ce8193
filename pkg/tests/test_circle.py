import random

import pytest

from mingaps import (
    ConfigError,
    Dyadic,
    Orbit,
    angle_from_rational,
    circle_distance,
    derive_rng,
    distinct_gap_count,
    generate_lacunary,
    generate_monomial,
    generate_naturals,
    minimal_gap,
    orbit,
    recommended_bits,
    sample_angle,
)
from mingaps.sequences import IntegerSequence

B = 64
MOD = 1 << B


def _orbit_of(mantissas, bits=B):
    return Orbit(Dyadic(0, bits), tuple(mantissas), bits, "hand")


def test_angle_from_rational_examples():
    assert angle_from_rational(1, 2, 64).mantissa == 1 << 63
    assert angle_from_rational(7, 2, 64).mantissa == 1 << 63  # reduction mod 1
    assert angle_from_rational(1, 3, 8).mantissa == 85  # floor(256/3)
    with pytest.raises(ConfigError):
        angle_from_rational(1, 0, 64)


def test_angle_from_rational_accuracy():
    from fractions import Fraction

    a = angle_from_rational(355, 113, 96)
    exact = Fraction(355, 113) % 1
    assert abs(a.as_fraction() - exact) < Fraction(1, 2**96)


def test_dyadic_validation_and_serialization():
    d = Dyadic(0xA3F, 64)
    assert d.hex_str() == "a3f:64"
    assert Dyadic.from_hex("a3f:64") == d
    assert Dyadic.from_hex(d.hex_str()) == d
    assert len(Dyadic(1, 64).decimal_str()) <= 24
    with pytest.raises(ConfigError):
        Dyadic(1 << 64, 64)
    with pytest.raises(ConfigError):
        Dyadic(-1, 64)
    with pytest.raises(ConfigError):
        Dyadic.from_hex("zz:64")


def test_dyadic_float_of_huge_mantissa():
    # 640-bit values must not overflow the float conversion
    d = Dyadic((1 << 640) - 1, 641)
    assert abs(d.as_float() - 0.5) < 1e-15


def test_sample_angle_determinism():
    a1 = sample_angle(derive_rng(42, 7), 128)
    a2 = sample_angle(derive_rng(42, 7), 128)
    assert a1 == a2
    b = sample_angle(derive_rng(42, 8), 128)
    assert a1 != b


def test_sample_angle_mean():
    total = 0.0
    for i in range(10_000):
        total += sample_angle(derive_rng(5, i), 64).as_float()
    assert 0.49 <= total / 10_000 <= 0.51


def test_orbit_half_on_naturals():
    orb = orbit(angle_from_rational(1, 2, 64), generate_naturals(4), 4)
    assert orb.mantissas == (1 << 63, 0, 1 << 63, 0)


def test_orbit_modular_product_example():
    alpha = Dyadic(85, 8)
    seq = IntegerSequence("three", (3, 6), "custom")
    with pytest.warns(UserWarning):  # 8 bits is far below the precision rule
        orb = orbit(alpha, seq, 2)
    assert orb.mantissas[0] == 255  # 85*3 mod 256


def test_orbit_zero_value_maps_to_zero():
    seq = IntegerSequence("withzero", (0, 5), "custom")
    alpha = sample_angle(derive_rng(1, 0), 64)
    assert orbit(alpha, seq, 2).mantissas[0] == 0


def test_orbit_negative_values_reduce_into_range():
    seq = IntegerSequence("neg", (-3, 4), "custom")
    alpha = angle_from_rational(1, 5, 64)
    orb = orbit(alpha, seq, 2)
    assert 0 <= orb.mantissas[0] < MOD
    assert orb.mantissas[0] == (-3 * alpha.mantissa) % MOD


def test_orbit_length_guard():
    with pytest.raises(ConfigError):
        orbit(angle_from_rational(1, 3, 64), generate_naturals(4), 5)


def test_orbit_precision_warning():
    seq = generate_lacunary(2, 80)  # values to 2^80, far beyond 64-bit alpha
    with pytest.warns(UserWarning, match="recommended"):
        orbit(angle_from_rational(1, 3, 64), seq, 80)


def test_circle_distance_examples():
    x = angle_from_rational(1, 10, 64)
    y = angle_from_rational(9, 10, 64)
    d = circle_distance(x, y)
    assert abs(d.as_float() - 0.2) < 2.0**-62
    assert circle_distance(x, x).mantissa == 0
    half = circle_distance(Dyadic(0, 64), Dyadic(1 << 63, 64))
    assert half.mantissa == 1 << 63  # exactly 1/2
    with pytest.raises(ConfigError):
        circle_distance(Dyadic(0, 64), Dyadic(0, 128))


def test_minimal_gap_hand_case_exact():
    # points 1/8, 1/2, 7/8: gaps 3/8, 3/8, 2/8
    pts = [MOD // 8, MOD // 2, 7 * MOD // 8]
    rep = minimal_gap(_orbit_of(pts))
    assert rep.gaps == (MOD // 4, 3 * MOD // 8, 3 * MOD // 8)
    assert rep.delta_min.mantissa == MOD // 4
    assert rep.distinct_gap_count == 2
    assert not rep.collision


def test_minimal_gap_hand_case_approx():
    # points ~0.1, 0.5, 0.9 -> gaps ~0.4, 0.4, 0.2
    pts = [int(0.1 * MOD), MOD // 2, int(0.9 * MOD)]
    rep = minimal_gap(_orbit_of(pts))
    assert abs(rep.delta_min.as_float() - 0.2) < 1e-9


def test_minimal_gap_collision():
    pts = [MOD // 4, MOD // 4, 3 * MOD // 4]
    rep = minimal_gap(_orbit_of(pts))
    assert rep.collision
    assert rep.delta_min.mantissa == 0


def test_minimal_gap_needs_two_points():
    with pytest.raises(ConfigError):
        minimal_gap(_orbit_of([5]))


def test_gap_closure_and_allpairs_oracle():
    rng = random.Random(2024)
    seq = generate_monomial(2, 64)
    for trial in range(8):
        n = rng.randrange(2, 65)
        alpha = sample_angle(derive_rng(77, trial), 64)
        orb = orbit(alpha, seq, n)
        rep = minimal_gap(orb)
        assert sum(rep.gaps) == MOD  # exact closure
        brute = min(
            circle_distance(Dyadic(a, 64), Dyadic(b, 64)).mantissa
            for i, a in enumerate(orb.mantissas)
            for b in orb.mantissas[i + 1 :]
        )
        assert rep.delta_min.mantissa == brute


def test_delta_min_pigeonhole_and_monotone_in_n():
    seq = generate_monomial(2, 256)
    alpha = sample_angle(derive_rng(9, 0), 128)
    orb = orbit(alpha, seq, 256)
    prev = None
    for n in (4, 8, 16, 64, 256):
        rep = minimal_gap(orb.prefix(n))
        assert rep.delta_min.as_float() <= 1.0 / n
        if prev is not None:
            assert rep.delta_min.mantissa <= prev
        prev = rep.delta_min.mantissa


def test_reflection_symmetry():
    seq = generate_monomial(3, 40)
    alpha = sample_angle(derive_rng(13, 4), 96)
    mirror = Dyadic((1 << 96) - alpha.mantissa, 96)  # 1 - alpha (mantissa nonzero)
    g1 = minimal_gap(orbit(alpha, seq, 40))
    g2 = minimal_gap(orbit(mirror, seq, 40))
    assert g1.gaps == g2.gaps


def test_scaling_covariance():
    base = generate_naturals(30)
    c = 7
    scaled = IntegerSequence("7n", tuple(c * v for v in base.values), "custom")
    alpha = sample_angle(derive_rng(3, 1), 80)
    calpha = Dyadic((c * alpha.mantissa) % (1 << 80), 80)
    assert orbit(alpha, scaled, 30).mantissas == orbit(calpha, base, 30).mantissas


def test_recompute_at_double_precision_truncates_exactly():
    seq = generate_monomial(2, 50)
    rng = derive_rng(21, 0)
    mant = rng.getrandbits(128)
    lo = Dyadic(mant, 128)
    hi = Dyadic(mant << 128, 256)  # same angle at doubled precision
    o_lo = orbit(lo, seq, 50)
    o_hi = orbit(hi, seq, 50)
    assert tuple(m >> 128 for m in o_hi.mantissas) == o_lo.mantissas


def test_distinct_gap_count_equally_spaced():
    # alpha = 1/16 on naturals: 16 equally spaced points, a single gap value
    orb = orbit(angle_from_rational(1, 16, 64), generate_naturals(16), 16)
    assert distinct_gap_count(orb) == 1


def test_three_gap_bound_for_naturals():
    seq = generate_naturals(100)
    for i in range(6):
        alpha = sample_angle(derive_rng(55, i), 128)
        assert distinct_gap_count(orbit(alpha, seq, 100)) <= 3


def test_distinct_gap_count_monomial_recorded():
    # diagnostic only: no bound asserted for quadratic orbits
    alpha = sample_angle(derive_rng(56, 0), 128)
    count = distinct_gap_count(orbit(alpha, generate_monomial(2, 50), 50))
    assert 1 <= count <= 50


def test_recommended_bits_rule():
    assert recommended_bits(2**20, 1024) == 21 + 20 + 40
    assert recommended_bits(1, 2) == 1 + 2 + 40
