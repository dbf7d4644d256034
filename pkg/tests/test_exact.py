import random
from fractions import Fraction

import pytest
gmpy2 = pytest.importorskip("gmpy2")
from hypothesis import given, settings, strategies as st

from growthlab.exact import (
    CertifiedInterval,
    Ordering,
    RationalPow2,
    Unresolved,
    cmp_nat_mul_pow2,
    cmp_nat_pow2,
    cmp_nat_sum_pow2,
    cmp_pow2_sums,
    floor_mul_pow2,
    floor_mul_pow2_oracle,
    iroot,
    pow2_interval,
)

LESS, EQUAL, GREATER = Ordering.LESS, Ordering.EQUAL, Ordering.GREATER


def R(p, q=1):
    return RationalPow2(p, q)


# -- documented examples -----------------------------------------------------


def test_iroot_examples():
    assert iroot(50, 2) == 7
    assert iroot(0, 5) == 0
    assert iroot(2 * 536 ** 6, 6) == 601


def test_floor_mul_pow2_examples():
    assert floor_mul_pow2(5, R(1, 2)) == 7
    assert floor_mul_pow2(0, R(1, 6)) == 0
    assert floor_mul_pow2(536, R(1, 6)) == 601 == iroot(2 * 536 ** 6, 6)


def test_cmp_nat_pow2_examples():
    assert cmp_nat_pow2(3, R(3, 2)) == GREATER
    assert cmp_nat_pow2(2, R(2, 2)) == EQUAL
    assert cmp_nat_pow2(536, R(25, 3)) == GREATER


def test_cmp_nat_sum_pow2_examples():
    # 517 + 2048 <= 2048 * 2^(1/3)
    assert cmp_nat_sum_pow2(517 + 2048, [(2048, R(1, 3))]) == LESS
    assert cmp_nat_sum_pow2(4, [(1, R(2)), (0, R(5, 7))]) == EQUAL
    assert cmp_nat_sum_pow2(430 + 1024, [(1024, R(1, 3))]) == GREATER
    assert 2565 ** 3 <= 2 ** 34 and 1454 ** 3 > 2 ** 31


def test_zero_is_less_by_convention():
    assert cmp_nat_pow2(0, R(-3, 2)) == LESS
    assert cmp_nat_pow2(0, R(0)) == LESS


# -- RationalPow2 ------------------------------------------------------------


def test_lowest_terms_and_rationality():
    e = R(4, 6)
    assert (e.numer, e.denom) == (2, 3)
    assert not e.is_rational
    assert R(6, 3).is_rational and R(6, 3).denom == 1
    assert R(-2, 4) == R(-1, 2)
    with pytest.raises((ValueError, ZeroDivisionError)):
        R(1, 0)


def test_rationalpow2_algebra():
    assert R(1, 2) * R(1, 3) == R(5, 6)
    assert R(1, 2) / R(1, 3) == R(1, 6)
    assert R(1, 6) ** 6 == R(1)
    assert R(2, 3).reciprocal() == R(-2, 3)
    assert RationalPow2.of(Fraction(3, 9)) == R(1, 3)
    assert str(R(1, 6)) == "2^(1/6)"
    s, r = R(7, 3).split()
    assert (s, r) == (2, 1)


# -- certified intervals -----------------------------------------------------


@pytest.mark.parametrize("e", [R(1, 6), R(5, 3), R(-7, 12), R(1, 1536)])
def test_interval_contains_target_and_shrinks(e):
    iv = pow2_interval(e, 64)
    assert iv.lo <= iv.hi
    # lo^q <= 2^p <= hi^q, exact on rationals
    p, q = e.numer, e.denom
    lo, hi = Fraction(iv.lo, 1 << iv.scale), Fraction(iv.hi, 1 << iv.scale)
    assert lo ** q <= Fraction(2) ** p <= hi ** q
    finer = iv.refine()
    assert finer.width < iv.width
    assert finer.width <= iv.width / 2


def test_series_bounds_agree_with_root_bounds(monkeypatch):
    # force the ln2 / exp series route and compare with the integer-root route
    from growthlab import exact

    monkeypatch.setattr(exact, "ROOT_BOUNDS_LIMIT", 0)
    exact._frac_pow2_fixed.cache_clear()
    try:
        for q in (3, 6, 54, 2298):
            for bits in (64, 700, 3000 if q < 1000 else 1200):
                for r in (1, q - 1):
                    s_lo, s_hi = exact._frac_pow2_fixed(r, q, bits)
                    y = iroot(1 << (r + q * bits), q)
                    assert s_lo <= y <= s_hi
                    assert s_hi - s_lo <= 8
    finally:
        exact._frac_pow2_fixed.cache_clear()


# -- properties --------------------------------------------------------------


def test_iroot_sandwich_exhaustive_corpus():
    rng = random.Random(1)
    ns = list(range(0, 2000)) + [rng.randrange(10 ** 6) for _ in range(3000)] + [10 ** 6]
    for n in ns:
        for m in range(1, 65):
            r = iroot(n, m)
            assert r ** m <= n < (r + 1) ** m


def test_iroot_matches_gmpy2_on_big_operands():
    rng = random.Random(2)
    for _ in range(500):
        n = rng.getrandbits(rng.randrange(1, 8192))
        m = rng.randrange(1, 200)
        assert iroot(n, m) == int(gmpy2.iroot(gmpy2.mpz(n), m)[0])


def _random_case(rng):
    a = rng.getrandbits(rng.randrange(1, 4097))
    q = rng.choice([2, 3, 6, 12, 18, 54, 7, 1536])
    p = rng.randrange(-3 * q, 3 * q)
    return a, R(p, q)


def test_fast_path_equals_oracle():
    # the full 1000-case corpus runs in the acceptance suite
    rng = random.Random(11)
    for _ in range(150):
        a, e = _random_case(rng)
        assert floor_mul_pow2(a, e) == floor_mul_pow2_oracle(a, e), (a.bit_length(), e)


def test_floor_sandwich_via_comparisons():
    rng = random.Random(7)
    for _ in range(200):
        a, e = _random_case(rng)
        if a == 0:
            continue
        v = floor_mul_pow2(a, e)
        # v <= a 2^e < v + 1
        assert cmp_nat_mul_pow2(v, a, e) != GREATER
        assert cmp_nat_mul_pow2(v + 1, a, e) == GREATER


def test_oracle_agrees_with_gmpy2_definition():
    rng = random.Random(3)
    for _ in range(200):
        a = rng.getrandbits(rng.randrange(1, 2000))
        q = rng.randrange(1, 40)
        p = rng.randrange(0, 4 * q)
        want = int(gmpy2.iroot(gmpy2.mpz(2) ** p * gmpy2.mpz(a) ** q, q)[0])
        assert floor_mul_pow2(a, R(p, q)) == want


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10 ** 40), st.integers(-200, 200), st.integers(1, 60))
def test_cmp_nat_pow2_matches_power_comparison(n, p, q):
    e = R(p, q)
    p, q = e.numer, e.denom
    if p >= 0:
        want = Ordering.of((n ** q > 2 ** p) - (n ** q < 2 ** p))
    else:
        want = Ordering.of((n ** q * 2 ** -p > 1) - (n ** q * 2 ** -p < 1))
    assert cmp_nat_pow2(n, e) == want


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10 ** 30), st.integers(-100, 100), st.integers(1, 30), st.integers(0, 50))
def test_cmp_nat_pow2_monotone(n, p, q, k):
    e = R(p, q)
    if cmp_nat_pow2(n, e) == GREATER:
        assert cmp_nat_pow2(n + k, e) == GREATER


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10 ** 20), st.integers(1, 10 ** 20), st.integers(-60, 60), st.integers(1, 24))
def test_cmp_nat_mul_pow2_antisymmetric(n, a, p, q):
    # n vs a 2^e  mirrors  a vs n 2^-e
    e = R(p, q)
    assert cmp_nat_mul_pow2(n, a, e) == -cmp_nat_mul_pow2(a, n, e.reciprocal())


def test_sum_comparisons_detect_exact_ties():
    # 2^(1/2) + 2^(1/2) == 2^(3/2)
    assert cmp_pow2_sums([(1, R(1, 2)), (1, R(1, 2))], [(1, R(3, 2))]) == EQUAL
    # 3 + 2^(1/3) - 2^(1/3) == 3
    assert cmp_nat_sum_pow2(3, [(3, R(0)), (1, R(1, 3)), (-1, R(1, 3))]) == EQUAL
    assert cmp_pow2_sums([(1, R(1, 3))], [(1, R(1, 2))]) == LESS


def test_certified_interval_type():
    iv = CertifiedInterval(2, 3, 1, R(1, 2))  # [1, 3/2]
    assert Fraction(7, 5) in iv and 2 not in iv
    assert iv.width == Fraction(1, 2)
    with pytest.raises(ValueError):
        CertifiedInterval(3, 2, 1)


def test_unresolved_is_arithmetic_error():
    assert issubclass(Unresolved, ArithmeticError)
