import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bianchi.arith import (
    KElem,
    ceil_mixed_sqrt,
    ceil_sqrt,
    field_context,
    floor_mixed_sqrt,
    floor_sqrt,
    ideal_class,
    ideal_norm,
    is_unimodular,
    rational_sqrt_if_square,
)


def brute_class_number(disc):
    # independent reduced-form count, written as plainly as possible
    count = 0
    a = 1
    while 4 * a * a <= -disc * 4 // 3 + 4:
        for b in range(-a, a + 1):
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if abs(b) == a or a == c:
                if b < 0:
                    continue
            if math.gcd(math.gcd(a, b), c) == 1 and b * b - 4 * a * c == disc:
                count += 1
        a += 1
    return count


def squarefree(n):
    return all(n % (d * d) for d in range(2, int(n ** 0.5) + 1))


def test_context_rejects_bad_m():
    for bad in (1, 3, 4, 8, 9, 12, 0, -5):
        with pytest.raises(ValueError):
            field_context(bad)


def test_discriminant_and_omega_kind():
    assert field_context(2).disc == -8
    assert not field_context(2).omega_shifted
    assert field_context(7).disc == -7
    assert field_context(7).omega_shifted
    assert field_context(5).class_number == 2


def test_class_number_against_brute_force_up_to_200():
    for m in range(2, 201):
        if m in (1, 3) or not squarefree(m):
            continue
        ctx = field_context(m)
        assert ctx.class_number == brute_class_number(ctx.disc), m


def test_norm_examples():
    ctx7 = field_context(7)
    assert ctx7.elem(1, 1).norm() == 2
    assert ctx7.elem(1).norm() == 1
    ctx2 = field_context(2)
    assert ctx2.omega().norm() == 2


def test_conj_examples():
    ctx7 = field_context(7)
    w = ctx7.omega()
    assert w.conj() == ctx7.elem(-1, -1)      # m = 3 mod 4: conj(w) = -1 - w
    assert ctx7.elem(Fraction(5, 3)).conj() == ctx7.elem(Fraction(5, 3))


small_rats = st.fractions(
    min_value=-6, max_value=6, max_denominator=12
)


@settings(max_examples=60, deadline=None)
@given(small_rats, small_rats)
def test_conj_is_involution(r, w):
    ctx = field_context(5)
    c = KElem(ctx, r, w)
    assert c.conj().conj() == c
    assert (c * c.conj()).w == 0          # norm lands in Q
    assert c.norm() >= 0


@settings(max_examples=60, deadline=None)
@given(small_rats, small_rats, small_rats, small_rats)
def test_norm_multiplicative(r1, w1, r2, w2):
    for m in (2, 7):
        ctx = field_context(m)
        x, y = KElem(ctx, r1, w1), KElem(ctx, r2, w2)
        assert (x * y).norm() == x.norm() * y.norm()


def test_unimodular_examples():
    ctx5 = field_context(5)
    assert is_unimodular(ctx5, (1, 0), (3, 7))
    assert is_unimodular(ctx5, (0, 0), (1, 0))
    assert not is_unimodular(ctx5, (2, 0), (1, 1))       # (2, 1 + sqrt(-5))
    assert ideal_norm(ctx5, [(2, 0), (1, 1)]) == 2
    with pytest.raises(ValueError):
        is_unimodular(ctx5, (0, 0), (0, 0))


@settings(max_examples=40, deadline=None)
@given(
    st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5)
)
def test_unimodular_symmetric_and_unit_invariant(a, b, c, d):
    ctx = field_context(6)
    mu, lam = (a, b), (c, d)
    if mu == (0, 0) and lam == (0, 0):
        return
    assert is_unimodular(ctx, mu, lam) == is_unimodular(ctx, lam, mu)
    assert is_unimodular(ctx, mu, lam) == is_unimodular(
        ctx, (-a, -b), lam
    )


def test_ideal_class_examples():
    ctx5 = field_context(5)
    assert ideal_class(ctx5, (1, 0), (0, 0)).is_principal()
    cls = ideal_class(ctx5, (1, 1), (2, 0))
    assert cls.form == (2, 2, 3)
    assert not cls.is_principal()
    # multiplying both entries by a common factor keeps the class
    scaled = ideal_class(ctx5, (2, 2), (4, 0))
    assert scaled.form == cls.form


def test_class_is_principal_everywhere_for_h1_fields():
    ctx = field_context(2)
    for lam in [(1, 0), (3, 2), (0, 1), (5, -1)]:
        for mu in [(1, 1), (2, 1), (1, -2)]:
            if is_unimodular(ctx, mu, lam):
                assert ideal_class(ctx, lam, mu).is_principal()


def test_rational_sqrt():
    assert rational_sqrt_if_square(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt_if_square(2) is None
    assert rational_sqrt_if_square(0) == 0
    with pytest.raises(ValueError):
        rational_sqrt_if_square(-1)


def test_ceil_sqrt_examples():
    assert ceil_sqrt(2) == 2
    assert ceil_sqrt(4) == 2
    assert ceil_sqrt(Fraction(17, 4)) == 3
    with pytest.raises(ValueError):
        ceil_sqrt(-2)


@settings(max_examples=80, deadline=None)
@given(st.fractions(min_value=0, max_value=400, max_denominator=30))
def test_sqrt_bounds(q):
    f, c = floor_sqrt(q), ceil_sqrt(q)
    assert f * f <= q and (f + 1) * (f + 1) > q
    assert c * c >= q and (c == 0 or (c - 1) * (c - 1) < q)


@settings(max_examples=80, deadline=None)
@given(
    st.fractions(min_value=-20, max_value=20, max_denominator=12),
    st.sampled_from([1, -1]),
    st.fractions(min_value=0, max_value=300, max_denominator=12),
    st.fractions(min_value=Fraction(1, 7), max_value=9, max_denominator=12),
)
def test_mixed_sqrt_floor_ceil(b, sign, d, a):
    n = floor_mixed_sqrt(b, sign, d, a)
    # n <= (b + sign*sqrt(d))/a < n + 1, checked by squaring
    def leq(k):
        lhs = a * k - b
        if sign == 1:
            return lhs <= 0 or lhs * lhs <= d
        return lhs <= 0 and lhs * lhs >= d

    assert leq(n) and not leq(n + 1)
    c = ceil_mixed_sqrt(b, sign, d, a)
    assert c in (n, n + 1)
