from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bianchi.arith import field_context, pair_norm
from bianchi.geometry import (
    FundamentalRectangle,
    Hemisphere,
    agreement_line,
    defect,
    everywhere_below,
    lift_on_hemisphere,
    line_intersection,
    point_strictly_below,
    strictly_below,
    translate,
)

CTX2 = field_context(2)
UNIT0 = Hemisphere(CTX2, (1, 0), (0, 0))
UNIT1 = Hemisphere(CTX2, (1, 0), (1, 0))


def test_defect_examples():
    assert defect(UNIT0, CTX2.elem(0)) == -1            # centre
    assert defect(UNIT0, CTX2.elem(1)) == 0             # boundary circle
    assert defect(UNIT0, CTX2.elem(2)) == 3             # 4 - 1


def test_strictly_below():
    z = CTX2.elem(0)
    assert not strictly_below(UNIT0, UNIT0, z)
    assert strictly_below(UNIT1, UNIT0, z)              # S(1) below S(0) at 0
    # point version restates the defect comparison
    from bianchi.geometry import UhsPoint

    p = UhsPoint(CTX2.elem(0), Fraction(1, 2))
    assert point_strictly_below(p, UNIT0)               # 1/2 < 1
    q = UhsPoint(CTX2.elem(0), Fraction(1))
    assert not point_strictly_below(q, UNIT0)


def test_everywhere_below():
    assert everywhere_below(UNIT0, UNIT0)
    # concentric: radius 1/2 at 0 under radius 1 at 0 (mu = sqrt(-2))
    small = Hemisphere(CTX2, (0, 1), (0, 0))
    assert small.r2 == Fraction(1, 2)
    assert everywhere_below(small, UNIT0)
    assert not everywhere_below(UNIT0, small)
    assert not everywhere_below(UNIT0, UNIT1)


@settings(max_examples=100, deadline=None)
@given(
    st.fractions(min_value=-2, max_value=2, max_denominator=8),
    st.fractions(min_value=-2, max_value=2, max_denominator=8),
)
def test_everywhere_below_pointwise_consequence(x, y):
    """A dominated hemisphere is below (or agrees with) the other everywhere."""
    small = Hemisphere(CTX2, (0, 1), (0, 0))
    assert everywhere_below(small, UNIT0)
    z = CTX2.elem(x, y)
    if defect(small, z) < 0:
        assert defect(UNIT0, z) <= defect(small, z)


def test_agreement_line_examples():
    line = agreement_line(UNIT0, UNIT1)
    assert (line.a, line.b, line.c) == (2, 0, 1)        # chart line X = 1/2
    assert agreement_line(UNIT1, UNIT0).key() == line.key()


def test_agreement_line_mixed_radii():
    # radius-1/2 hemisphere at 1: mu = sqrt(-2), lam = sqrt(-2)
    s_half = Hemisphere(CTX2, (0, 1), (0, 1))
    assert (s_half.cx, s_half.cy) == (1, 0)
    line = agreement_line(UNIT0, s_half)
    # |z|^2 - 1 = |z-1|^2 - 1/2  =>  2X = 3/2  =>  X = 3/4
    assert (line.a, line.b, line.c) == (4, 0, 3)


def test_agreement_line_radii_one_and_quarter():
    ctx5 = field_context(5)
    u0 = Hemisphere(ctx5, (1, 0), (0, 0))
    s = Hemisphere(ctx5, (2, 0), (2, 0))                # radius 1/2 at 1
    assert s.r2 == Fraction(1, 4)
    line = agreement_line(u0, s)
    # |z|^2 - 1 = |z-1|^2 - 1/4  =>  2X = 1 + 3/4  =>  X = 7/8
    assert (line.a, line.b, line.c) == (8, 0, 7)


def test_agreement_line_degenerate():
    with pytest.raises(ValueError):
        agreement_line(UNIT0, UNIT0)
    small = Hemisphere(CTX2, (0, 1), (0, 0))
    with pytest.raises(ValueError):
        agreement_line(UNIT0, small)                    # concentric


def test_line_intersection():
    l1 = agreement_line(UNIT0, UNIT1)
    unit_w = Hemisphere(CTX2, (1, 0), (0, 1))           # unit at omega
    l2 = agreement_line(UNIT0, unit_w)
    pt = line_intersection(l1, l2)
    assert pt == (Fraction(1, 2), Fraction(1, 2))
    assert line_intersection(l1, l1) is None


def test_lift_on_hemisphere():
    assert lift_on_hemisphere(CTX2.elem(0), UNIT0).h2 == 1
    assert lift_on_hemisphere(CTX2.elem(1), UNIT0).h2 == 0
    assert lift_on_hemisphere(CTX2.elem(Fraction(1, 2)), UNIT0).h2 == Fraction(3, 4)
    with pytest.raises(ValueError):
        lift_on_hemisphere(CTX2.elem(2), UNIT0)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(-3, 3), st.integers(-3, 3),
    st.fractions(min_value=-2, max_value=2, max_denominator=6),
    st.fractions(min_value=-2, max_value=2, max_denominator=6),
)
def test_lift_satisfies_hemisphere_equation(p, q, x, w):
    """|mu z - lam|^2 + |mu|^2 zeta^2 = 1 exactly on the lift."""
    ctx = field_context(7)
    for mu, lam in [((1, 0), (p, q)), ((1, 1), (p, q))]:
        if not _unimod(ctx, mu, lam):
            continue
        hem = Hemisphere(ctx, mu, lam)
        z = ctx.elem(x, w)
        if defect(hem, z) > 0:
            continue
        pt = lift_on_hemisphere(z, hem)
        mu_el = ctx.elem(*mu)
        lam_el = ctx.elem(*lam)
        assert (mu_el * z - lam_el).norm() + pair_norm(ctx, *mu) * pt.h2 == 1


def _unimod(ctx, mu, lam):
    from bianchi.arith import is_unimodular

    if mu == (0, 0) and lam == (0, 0):
        return False
    return is_unimodular(ctx, mu, lam)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(-3, 3), st.integers(-3, 3),
    st.fractions(min_value=-2, max_value=2, max_denominator=8),
    st.fractions(min_value=-2, max_value=2, max_denominator=8),
)
def test_translation_preserves_defect(a, b, x, w):
    ctx = field_context(5)
    hem = Hemisphere(ctx, (1, 0), (0, 0))
    z = ctx.elem(x, w)
    t = (a, b)
    moved = translate(hem, t)
    assert defect(moved, z + ctx.elem(a, b)) == defect(hem, z)


def test_rectangle_membership():
    ctx2 = field_context(2)
    rect2 = FundamentalRectangle(ctx2)
    assert rect2.contains(ctx2.from_chart(Fraction(1, 2), Fraction(1, 2)))
    assert rect2.contains(ctx2.elem(0))
    ctx7 = field_context(7)
    rect7 = FundamentalRectangle(ctx7)
    assert not rect7.contains(ctx7.from_chart(0, Fraction(3, 4)))
    assert rect7.contains(ctx7.elem(0))


@settings(max_examples=60, deadline=None)
@given(
    st.fractions(min_value=-9, max_value=9, max_denominator=11),
    st.fractions(min_value=-9, max_value=9, max_denominator=11),
)
def test_rectangle_reduction(r, w):
    for m in (2, 7):
        ctx = field_context(m)
        rect = FundamentalRectangle(ctx)
        z = ctx.elem(r, w)
        z0, t = rect.reduce(z)
        assert t.is_integral()
        assert z0 + t == z
        x, y = z0.chart()
        assert rect.x_lo <= x < rect.x_hi or x == rect.x_lo
        assert rect.y_lo <= y < rect.y_hi or y == rect.y_lo
        assert rect.contains_chart(x, y)
