"""Hemispheres, below-relations and the fundamental rectangle, all exact.

A hemisphere S_{mu,lambda} is the geodesic surface |mu*z - lam|^2 +
|mu|^2 zeta^2 = 1 in upper half-space; it has centre lam/mu and radius
1/|mu|.  The single quantity driving every decision in the polyhedron
search is the *defect*

    defect(S, z) = |z - lam/mu|^2 - 1/|mu|^2,

a rational number: negative under the dome (minus the squared height of
the lift), zero on the boundary circle.  Comparisons between hemispheres
("strictly below", "everywhere below", "touching") are rearranged so
that only squares of radii appear, with explicit sign guards before
squaring mixed terms.

Plane coordinates: a point z = X + Y*sqrt(-m) is the chart pair (X, Y)
of rationals; the Euclidean squared length of a chart vector (X, Y) is
X^2 + m*Y^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .arith import FieldContext, KElem, pair_conj, pair_mul, pair_norm


@dataclass(frozen=True)
class UhsPoint:
    """Point (z, zeta) of upper half-space with the height stored squared."""

    z: KElem
    h2: Fraction

    def __post_init__(self):
        assert self.h2 >= 0


class Hemisphere:
    """Unimodular pair (mu, lam), as integer coordinate pairs in {1, omega}."""

    __slots__ = ("ctx", "mu", "lam", "nrm", "cx", "cy", "r2")

    def __init__(self, ctx: FieldContext, mu: tuple[int, int], lam: tuple[int, int]):
        self.ctx = ctx
        self.mu = mu
        self.lam = lam
        self.nrm = pair_norm(ctx, *mu)    # |mu|^2, a positive integer
        if self.nrm == 0:
            raise ValueError("mu must be nonzero")
        num = pair_mul(ctx, lam, pair_conj(ctx, *mu))   # lam * conj(mu)
        c = KElem(ctx, Fraction(num[0], self.nrm), Fraction(num[1], self.nrm))
        cx, cy = c.chart()
        self.cx = cx
        self.cy = cy
        self.r2 = Fraction(1, self.nrm)

    def center(self) -> KElem:
        return self.ctx.from_chart(self.cx, self.cy)

    def key(self):
        """Canonical identity: a hemisphere is its centre and its radius."""
        return (self.cx, self.cy, self.nrm)

    def __repr__(self):
        return f"S(mu={self.mu}, lam={self.lam})"


def chart_dist2(ctx: FieldContext, ax, ay, bx, by) -> Fraction:
    dx, dy = ax - bx, ay - by
    return dx * dx + ctx.m * dy * dy


def defect(s: Hemisphere, z: KElem) -> Fraction:
    """|z - centre|^2 - radius^2; negative iff z lies under the dome."""
    zx, zy = z.chart()
    return chart_dist2(s.ctx, zx, zy, s.cx, s.cy) - s.r2


def defect_chart(s: Hemisphere, zx: Fraction, zy: Fraction) -> Fraction:
    return chart_dist2(s.ctx, zx, zy, s.cx, s.cy) - s.r2


def strictly_below(s1: Hemisphere, s2: Hemisphere, z: KElem) -> bool:
    """True iff s1 is strictly below s2 over the point z."""
    return defect(s2, z) < defect(s1, z)


def point_strictly_below(p: UhsPoint, s: Hemisphere) -> bool:
    """True iff the upper half-space point p lies strictly below s."""
    return p.h2 < -defect(s, p.z)


def everywhere_below(s1: Hemisphere, s2: Hemisphere) -> bool:
    """True iff s1 is everywhere below s2: dist(centres) <= r2 - r1.

    Decided on squares: with D2 = dist^2 and N1 = |mu1|^2 >= N2 = |mu2|^2
    the inequality sqrt(N(delta)) + sqrt(N2) <= sqrt(N1) is squared twice,
    guarding signs before each squaring.  Equal hemispheres qualify.
    """
    return everywhere_below_raw(s1.ctx, s1.mu, s1.lam, s1.nrm, s2.mu, s2.lam, s2.nrm)


def everywhere_below_raw(ctx, mu1, lam1, n1, mu2, lam2, n2) -> bool:
    if n1 < n2:                       # r1 > r2: cannot fit under
        return False
    # delta = lam1*mu2 - lam2*mu1; dist^2 = N(delta) / (n1*n2)
    d = (
        lam1[0] * mu2[0] - ctx.nrm_omega * lam1[1] * mu2[1]
        - lam2[0] * mu1[0] + ctx.nrm_omega * lam2[1] * mu1[1],
        lam1[0] * mu2[1] + lam1[1] * mu2[0] + ctx.tr_omega * lam1[1] * mu2[1]
        - lam2[0] * mu1[1] - lam2[1] * mu1[0] - ctx.tr_omega * lam2[1] * mu1[1],
    )
    nd = pair_norm(ctx, *d)
    t = n1 - n2 - nd
    if t < 0:
        return False
    return 4 * nd * n2 <= t * t


def touches(s1: Hemisphere, s2: Hemisphere) -> bool:
    """Open touching condition dist^2 < (r1 + r2)^2, decided exactly."""
    d2 = chart_dist2(s1.ctx, s1.cx, s1.cy, s2.cx, s2.cy)
    # d2 < r1^2 + r2^2 + 2*r1*r2  <=>  d2 - r1^2 - r2^2 < 2*sqrt(r1^2 r2^2)
    lhs = d2 - s1.r2 - s2.r2
    if lhs < 0:
        return True
    return lhs * lhs < 4 * s1.r2 * s2.r2


# ---------------------------------------------------------------------------
# agreement lines


@dataclass(frozen=True)
class AgreementLine:
    """Locus defect(S1, .) = defect(S2, .): the chart line a*X + b*Y = c.

    Coefficients are integers, content 1, first nonzero of (a, b) positive,
    so equal lines have equal tuples.
    """

    a: int
    b: int
    c: int

    def key(self):
        return (self.a, self.b, self.c)


def _normalize_line(a: Fraction, b: Fraction, c: Fraction) -> AgreementLine:
    den = 1
    for f in (a, b, c):
        den = den * f.denominator // gcd(den, f.denominator)
    ai, bi, ci = int(a * den), int(b * den), int(c * den)
    g = gcd(gcd(abs(ai), abs(bi)), abs(ci))
    if g:
        ai, bi, ci = ai // g, bi // g, ci // g
    if ai < 0 or (ai == 0 and bi < 0):
        ai, bi, ci = -ai, -bi, -ci
    return AgreementLine(ai, bi, ci)


def agreement_line(s1: Hemisphere, s2: Hemisphere) -> AgreementLine:
    """Line over which the two hemispheres agree; errors on equal centres."""
    ctx = s1.ctx
    if (s1.cx, s1.cy) == (s2.cx, s2.cy):
        if s1.r2 == s2.r2:
            raise ValueError("identical hemispheres agree everywhere")
        raise ValueError("concentric hemispheres never agree")
    a = 2 * (s2.cx - s1.cx)
    b = 2 * ctx.m * (s2.cy - s1.cy)
    c = (s2.cx ** 2 + ctx.m * s2.cy ** 2 - s2.r2) - (s1.cx ** 2 + ctx.m * s1.cy ** 2 - s1.r2)
    return _normalize_line(Fraction(a), Fraction(b), Fraction(c))


def line_intersection(l1: AgreementLine, l2: AgreementLine):
    """Chart coordinates of the intersection point, or None if parallel."""
    det = l1.a * l2.b - l1.b * l2.a
    if det == 0:
        return None
    x = Fraction(l1.c * l2.b - l1.b * l2.c, det)
    y = Fraction(l1.a * l2.c - l1.c * l2.a, det)
    return (x, y)


def lift_on_hemisphere(z: KElem, s: Hemisphere) -> UhsPoint:
    """The point of S whose vertical projection is z."""
    d = defect(s, z)
    if d > 0:
        raise ValueError("point outside the vertical projection of the hemisphere")
    return UhsPoint(z, -d)


# ---------------------------------------------------------------------------
# fundamental rectangle for the translation action


class FundamentalRectangle:
    """D0: chart box [0,1]x[0,1], or [-1/2,1/2]x[0,1/2] for m = 3 mod 4."""

    __slots__ = ("ctx", "x_lo", "x_hi", "y_lo", "y_hi")

    def __init__(self, ctx: FieldContext):
        self.ctx = ctx
        if ctx.omega_shifted:
            self.x_lo, self.x_hi = Fraction(-1, 2), Fraction(1, 2)
            self.y_lo, self.y_hi = Fraction(0), Fraction(1, 2)
        else:
            self.x_lo, self.x_hi = Fraction(0), Fraction(1)
            self.y_lo, self.y_hi = Fraction(0), Fraction(1)

    def area(self) -> Fraction:
        return (self.x_hi - self.x_lo) * (self.y_hi - self.y_lo)

    def contains_chart(self, x, y) -> bool:
        return self.x_lo <= x <= self.x_hi and self.y_lo <= y <= self.y_hi

    def contains(self, z: KElem) -> bool:
        return self.contains_chart(*z.chart())

    def reduce(self, z: KElem) -> tuple[KElem, KElem]:
        """(z0, t) with z0 = z - t in D0 (half-open) and t integral."""
        ctx = self.ctx
        x, y = z.r, z.w          # basis coordinates
        if ctx.omega_shifted:
            b = _floor_frac(y)                    # puts chart Y into [0, 1/2)
            zz = z - KElem(ctx, Fraction(0), Fraction(b))
            cx, _cy = zz.chart()
            a = _floor_frac(cx + Fraction(1, 2))  # puts chart X into [-1/2, 1/2)
            t = KElem(ctx, Fraction(a), Fraction(b))
        else:
            a = _floor_frac(x)
            b = _floor_frac(y)
            t = KElem(ctx, Fraction(a), Fraction(b))
        return (z - t, t)

    def reduce_chart(self, x: Fraction, y: Fraction):
        """Chart version of reduce: ((x0, y0), shift pair (a, b))."""
        z0, t = self.reduce(self.ctx.from_chart(x, y))
        return z0.chart(), t.as_pair()


def _floor_frac(q: Fraction) -> int:
    return q.numerator // q.denominator


def translate(s: Hemisphere, t: tuple[int, int]) -> Hemisphere:
    """The hemisphere shifted by the integral translation t."""
    ctx = s.ctx
    # (mu, lam + t*mu) has centre lam/mu + t and the same radius
    lam = (
        s.lam[0] + t[0] * s.mu[0] - ctx.nrm_omega * t[1] * s.mu[1],
        s.lam[1] + t[0] * s.mu[1] + t[1] * s.mu[0] + ctx.tr_omega * t[1] * s.mu[1],
    )
    return Hemisphere(ctx, s.mu, lam)
