"""The group action on upper half-space, point identifications, and the
Floege cell complex of the quotient.

The fundamental polyhedron's bottom facets, clipped to the fundamental
rectangle, are the 2-cells; singular cusps appear as extra height-zero
vertices.  Cells are classified into SL2(O)-orbits by an exhaustive bounded
search for identifying matrices (every candidate is verified by applying the
action exactly), stabilizers are computed the same way, and cells are
subdivided at exact fixed points of elliptic elements until every stabilizer
fixes its cell pointwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .arith import (
    FieldContext,
    KElem,
    ceil_mixed_sqrt,
    floor_mixed_sqrt,
    floor_sqrt,
    ideal_class,
    ideal_hnf,
    is_unimodular,
    pair_norm,
    rational_sqrt_if_square,
)
from .geometry import FundamentalRectangle, UhsPoint, chart_dist2
from .swan import PolyhedronData, _chart_shift, _shift_range, clip_to_box, _shoelace


# ---------------------------------------------------------------------------
# group elements


@dataclass(frozen=True)
class GroupElement:
    """Matrix (a b; c d) over O with determinant one."""

    ctx: FieldContext
    a: KElem
    b: KElem
    c: KElem
    d: KElem

    def __post_init__(self):
        assert (self.a * self.d - self.b * self.c) == 1, "determinant must be 1"

    @staticmethod
    def identity(ctx: FieldContext) -> "GroupElement":
        one, zero = ctx.elem(1), ctx.elem(0)
        return GroupElement(ctx, one, zero, zero, one)

    @staticmethod
    def from_pairs(ctx, a, b, c, d) -> "GroupElement":
        mk = lambda p: KElem(ctx, Fraction(p[0]), Fraction(p[1]))
        return GroupElement(ctx, mk(a), mk(b), mk(c), mk(d))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.ctx,
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inv(self) -> "GroupElement":
        return GroupElement(self.ctx, self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.ctx, -self.a, -self.b, -self.c, -self.d)

    def trace(self) -> KElem:
        return self.a + self.d

    def key(self):
        return (
            self.a.r, self.a.w, self.b.r, self.b.w,
            self.c.r, self.c.w, self.d.r, self.d.w,
        )

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.key() == other.key()

    def entries_pairs(self):
        return tuple(x.as_pair() for x in (self.a, self.b, self.c, self.d))

    def __repr__(self):
        return f"[{self.a} {self.b}; {self.c} {self.d}]"


def translation_matrix(ctx: FieldContext, t: KElem) -> GroupElement:
    """Element acting on upper half-space as z -> z + t."""
    return GroupElement(ctx, ctx.elem(1), -t, ctx.elem(0), ctx.elem(1))


def poincare_apply(g: GroupElement, p: UhsPoint) -> UhsPoint:
    """Exact image of an interior point under the hyperbolic action."""
    z, h2 = p.z, p.h2
    cz_d = g.c * z - g.d
    den = cz_d.norm() + h2 * g.c.norm()
    assert den > 0
    h2_new = h2 / (den * den)
    z_new = ((-cz_d).conj() * (g.a * z - g.b) - h2 * g.c.conj() * g.a) / den
    return UhsPoint(z_new, h2_new)


def cusp_apply(g: GroupElement, z: Optional[KElem]) -> Optional[KElem]:
    """Boundary action on cusps; None stands for the cusp at infinity."""
    if z is None:
        if g.c == 0:
            return None
        return -(g.a / g.c)
    den = g.d - g.c * z
    if den == 0:
        return None
    return (g.a * z - g.b) / den


# ---------------------------------------------------------------------------
# identification matrices (the bounded search)


def _c_candidates(ctx: FieldContext, c2_bound: Fraction):
    """Nonzero c = j + k*omega with |c|^2 <= c2_bound."""
    out = []
    if c2_bound < 1:
        return out
    if ctx.omega_shifted:
        m = ctx.m
        jmax = ceil_mixed_sqrt(Fraction(0), 1, c2_bound * (m + 1) / m, Fraction(1))
        for j in range(-jmax, jmax + 1):
            disc = 4 * ((m + 1) * c2_bound - Fraction(j * j * m))
            if disc < 0:
                continue
            k_lo = ceil_mixed_sqrt(Fraction(2 * j), -1, disc, Fraction(m + 1))
            k_hi = floor_mixed_sqrt(Fraction(2 * j), 1, disc, Fraction(m + 1))
            for k in range(k_lo, k_hi + 1):
                if (j, k) != (0, 0) and pair_norm(ctx, j, k) <= c2_bound:
                    out.append((j, k))
    else:
        jmax = floor_sqrt(c2_bound)
        kmax = floor_sqrt(c2_bound / ctx.m)
        for j in range(-jmax, jmax + 1):
            for k in range(-kmax, kmax + 1):
                if (j, k) != (0, 0) and pair_norm(ctx, j, k) <= c2_bound:
                    out.append((j, k))
    return out


def identification_matrices(
    ctx: FieldContext, p: UhsPoint, q: UhsPoint
) -> list[GroupElement]:
    """All group elements sending the interior point p to the interior point q.

    The c = 0 family needs equal heights and an integral translation; for
    c != 0 the entries are scanned over the exact integer ranges forced by
    the action equations, and every candidate matrix is verified by applying
    the action before being returned.
    """
    assert p.h2 > 0 and q.h2 > 0
    out: list[GroupElement] = []

    # upper triangular family: z -> z - b with heights preserved
    if p.h2 == q.h2:
        delta = p.z - q.z
        if delta.is_integral():
            g = GroupElement(ctx, ctx.elem(1), delta, ctx.elem(0), ctx.elem(1))
            out.extend([g, -g])

    # ratio r/rho must be rational for any c != 0 solution
    t = rational_sqrt_if_square(p.h2 / q.h2)
    if t is None:
        return _dedup(out)
    r_rho = p.h2 / t                      # r * rho
    c2_bound = 1 / r_rho
    r2 = p.h2

    m = ctx.m
    for (j, k) in _c_candidates(ctx, c2_bound):
        c_el = KElem(ctx, Fraction(j), Fraction(k))
        c2 = c_el.norm()
        t2_rem = t - r2 * c2              # |cz - d|^2 target
        if t2_rem < 0:
            continue
        cz = c_el * p.z
        bigr, bigw = cz.r, cz.w
        if ctx.omega_shifted:
            # |x + y*omega|^2 = (x - y/2)^2 + m y^2/4, with y = W - s
            s_rad = 4 * t2_rem / m
            s_lo = ceil_mixed_sqrt(bigw, -1, s_rad, Fraction(1))
            s_hi = floor_mixed_sqrt(bigw, 1, s_rad, Fraction(1))
        else:
            s_rad = t2_rem / m
            s_lo = ceil_mixed_sqrt(bigw, -1, s_rad, Fraction(1))
            s_hi = floor_mixed_sqrt(bigw, 1, s_rad, Fraction(1))
        for s in range(s_lo, s_hi + 1):
            y = bigw - s
            if ctx.omega_shifted:
                delta2 = t2_rem - m * y * y / 4
            else:
                delta2 = t2_rem - m * y * y
            if delta2 < 0:
                continue
            root = rational_sqrt_if_square(delta2)
            if root is None:
                continue
            for sign in ((1, -1) if root != 0 else (1,)):
                if ctx.omega_shifted:
                    q_val = bigr - y / 2 - sign * root
                else:
                    q_val = bigr - sign * root
                if q_val.denominator != 1:
                    continue
                d_el = KElem(ctx, q_val, Fraction(s))
                if ((cz - d_el).norm() + r2 * c2) != t:
                    continue
                if not is_unimodular(ctx, (j, k), d_el.as_pair()):
                    continue
                a_el = (d_el.conj() - cz.conj()) / t - c_el * q.z
                if not a_el.is_integral():
                    continue
                num = a_el * d_el - 1
                b_el = num / c_el
                if not b_el.is_integral():
                    continue
                g = GroupElement(ctx, a_el, b_el, c_el, d_el)
                img = poincare_apply(g, p)
                if img.z == q.z and img.h2 == q.h2:
                    out.append(g)
    return _dedup(out)


def _dedup(mats: list[GroupElement]) -> list[GroupElement]:
    seen = {}
    for g in mats:
        seen.setdefault(g.key(), g)
    return [seen[k] for k in sorted(seen)]


def point_stabilizer(ctx: FieldContext, p: UhsPoint) -> list[GroupElement]:
    return identification_matrices(ctx, p, p)


def mulclose(gens: list[GroupElement], cap: int = 200) -> list[GroupElement]:
    """Closure of gens under multiplication; raises if it exceeds cap."""
    els = {g.key(): g for g in gens}
    frontier = list(gens)
    while frontier:
        new = []
        for a in gens:
            for b in frontier:
                c = a * b
                if c.key() not in els:
                    els[c.key()] = c
                    new.append(c)
                    if len(els) > cap:
                        raise RuntimeError("group closure exceeded cap")
        frontier = new
    return [els[k] for k in sorted(els)]


# ---------------------------------------------------------------------------
# cusps: stabilizer generators, conjugators


def cusp_pair(ctx: FieldContext, z: KElem) -> tuple[tuple[int, int], tuple[int, int]]:
    """(lam, mu) integral with z = lam/mu (mu a rational integer)."""
    den_r, den_w = z.r.denominator, z.w.denominator
    den = den_r * den_w // math.gcd(den_r, den_w)
    return ((int(z.r * den), int(z.w * den)), (den, 0))


def _xgcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        qq = old_r // r
        old_r, r = r, old_r - qq * r
        old_s, s = s, old_s - qq * s
        old_t, t = t, old_t - qq * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _solve_integer_2xn(cols: list[tuple[int, int]], target: tuple[int, int]):
    """Integer x with sum x_i * cols_i = target, or None."""
    # carry coefficient vectors through a gcd elimination on the second row
    n = len(cols)
    vecs = [(u, v, tuple(1 if i == j else 0 for j in range(n))) for i, (j, (u, v)) in
            enumerate(((i, c) for i, c in enumerate(cols)))]
    uc, c, coef_c = 0, 0, tuple(0 for _ in range(n))
    rest: list[tuple[int, tuple]] = []
    for (u, v, e) in vecs:
        if v == 0:
            rest.append((u, e))
            continue
        if c == 0:
            uc, c, coef_c = u, v, e
            continue
        g, x, y = _xgcd(c, v)
        rest.append(
            ((c // g) * u - (v // g) * uc,
             tuple((c // g) * ei - (v // g) * ci for ci, ei in zip(coef_c, e)))
        )
        uc, c, coef_c = x * uc + y * u, g, tuple(
            x * ci + y * ei for ci, ei in zip(coef_c, e)
        )
    tu, tv = target
    if c == 0:
        if tv != 0:
            return None
        alpha, coef_alpha = 0, tuple(0 for _ in range(n))
    else:
        if tv % c != 0:
            return None
        alpha = tv // c
        coef_alpha = tuple(alpha * ci for ci in coef_c)
        tu = tu - alpha * uc
    # now solve sum y_i * rest_i = tu over the v = 0 leftovers
    g_all, coef_g = 0, tuple(0 for _ in range(n))
    for (u, e) in rest:
        if u == 0:
            continue
        g, x, y = _xgcd(g_all, u)
        coef_g = tuple(x * a + y * b for a, b in zip(coef_g, e))
        g_all = g
    if g_all == 0:
        if tu != 0:
            return None
        return coef_alpha
    if tu % g_all != 0:
        return None
    mult = tu // g_all
    return tuple(a + mult * b for a, b in zip(coef_alpha, coef_g))


def _inverse_ideal_basis(ctx: FieldContext, hnf: tuple[int, int, int]) -> list[KElem]:
    """Z-basis of the fractional inverse of the ideal with the given HNF."""
    a, b, c = hnf
    n = a * c
    # conj of basis {a, b + c*omega} divided by the norm
    t = ctx.tr_omega
    beta1 = KElem(ctx, Fraction(a, n), Fraction(0))
    beta2 = KElem(ctx, Fraction(b + c * t, n), Fraction(-c, n))
    return [beta1, beta2]


def cusp_stabilizer_generators(
    ctx: FieldContext, lam: tuple[int, int], mu: tuple[int, int]
) -> tuple[GroupElement, GroupElement]:
    """Two unipotent generators of the stabilizer of the cusp lam/mu (mod -1).

    For alpha running over a Z-basis of the inverse of the square of the
    ideal (lam, mu), the matrices below are integral, unipotent, commute,
    and fix the cusp; together with -1 they generate the full stabilizer.
    """
    lam_el = KElem(ctx, Fraction(lam[0]), Fraction(lam[1]))
    mu_el = KElem(ctx, Fraction(mu[0]), Fraction(mu[1]))
    sq_gens = []
    for x in (lam, mu):
        for y in (lam, mu):
            xe = KElem(ctx, Fraction(x[0]), Fraction(x[1]))
            ye = KElem(ctx, Fraction(y[0]), Fraction(y[1]))
            sq_gens.append((xe * ye).as_pair())
    hnf_sq = ideal_hnf(ctx, sq_gens)
    gens = []
    for alpha in _inverse_ideal_basis(ctx, hnf_sq):
        g = GroupElement(
            ctx,
            1 - alpha * lam_el * mu_el,
            -alpha * lam_el * lam_el,
            alpha * mu_el * mu_el,
            1 + alpha * lam_el * mu_el,
        )
        for entry in (g.a, g.b, g.c, g.d):
            assert entry.is_integral(), "cusp stabilizer entry not integral"
        assert g.trace() == 2
        gens.append(g)
    cusp = lam_el / mu_el if mu_el != 0 else None
    for g in gens:
        assert cusp_apply(g, cusp) == cusp
    assert gens[0] * gens[1] == gens[1] * gens[0]
    return (gens[0], gens[1])


def _principal_generator(ctx: FieldContext, hnf: tuple[int, int, int]) -> Optional[KElem]:
    """Generator of the ideal with this HNF if principal, else None."""
    a, b, c = hnf
    n_target = a * c
    t, qn = ctx.tr_omega, ctx.nrm_omega
    # norm of x*a + y*(b + c*omega) as a quadratic form in (x, y)
    aq = a * a
    bq = a * (2 * b + c * t)
    cq = b * b + t * b * c + qn * c * c
    disc_q = bq * bq - 4 * aq * cq
    assert disc_q < 0
    y_max = floor_sqrt(Fraction(4 * aq * n_target, -disc_q))
    for y in range(-y_max, y_max + 1):
        disc = bq * bq * y * y - 4 * aq * (cq * y * y - n_target)
        if disc < 0:
            continue
        s = math.isqrt(disc)
        if s * s != disc:
            continue
        for root in {s, -s}:
            num = -bq * y + root
            if num % (2 * aq) != 0:
                continue
            x = num // (2 * aq)
            g = KElem(ctx, Fraction(x * a + y * b), Fraction(y * c))
            if g.norm() == n_target:
                return g
    return None


def _bezout_for_cusp(ctx: FieldContext, lam, mu):
    """u, v in the inverse of (lam, mu) with u*lam + v*mu = 1."""
    hnf = ideal_hnf(ctx, [lam, mu])
    basis = _inverse_ideal_basis(ctx, hnf)
    lam_el = KElem(ctx, Fraction(lam[0]), Fraction(lam[1]))
    mu_el = KElem(ctx, Fraction(mu[0]), Fraction(mu[1]))
    cols = []
    for beta in basis:
        prod = beta * lam_el
        cols.append(prod.as_pair())
    for beta in basis:
        prod = beta * mu_el
        cols.append(prod.as_pair())
    sol = _solve_integer_2xn(cols, (1, 0))
    assert sol is not None, "Bezout solve failed for a unimodular-span pair"
    u = basis[0] * sol[0] + basis[1] * sol[1]
    v = basis[0] * sol[2] + basis[1] * sol[3]
    assert u * lam_el + v * mu_el == 1
    return u, v


def cusp_conjugator(
    ctx: FieldContext, z1: KElem, z2: KElem
) -> Optional[GroupElement]:
    """Group element sending cusp z1 to cusp z2, or None if inequivalent."""
    delta = z2 - z1
    if delta.is_integral():
        return translation_matrix(ctx, delta)
    lam1, mu1 = cusp_pair(ctx, z1)
    lam2, mu2 = cusp_pair(ctx, z2)
    cls1 = ideal_class(ctx, lam1, mu1)
    cls2 = ideal_class(ctx, lam2, mu2)
    if cls1.form != cls2.form:
        return None
    # generator q of the principal ideal I2 * conj(I1) / N(I1)
    n1 = ideal_hnf(ctx, [lam1, mu1])
    n1_norm = n1[0] * n1[2]
    mk = lambda p: KElem(ctx, Fraction(p[0]), Fraction(p[1]))
    prods = []
    for x in (lam2, mu2):
        for y in (lam1, mu1):
            prods.append((mk(x) * mk(y).conj()).as_pair())
    hnf_j = ideal_hnf(ctx, prods)
    g = _principal_generator(ctx, hnf_j)
    assert g is not None, "equal classes must give a principal quotient"
    q_el = g / n1_norm
    u1, v1 = _bezout_for_cusp(ctx, lam1, mu1)
    u2, v2 = _bezout_for_cusp(ctx, lam2, mu2)
    l2, m2 = mk(lam2), mk(mu2)
    l1, m1 = mk(lam1), mk(mu1)
    m00 = l2 * u1 / q_el + v2 * q_el * m1
    m01 = l2 * v1 / q_el - v2 * q_el * l1
    m10 = m2 * u1 / q_el - u2 * q_el * m1
    m11 = m2 * v1 / q_el + u2 * q_el * l1
    gamma = GroupElement(ctx, m00, -m01, -m10, m11)
    for entry in (gamma.a, gamma.b, gamma.c, gamma.d):
        assert entry.is_integral(), "cusp conjugator not integral"
    assert cusp_apply(gamma, z1) == z2
    return gamma


def _ideal_quotient_generator(ctx, pair_num, pair_den) -> Optional[KElem]:
    """Generator of (pair_num ideal) * (pair_den ideal)^{-1} if principal."""
    mk = lambda p: KElem(ctx, Fraction(p[0]), Fraction(p[1]))
    hnf_den = ideal_hnf(ctx, list(pair_den))
    n_den = hnf_den[0] * hnf_den[2]
    prods = []
    for x in pair_num:
        for y in pair_den:
            prods.append((mk(x) * mk(y).conj()).as_pair())
    g = _principal_generator(ctx, ideal_hnf(ctx, prods))
    if g is None:
        return None
    return g / n_den


def cusp_pair_matrices(
    ctx: FieldContext, s1: KElem, s2: KElem, t1: KElem, t2: KElem
) -> list[GroupElement]:
    """All group elements with s1 -> t1 and s2 -> t2 on the boundary.

    An element fixing two distinct cusps of K is diagonalisable over K with
    unit eigenvalues, hence +-1; so the solution, when it exists, is a single
    matrix up to sign, and its eigenvalue-like scalars are generators of the
    content-ideal quotients, determined up to sign as well.
    """
    v1, w1 = cusp_pair(ctx, s1)
    v2, w2 = cusp_pair(ctx, s2)
    u1, x1 = cusp_pair(ctx, t1)
    u2, x2 = cusp_pair(ctx, t2)
    mk = lambda p: KElem(ctx, Fraction(p[0]), Fraction(p[1]))
    alpha = _ideal_quotient_generator(ctx, (v1, w1), (u1, x1))
    beta = _ideal_quotient_generator(ctx, (v2, w2), (u2, x2))
    if alpha is None or beta is None:
        return []
    d_src = mk(v1) * mk(w2) - mk(v2) * mk(w1)
    d_tgt = mk(u1) * mk(x2) - mk(u2) * mk(x1)
    assert d_src != 0 and d_tgt != 0, "cusps in a pair must be distinct"
    d0 = d_src / d_tgt
    out = []
    for sa in (1, -1):
        for sb in (1, -1):
            a_s, b_s = alpha * sa, beta * sb
            if a_s * b_s != d0:
                continue
            # standard-form M = a_s * (u1;x1) w_row1 + b_s * (u2;x2) w_row2
            # with [w_row1; w_row2] the inverse of [(v1;w1) (v2;w2)]
            m00 = (a_s * mk(u1) * mk(w2) - b_s * mk(u2) * mk(w1)) / d_src
            m01 = (-a_s * mk(u1) * mk(v2) + b_s * mk(u2) * mk(v1)) / d_src
            m10 = (a_s * mk(x1) * mk(w2) - b_s * mk(x2) * mk(w1)) / d_src
            m11 = (-a_s * mk(x1) * mk(v2) + b_s * mk(x2) * mk(v1)) / d_src
            if not all(e.is_integral() for e in (m00, m01, m10, m11)):
                continue
            if m00 * m11 - m01 * m10 != 1:
                continue
            g = GroupElement(ctx, m00, -m01, -m10, m11)
            if cusp_apply(g, s1) == t1 and cusp_apply(g, s2) == t2:
                out.append(g)
    return _dedup(out)


# ---------------------------------------------------------------------------
# elliptic fixed-point geometry (for the subdivision)


def elliptic_axis(ctx: FieldContext, g: GroupElement):
    """(centre, radius^2, chart line) of the fixed geodesic of an elliptic g.

    The axis is the semicircle over the chart line through `centre` with
    |z - centre|^2 + zeta^2 = radius^2; its boundary endpoints are the two
    fixed points of the boundary Moebius action.
    """
    tr = g.trace()
    assert tr.w == 0 and abs(tr.r) < 2, "not an elliptic element"
    assert g.c != 0, "elliptic elements in these groups have c != 0"
    tau = tr.r
    center = (g.d - g.a) / (g.c * 2)
    radius2 = (4 - tau * tau) / (4 * g.c.norm())
    ucx, ucy = g.c.chart()
    px, py = center.chart()
    # line through centre with direction (m*V, U): U*(X-px) - m*V*(Y-py) = 0
    a = ucx
    b = -ctx.m * ucy
    c = ucx * px - ctx.m * ucy * py
    return center, radius2, (a, b, c)


def _line_intersect(l1, l2):
    a1, b1, c1 = l1
    a2, b2, c2 = l2
    det = a1 * b2 - b1 * a2
    if det == 0:
        return None
    return (Fraction(c1 * b2 - b1 * c2, 1) / det, Fraction(a1 * c2 - c1 * a2, 1) / det)


def elliptic_fixed_point_on_sphere(
    ctx: FieldContext, g: GroupElement, scx: Fraction, scy: Fraction, sr2: Fraction
):
    """Fixed point of g on the hemisphere (centre, radius^2), if transverse.

    Returns (x, y, h2) chart coordinates with squared height, or None when
    the axis lies inside the hemisphere (the in-surface case).
    """
    center, radius2, axis_line = elliptic_axis(ctx, g)
    acx, acy = center.chart()
    if (acx, acy) == (scx, scy) and radius2 == sr2:
        return None
    # difference of the two sphere equations is linear
    a = 2 * (scx - acx)
    b = 2 * ctx.m * (scy - acy)
    c = (scx * scx + ctx.m * scy * scy - sr2) - (acx * acx + ctx.m * acy * acy - radius2)
    pt = _line_intersect(axis_line, (a, b, c))
    if pt is None:
        return None
    x, y = pt
    h2 = sr2 - chart_dist2(ctx, x, y, scx, scy)
    if h2 <= 0:
        return None
    fp = UhsPoint(ctx.from_chart(x, y), h2)
    img = poincare_apply(g, fp)
    if img.z != fp.z or img.h2 != fp.h2:
        return None
    return (x, y, h2)


# ---------------------------------------------------------------------------
# cells of the quotient complex


@dataclass
class VertexCell:
    point: UhsPoint
    chart: tuple[Fraction, Fraction]
    is_cusp: bool
    orbit: int = -1
    to_rep: Optional[GroupElement] = None      # cell = to_rep * rep


@dataclass
class EdgeCell:
    v1: int
    v2: int
    orbit: int = -1
    to_rep: Optional[GroupElement] = None
    ori: int = 1                               # +1: to_rep maps rep (v1,v2) in order


@dataclass
class FaceCell:
    cycle: list[int]                            # CCW vertex ids
    carrier: tuple[int, tuple[int, int]]        # (entry index, shift)
    orbit: int = -1
    to_rep: Optional[GroupElement] = None


@dataclass
class OrbitInfo:
    rep: int
    stab: list[GroupElement] = field(default_factory=list)   # finite part
    cusp_gens: Optional[tuple[GroupElement, GroupElement]] = None


@dataclass
class FloegeComplex:
    ctx: FieldContext
    verts: list[VertexCell]
    edges: list[EdgeCell]
    faces: list[FaceCell]
    vertex_orbits: list[OrbitInfo]
    edge_orbits: list[OrbitInfo]
    face_orbits: list[OrbitInfo]
    # incidence of representatives: face orbit -> [(edge orbit, conj, sign)]
    face_boundaries: dict[int, list[tuple[int, GroupElement, int]]]
    # edge orbit -> [(vertex orbit, conj, sign)] with head +1, tail -1
    edge_boundaries: dict[int, list[tuple[int, GroupElement, int]]]

    def orbit_counts(self):
        return (len(self.vertex_orbits), len(self.edge_orbits), len(self.face_orbits))

    def euler_characteristic(self) -> int:
        v, e, f = self.orbit_counts()
        return v - e + f


# ---------------------------------------------------------------------------
# building the complex


def _on_segment(a, b, p) -> bool:
    """p strictly inside the open segment (a, b), all chart points."""
    ax, ay = a
    bx, by = b
    px, py = p
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    if cross != 0:
        return False
    dot = (bx - ax) * (px - ax) + (by - ay) * (py - ay)
    if dot <= 0:
        return False
    len2 = (bx - ax) ** 2 + (by - ay) ** 2
    return dot < len2


def _translates_onto_segment(ctx, p, a, b):
    """Lattice translates of the chart point p strictly inside segment (a, b)."""
    x_lo = float(min(a[0], b[0]) - p[0]) - 0.01
    x_hi = float(max(a[0], b[0]) - p[0]) + 0.01
    y_lo = float(min(a[1], b[1]) - p[1]) - 0.01
    y_hi = float(max(a[1], b[1]) - p[1]) + 0.01
    out = []
    for (g1, g2) in _shift_range(ctx, x_lo, x_hi, y_lo, y_hi):
        sx, sy = _chart_shift(ctx, g1, g2)
        q = (p[0] + sx, p[1] + sy)
        if _on_segment(a, b, q):
            out.append(q)
    return out


@dataclass
class FaceSpec:
    carrier: tuple[int, tuple[int, int]]
    cycle: list[tuple[Fraction, Fraction]]


def planar_cell_structure(poly: PolyhedronData) -> list[FaceSpec]:
    """The intrinsic planar 2-cells: one dominance polygon per active entry.

    The polygons are the canonical dominance regions, *not* clipped to the
    fundamental rectangle: clipping would cut cells along vertical walls
    that the group does not respect, and the resulting pieces would not be
    permuted by the action.  Translation redundancy is removed instead
    (entries are unique modulo translations), and neighbouring cells meet
    each other as exact translates, which the orbit machinery identifies.

    Exact area bookkeeping across translates still re-checks the tiling.
    """
    ctx = poly.ctx
    rect = poly.rect
    total = Fraction(0)
    for idx in poly.active:
        pg = poly.polygons[idx]
        x0, x1, y0, y1 = pg.bbox()
        lo_x = float(rect.x_lo - x1)
        hi_x = float(rect.x_hi - x0)
        lo_y = float(rect.y_lo - y1)
        hi_y = float(rect.y_hi - y0)
        for (g1, g2) in _shift_range(ctx, lo_x - 0.01, hi_x + 0.01, lo_y - 0.01, hi_y + 0.01):
            sx, sy = _chart_shift(ctx, g1, g2)
            shifted = [(px + sx, py + sy) for (px, py) in pg.pts]
            clipped, _ = clip_to_box(
                shifted, [None] * len(shifted), rect.x_lo, rect.x_hi, rect.y_lo, rect.y_hi
            )
            if clipped:
                total += _shoelace(clipped)
    assert total == rect.area(), "dominance cells do not tile the plane"
    return [
        FaceSpec(carrier=(idx, (0, 0)), cycle=list(poly.polygons[idx].pts))
        for idx in poly.active
    ]


def _carrier_defect(poly: PolyhedronData, carrier, x, y) -> Fraction:
    idx, (g1, g2) = carrier
    hem = poly.entries[idx]
    sx, sy = _chart_shift(poly.ctx, g1, g2)
    return chart_dist2(poly.ctx, x, y, hem.cx + sx, hem.cy + sy) - hem.r2


def _carrier_sphere(poly: PolyhedronData, carrier):
    idx, (g1, g2) = carrier
    hem = poly.entries[idx]
    sx, sy = _chart_shift(poly.ctx, g1, g2)
    return (hem.cx + sx, hem.cy + sy, hem.r2)


class ComplexBuilder:
    """Assembles, classifies and subdivides the quotient cell complex."""

    def __init__(self, poly: PolyhedronData):
        self.poly = poly
        self.ctx = poly.ctx
        self.specs = planar_cell_structure(poly)
        self.extra_points: set[tuple[Fraction, Fraction]] = set()
        self.singular_keys = {sp.z.chart() for sp in poly.singular}
        self._ident_cache: dict = {}

    # -- identification with caching ----------------------------------------

    def _idmats(self, p: UhsPoint, q: UhsPoint) -> list[GroupElement]:
        key = (p.z.r, p.z.w, p.h2, q.z.r, q.z.w, q.h2)
        hit = self._ident_cache.get(key)
        if hit is None:
            hit = identification_matrices(self.ctx, p, q)
            self._ident_cache[key] = hit
        return hit

    # -- assembly ------------------------------------------------------------

    def _assemble(self) -> FloegeComplex:
        ctx = self.ctx
        verts: list[VertexCell] = []
        vid: dict[tuple[Fraction, Fraction], int] = {}

        def register(pt, h2) -> int:
            if pt in vid:
                v = verts[vid[pt]]
                assert v.point.h2 == h2, "inconsistent lift height at a shared corner"
                return vid[pt]
            is_cusp = h2 == 0
            if is_cusp:
                red = FundamentalRectangle(ctx).reduce_chart(*pt)[0]
                assert red in self.singular_keys, "zero-height vertex is not singular"
            cell = VertexCell(
                point=UhsPoint(ctx.from_chart(*pt), h2), chart=pt, is_cusp=is_cusp
            )
            vid[pt] = len(verts)
            verts.append(cell)
            return vid[pt]

        for spec in self.specs:
            for pt in spec.cycle:
                d = _carrier_defect(self.poly, spec.carrier, *pt)
                assert d <= 0
                register(pt, -d)
        for pt in sorted(self.extra_points):
            # split points always lie on some face boundary; height from it
            placed = False
            for spec in self.specs:
                n = len(spec.cycle)
                for i in range(n):
                    a, b = spec.cycle[i], spec.cycle[(i + 1) % n]
                    if pt == a or pt == b or _on_segment(a, b, pt):
                        d = _carrier_defect(self.poly, spec.carrier, *pt)
                        register(pt, -d)
                        placed = True
                        break
                if placed:
                    break
            assert placed, f"subdivision point {pt} lies on no face boundary"

        base_pts = list(vid.keys())

        # refine cycles: a corner of any cell (or a lattice translate of one)
        # lying inside an edge subdivides it; the neighbouring cell across
        # that edge is a translate, so both sides refine consistently
        edges: list[EdgeCell] = []
        eid: dict[tuple[int, int], int] = {}
        faces: list[FaceCell] = []

        def edge_of(i, j) -> tuple[int, int]:
            key = (min(i, j), max(i, j))
            if key not in eid:
                eid[key] = len(edges)
                edges.append(EdgeCell(v1=key[0], v2=key[1]))
            return key, eid[key]

        for spec in self.specs:
            refined: list[int] = []
            n = len(spec.cycle)
            for i in range(n):
                a, b = spec.cycle[i], spec.cycle[(i + 1) % n]
                refined.append(vid[a])
                inner = []
                for p in base_pts:
                    for q in _translates_onto_segment(ctx, p, a, b):
                        if q not in vid:
                            d = _carrier_defect(self.poly, spec.carrier, *q)
                            register(q, -d)
                        inner.append(q)
                inner = sorted(
                    set(inner),
                    key=lambda p: (p[0] - a[0]) * (b[0] - a[0])
                    + (p[1] - a[1]) * (b[1] - a[1]),
                )
                refined.extend(vid[p] for p in inner)
            faces.append(FaceCell(cycle=refined, carrier=spec.carrier))
        for f in faces:
            n = len(f.cycle)
            for i in range(n):
                edge_of(f.cycle[i], f.cycle[(i + 1) % n])

        return FloegeComplex(
            ctx=ctx,
            verts=verts,
            edges=edges,
            faces=faces,
            vertex_orbits=[],
            edge_orbits=[],
            face_orbits=[],
            face_boundaries={},
            edge_boundaries={},
        )

    # -- orbit classification -------------------------------------------------

    def _squarefree_key(self, h2: Fraction) -> int:
        n = h2.numerator * h2.denominator
        out = 1
        d = 2
        while d * d <= n:
            cnt = 0
            while n % d == 0:
                n //= d
                cnt += 1
            if cnt % 2:
                out *= d
            d += 1
        return out * n

    def _fixes_vertex(self, cx, g, vi) -> bool:
        v = cx.verts[vi]
        if v.is_cusp:
            return cusp_apply(g, v.point.z) == v.point.z
        img = poincare_apply(g, v.point)
        return img.z == v.point.z and img.h2 == v.point.h2

    def _maps_vertex(self, cx, g, a, b) -> bool:
        va, vb = cx.verts[a], cx.verts[b]
        if va.is_cusp != vb.is_cusp:
            return False
        if va.is_cusp:
            return cusp_apply(g, va.point.z) == vb.point.z
        img = poincare_apply(g, va.point)
        return img.z == vb.point.z and img.h2 == vb.point.h2

    def _maps_cell(self, cx, g, cycle, target_ids) -> bool:
        tgt = set()
        for vi in target_ids:
            v = cx.verts[vi]
            tgt.add((v.point.z.r, v.point.z.w, v.point.h2))
        for vi in cycle:
            v = cx.verts[vi]
            if v.is_cusp:
                img = cusp_apply(g, v.point.z)
                key = None if img is None else (img.r, img.w, Fraction(0))
            else:
                img = poincare_apply(g, v.point)
                key = (img.z.r, img.z.w, img.h2)
            if key not in tgt:
                return False
        return True

    def _edge_cands(self, cx, rep: EdgeCell, e: EdgeCell):
        """(g, ori) with g mapping the rep edge onto e; complete list.

        Candidates come from the complete interior-point identification
        search; an endpoint at a cusp is handled by filtering the partner
        endpoint's candidates through the boundary action.
        """
        out = []
        for (x, y, ori) in ((rep.v1, rep.v2, 1), (rep.v2, rep.v1, -1)):
            vx, vy = cx.verts[x], cx.verts[y]
            w1, w2 = cx.verts[e.v1], cx.verts[e.v2]
            if vx.is_cusp != w1.is_cusp or vy.is_cusp != w2.is_cusp:
                continue
            if vx.is_cusp and vy.is_cusp:
                for g in cusp_pair_matrices(
                    self.ctx, vx.point.z, vy.point.z, w1.point.z, w2.point.z
                ):
                    out.append((g, ori))
            elif vx.is_cusp:
                for g in self._idmats(vy.point, w2.point):
                    if cusp_apply(g, vx.point.z) == w1.point.z:
                        out.append((g, ori))
            elif vy.is_cusp:
                for g in self._idmats(vx.point, w1.point):
                    if cusp_apply(g, vy.point.z) == w2.point.z:
                        out.append((g, ori))
            else:
                other = set(self._idmats(vy.point, w2.point))
                for g in self._idmats(vx.point, w1.point):
                    if g in other:
                        out.append((g, ori))
        return out

    def _edge_stab(self, cx, e) -> list[GroupElement]:
        """Setwise stabilizer of the edge, closed under multiplication."""
        v1c, v2c = cx.verts[e.v1], cx.verts[e.v2]
        mats = []
        if v1c.is_cusp and v2c.is_cusp:
            z1, z2 = v1c.point.z, v2c.point.z
            mats.extend(cusp_pair_matrices(self.ctx, z1, z2, z1, z2))
            mats.extend(cusp_pair_matrices(self.ctx, z1, z2, z2, z1))
            return mulclose(mats)
        if v1c.is_cusp or v2c.is_cusp:
            base = e.v2 if v1c.is_cusp else e.v1
            cusp = e.v1 if v1c.is_cusp else e.v2
            for g in self._idmats(cx.verts[base].point, cx.verts[base].point):
                if self._fixes_vertex(cx, g, cusp):
                    mats.append(g)
            return mulclose(mats)
        for g in self._idmats(v1c.point, v1c.point):
            if self._fixes_vertex(cx, g, e.v2):
                mats.append(g)
        for g in self._idmats(v1c.point, v2c.point):
            if self._maps_vertex(cx, g, e.v2, e.v1):
                mats.append(g)
        return mulclose(mats)

    def _face_setwise_stab(self, cx, f) -> list[GroupElement]:
        interior = [vi for vi in f.cycle if not cx.verts[vi].is_cusp]
        assert interior, "face with no interior vertex"
        base = interior[0]
        mats = []
        for w in interior:
            for g in self._idmats(cx.verts[base].point, cx.verts[w].point):
                if self._maps_cell(cx, g, f.cycle, f.cycle):
                    mats.append(g)
        return mulclose(mats)

    def _classify(self, cx: FloegeComplex):
        ctx = self.ctx
        cx.vertex_orbits = []
        cusp_orbit_ids: list[int] = []
        interior_orbit_ids: list[int] = []
        for i, v in enumerate(cx.verts):
            if v.is_cusp:
                assigned = False
                for oi in cusp_orbit_ids:
                    rep_v = cx.verts[cx.vertex_orbits[oi].rep]
                    g = cusp_conjugator(ctx, rep_v.point.z, v.point.z)
                    if g is not None:
                        v.orbit = oi
                        v.to_rep = g
                        assigned = True
                        break
                if not assigned:
                    v.orbit = len(cx.vertex_orbits)
                    v.to_rep = GroupElement.identity(ctx)
                    lam, mu = cusp_pair(ctx, v.point.z)
                    gens = cusp_stabilizer_generators(ctx, lam, mu)
                    cx.vertex_orbits.append(OrbitInfo(rep=i, cusp_gens=gens))
                    cusp_orbit_ids.append(v.orbit)
            else:
                key = self._squarefree_key(v.point.h2)
                assigned = False
                for oi in interior_orbit_ids:
                    rep_v = cx.verts[cx.vertex_orbits[oi].rep]
                    if self._squarefree_key(rep_v.point.h2) != key:
                        continue
                    mats = self._idmats(rep_v.point, v.point)
                    if mats:
                        v.orbit = oi
                        v.to_rep = mats[0]
                        assigned = True
                        break
                if not assigned:
                    v.orbit = len(cx.vertex_orbits)
                    v.to_rep = GroupElement.identity(ctx)
                    stab = mulclose(self._idmats(v.point, v.point))
                    assert len(stab) in (2, 4, 6, 8, 12, 24), (
                        f"stabilizer order {len(stab)} at {v.chart}"
                    )
                    cx.vertex_orbits.append(OrbitInfo(rep=i, stab=stab))
                    interior_orbit_ids.append(v.orbit)

        cx.edge_orbits = []
        for i, e in enumerate(cx.edges):
            assigned = False
            for oi, info in enumerate(cx.edge_orbits):
                rep = cx.edges[info.rep]
                # cheap orbit filters before the matrix search
                rv = {cx.verts[rep.v1].orbit, cx.verts[rep.v2].orbit}
                ev = {cx.verts[e.v1].orbit, cx.verts[e.v2].orbit}
                if rv != ev:
                    continue
                cand = self._edge_cands(cx, rep, e)
                if cand:
                    g, ori = cand[0]
                    e.orbit = oi
                    e.to_rep = g
                    e.ori = ori
                    assigned = True
                    break
            if not assigned:
                e.orbit = len(cx.edge_orbits)
                e.to_rep = GroupElement.identity(ctx)
                e.ori = 1
                cx.edge_orbits.append(OrbitInfo(rep=i, stab=self._edge_stab(cx, e)))

        cx.face_orbits = []
        for i, f in enumerate(cx.faces):
            assigned = False
            for oi, info in enumerate(cx.face_orbits):
                rep = cx.faces[info.rep]
                if len(rep.cycle) != len(f.cycle):
                    continue
                rv = sorted(cx.verts[v].orbit for v in rep.cycle)
                fv = sorted(cx.verts[v].orbit for v in f.cycle)
                if rv != fv:
                    continue
                rep_interior = [v for v in rep.cycle if not cx.verts[v].is_cusp]
                base = rep_interior[0]
                found = None
                for w in f.cycle:
                    if cx.verts[w].is_cusp:
                        continue
                    for g in self._idmats(cx.verts[base].point, cx.verts[w].point):
                        if self._maps_cell(cx, g, rep.cycle, f.cycle):
                            found = g
                            break
                    if found:
                        break
                if found is not None:
                    f.orbit = oi
                    f.to_rep = found
                    assigned = True
                    break
            if not assigned:
                f.orbit = len(cx.face_orbits)
                f.to_rep = GroupElement.identity(ctx)
                cx.face_orbits.append(
                    OrbitInfo(rep=i, stab=self._face_setwise_stab(cx, f))
                )

    # -- subdivision ----------------------------------------------------------

    def _fixes_cell_pointwise(self, cx, g, cell_vids) -> bool:
        return all(self._fixes_vertex(cx, g, vi) for vi in cell_vids)

    def _subdivision_needed(self, cx):
        """(kind, orbit index, offending element) or None."""
        for oi, info in enumerate(cx.edge_orbits):
            e = cx.edges[info.rep]
            for g in info.stab:
                if not self._fixes_cell_pointwise(cx, g, [e.v1, e.v2]):
                    return ("edge", oi, g)
        for oi, info in enumerate(cx.face_orbits):
            f = cx.faces[info.rep]
            for g in info.stab:
                if not self._fixes_cell_pointwise(cx, g, f.cycle):
                    return ("face", oi, g)
        return None

    def _split_edge_orbit(self, cx, oi, g):
        info = cx.edge_orbits[oi]
        rep = cx.edges[info.rep]
        face = next(f for f in cx.faces if self._edge_in_face(f, rep.v1, rep.v2))
        scx, scy, sr2 = _carrier_sphere(self.poly, face.carrier)
        # the swapped geodesic meets the fixed axis of g in one point, whose
        # projection is the chart intersection of the two projection lines
        _center, _r2, axis_line = elliptic_axis(self.ctx, g)
        (ax, ay) = cx.verts[rep.v1].chart
        (bx, by) = cx.verts[rep.v2].chart
        edge_line = (by - ay, ax - bx, (by - ay) * ax + (ax - bx) * ay)
        pt = _line_intersect(axis_line, edge_line)
        assert pt is not None, "edge swapper axis parallel to the edge"
        x, y = pt
        h2 = sr2 - chart_dist2(self.ctx, x, y, scx, scy)
        assert h2 > 0
        fp_point = UhsPoint(self.ctx.from_chart(x, y), h2)
        img = poincare_apply(g, fp_point)
        assert img.z == fp_point.z and img.h2 == fp_point.h2, "midpoint not fixed"
        a = cx.verts[rep.v1].chart
        b = cx.verts[rep.v2].chart
        assert _on_segment(a, b, (x, y)), "fixed point off the swapped edge"
        self.extra_points.add((x, y))
        for e in cx.edges:
            if e.orbit == oi and e is not rep:
                img = poincare_apply(e.to_rep, fp_point)
                self.extra_points.add(img.z.chart())

    def _edge_in_face(self, f: FaceCell, a: int, b: int) -> bool:
        n = len(f.cycle)
        for i in range(n):
            x, y = f.cycle[i], f.cycle[(i + 1) % n]
            if {x, y} == {a, b}:
                return True
        return False

    def _split_face_orbit(self, cx, oi, g):
        """Cone the orbit's faces at the fixed point, or split along the
        fixed chord when the elliptic axis lies inside the carrier."""
        info = cx.face_orbits[oi]
        rep = cx.faces[info.rep]
        scx, scy, sr2 = _carrier_sphere(self.poly, rep.carrier)
        fp = elliptic_fixed_point_on_sphere(self.ctx, g, scx, scy, sr2)
        member_idx = [k for k, f in enumerate(cx.faces) if f.orbit == oi]
        kept = [s for k, s in enumerate(self.specs) if k not in set(member_idx)]
        new_specs = []
        if fp is not None:
            x, y, h2 = fp
            cone_pt = UhsPoint(self.ctx.from_chart(x, y), h2)
            for k in member_idx:
                f = cx.faces[k]
                if k == info.rep:
                    cpt = (x, y)
                else:
                    img = poincare_apply(f.to_rep, cone_pt)
                    cpt = img.z.chart()
                cyc = [cx.verts[vi].chart for vi in f.cycle]
                n = len(cyc)
                for i in range(n):
                    tri = [cpt, cyc[i], cyc[(i + 1) % n]]
                    if _shoelace(tri) < 0:
                        tri = [cpt, cyc[(i + 1) % n], cyc[i]]
                    assert _shoelace(tri) > 0, "degenerate cone triangle"
                    new_specs.append(FaceSpec(carrier=f.carrier, cycle=tri))
        else:
            center, radius2, line = elliptic_axis(self.ctx, g)
            rep_chord = self._chord_points(cx, rep, line)
            for k in member_idx:
                f = cx.faces[k]
                if k == info.rep:
                    fl = line
                else:
                    fl = self._transport_line(cx, f, rep_chord)
                cyc = [cx.verts[vi].chart for vi in f.cycle]
                a, b, c = fl
                side1 = self._cut_cycle(cyc, a, b, c)
                side2 = self._cut_cycle(cyc, -a, -b, -c)
                for piece in (side1, side2):
                    assert len(piece) >= 3 and _shoelace(piece) > 0, "chord split failed"
                    new_specs.append(FaceSpec(carrier=f.carrier, cycle=piece))
        self.specs = kept + new_specs

    def _transport_line(self, cx, f, rep_chord):
        """Image of the rep's chord under f.to_rep, through two moved points."""
        g = f.to_rep
        imgs = []
        for (x, y, h2) in rep_chord:
            img = poincare_apply(g, UhsPoint(self.ctx.from_chart(x, y), h2))
            imgs.append(img.z.chart())
        (x1, y1), (x2, y2) = imgs
        a = y2 - y1
        b = x1 - x2
        c = a * x1 + b * y1
        return (a, b, c)

    def _chord_points(self, cx, f, line):
        """The two boundary points where the chord line crosses the face."""
        a, b, c = line
        cyc = [cx.verts[vi].chart for vi in f.cycle]
        hits = []
        n = len(cyc)
        scx, scy, sr2 = _carrier_sphere(self.poly, f.carrier)
        for i in range(n):
            p1, p2 = cyc[i], cyc[(i + 1) % n]
            d1 = a * p1[0] + b * p1[1] - c
            d2 = a * p2[0] + b * p2[1] - c
            if d1 == 0:
                hits.append(p1)
            if (d1 < 0 < d2) or (d2 < 0 < d1):
                t = d1 / (d1 - d2)
                hits.append((p1[0] + t * (p2[0] - p1[0]), p1[1] + t * (p2[1] - p1[1])))
        uniq = []
        for h in hits:
            if h not in uniq:
                uniq.append(h)
        assert len(uniq) == 2, "chord does not cross the face in two points"
        return [
            (x, y, sr2 - chart_dist2(self.ctx, x, y, scx, scy)) for (x, y) in uniq
        ]

    def _cut_cycle(self, cyc, a, b, c):
        from .swan import cut_polygon

        pts, _labels, _ = cut_polygon(list(cyc), [None] * len(cyc), a, b, c, None)
        return pts

    # -- driver ----------------------------------------------------------------

    def build(self, max_rounds: int = 12) -> FloegeComplex:
        for _ in range(max_rounds):
            cx = self._assemble()
            self._classify(cx)
            todo = self._subdivision_needed(cx)
            if todo is None:
                self._final_checks(cx)
                self._record_boundaries(cx)
                return cx
            kind, oi, g = todo
            if kind == "edge":
                self._split_edge_orbit(cx, oi, g)
            else:
                self._split_face_orbit(cx, oi, g)
        raise RuntimeError("subdivision did not terminate")

    def _final_checks(self, cx: FloegeComplex):
        for info in cx.vertex_orbits:
            if info.cusp_gens is None:
                assert len(info.stab) in (2, 4, 6, 8, 12, 24)
        n_cusp_orbits = sum(1 for o in cx.vertex_orbits if o.cusp_gens is not None)
        classes = {sp.cls.form for sp in self.poly.singular}
        assert n_cusp_orbits == len(classes), "cusp orbits != singular classes"

    def _record_boundaries(self, cx: FloegeComplex):
        by_pair = {(e.v1, e.v2): e for e in cx.edges}
        cx.face_boundaries = {}
        for oi, info in enumerate(cx.face_orbits):
            f = cx.faces[info.rep]
            items = []
            n = len(f.cycle)
            for i in range(n):
                a, b = f.cycle[i], f.cycle[(i + 1) % n]
                key = (min(a, b), max(a, b))
                e = by_pair[key]
                # traversal a -> b against stored orientation v1 -> v2
                trav = 1 if (a, b) == (e.v1, e.v2) else -1
                sign = trav * e.ori
                items.append((e.orbit, e.to_rep, sign))
            cx.face_boundaries[oi] = items
        cx.edge_boundaries = {}
        for oi, info in enumerate(cx.edge_orbits):
            e = cx.edges[info.rep]
            items = []
            for (vi, sgn) in ((e.v2, 1), (e.v1, -1)):
                v = cx.verts[vi]
                items.append((v.orbit, v.to_rep, sgn))
            cx.edge_boundaries[oi] = items


def build_floege_complex(poly: PolyhedronData, max_rounds: int = 12) -> FloegeComplex:
    return ComplexBuilder(poly).build(max_rounds=max_rounds)
