import random
from fractions import Fraction

import pytest

from bianchi.arith import KElem, field_context
from bianchi.cellcomplex import (
    ComplexBuilder,
    GroupElement,
    cusp_apply,
    cusp_conjugator,
    cusp_pair_matrices,
    cusp_stabilizer_generators,
    identification_matrices,
    mulclose,
    point_stabilizer,
    poincare_apply,
    translation_matrix,
)
from bianchi.geometry import UhsPoint
from conftest import complex_for, polyhedron_for

CTX2 = field_context(2)
S_MAT = GroupElement.from_pairs(CTX2, (0, 0), (-1, 0), (1, 0), (0, 0))
T_MAT = GroupElement.from_pairs(CTX2, (1, 0), (1, 0), (0, 0), (1, 0))
W_MAT = GroupElement.from_pairs(CTX2, (1, 0), (0, 1), (0, 0), (1, 0))


def rand_point(ctx, rng):
    z = KElem(
        ctx,
        Fraction(rng.randint(-6, 6), rng.randint(1, 4)),
        Fraction(rng.randint(-6, 6), rng.randint(1, 4)),
    )
    return UhsPoint(z, Fraction(rng.randint(1, 9), rng.randint(1, 5)))


def rand_element(ctx, rng, length=5):
    gens = [S_MAT, T_MAT, W_MAT]
    g = GroupElement.identity(ctx)
    for _ in range(length):
        h = rng.choice(gens)
        g = g * (h if rng.random() < 0.5 else h.inv())
    return g


def test_action_examples():
    p = UhsPoint(CTX2.elem(Fraction(1, 3), Fraction(2, 5)), Fraction(7, 4))
    assert poincare_apply(GroupElement.identity(CTX2), p) == p
    # (1 1; 0 1) translates by -1 in the displayed operation formula
    q = poincare_apply(T_MAT, p)
    assert q.z == p.z - 1 and q.h2 == p.h2
    # the standard order-4 element fixes the point over 0 at height 1
    fix = UhsPoint(CTX2.elem(0), Fraction(1))
    img = poincare_apply(S_MAT, fix)
    assert img.z == fix.z and img.h2 == fix.h2


def test_action_is_group_action():
    rng = random.Random(11)
    for _ in range(40):
        g, h = rand_element(CTX2, rng), rand_element(CTX2, rng)
        p = rand_point(CTX2, rng)
        lhs = poincare_apply(g * h, p)
        rhs = poincare_apply(g, poincare_apply(h, p))
        assert lhs.z == rhs.z and lhs.h2 == rhs.h2
        assert rhs.h2 > 0 and rhs.h2.denominator >= 1   # rational squared heights


def test_identification_examples():
    p = UhsPoint(CTX2.elem(0), Fraction(1))
    mats = identification_matrices(CTX2, p, p)
    assert GroupElement.identity(CTX2) in mats
    assert -GroupElement.identity(CTX2) in mats
    assert S_MAT in mats
    # points in different orbits: no solutions survive verification
    q = UhsPoint(CTX2.elem(0), Fraction(2))
    assert identification_matrices(CTX2, p, q) == []
    # heights too large for c != 0 and a non-integral translation
    p2 = UhsPoint(CTX2.elem(0), Fraction(2))
    q2 = UhsPoint(CTX2.elem(Fraction(1, 2)), Fraction(2))
    assert identification_matrices(CTX2, p2, q2) == []


def test_identification_complete_on_random_pairs():
    rng = random.Random(5)
    for m in (2, 7):
        ctx = field_context(m)
        s = GroupElement.from_pairs(ctx, (0, 0), (-1, 0), (1, 0), (0, 0))
        t = GroupElement.from_pairs(ctx, (1, 0), (1, 0), (0, 0), (1, 0))
        w = GroupElement.from_pairs(ctx, (1, 0), (0, 1), (0, 0), (1, 0))
        for _ in range(25):
            g = GroupElement.identity(ctx)
            for _ in range(rng.randint(1, 5)):
                h = rng.choice([s, t, w])
                g = g * (h if rng.random() < 0.5 else h.inv())
            p = rand_point(ctx, rng)
            q = poincare_apply(g, p)
            assert g in identification_matrices(ctx, p, q)


def test_identification_closed_under_inverse():
    rng = random.Random(3)
    p, q = rand_point(CTX2, rng), None
    g = rand_element(CTX2, rng)
    q = poincare_apply(g, p)
    fwd = identification_matrices(CTX2, p, q)
    bwd = identification_matrices(CTX2, q, p)
    assert {x.key() for x in fwd} == {x.inv().key() for x in bwd}


def test_stabilizers():
    rng = random.Random(9)
    generic = UhsPoint(CTX2.elem(Fraction(1, 7), Fraction(1, 9)), Fraction(5, 11))
    stab = point_stabilizer(CTX2, generic)
    assert len(stab) == 2                                     # just +-1
    corner = UhsPoint(CTX2.elem(0), Fraction(1))
    group = mulclose(point_stabilizer(CTX2, corner))
    assert len(group) == 4
    assert S_MAT in group


def test_cusp_stabilizer_m5():
    ctx = field_context(5)
    g1, g2 = cusp_stabilizer_generators(ctx, (1, 1), (2, 0))
    cusp = ctx.elem(Fraction(1, 2), Fraction(1, 2))
    for g in (g1, g2):
        assert g.trace() == 2                                 # unipotent
        assert cusp_apply(g, cusp) == cusp
    assert g1 * g2 == g2 * g1
    # the two generators are independent translations of the horosphere
    assert g1.b != g2.b and g1.c != g2.c or g1.a != g2.a


def test_cusp_conjugator_same_and_different_class():
    ctx15 = field_context(15)
    z1 = ctx15.from_chart(Fraction(-1, 4), Fraction(1, 4))
    z2 = ctx15.from_chart(Fraction(1, 4), Fraction(1, 4))
    g = cusp_conjugator(ctx15, z1, z2)
    assert g is not None
    assert cusp_apply(g, z1) == z2
    ctx23 = field_context(23)
    from bianchi.swan import singular_points

    sp = singular_points(ctx23)
    assert len(sp) == 2 and sp[0].cls.form != sp[1].cls.form
    assert cusp_conjugator(ctx23, sp[0].z, sp[1].z) is None


def test_cusp_pair_matrices_m15(complex_m5):
    ctx = field_context(15)
    z1 = ctx.from_chart(Fraction(-1, 4), Fraction(1, 4))
    z2 = ctx.from_chart(Fraction(1, 4), Fraction(1, 4))
    mats = cusp_pair_matrices(ctx, z1, z2, z1, z2)
    # the ordered pair stabilizer is +-1
    assert {m.key() for m in mats} <= {
        GroupElement.identity(ctx).key(), (-GroupElement.identity(ctx)).key()
    }


def test_complex_invariants():
    for m in (2, 5, 7, 15):
        ctx = field_context(m)
        cx = complex_for(m)
        cusps = [o for o in cx.vertex_orbits if o.cusp_gens is not None]
        assert len(cusps) == ctx.class_number - 1
        for o in cx.vertex_orbits:
            if o.cusp_gens is None:
                assert len(o.stab) in (2, 4, 6, 8, 12, 24)
        for o in cx.edge_orbits + cx.face_orbits:
            assert len(o.stab) in (2, 4, 6, 8, 12, 24)


def test_subdivision_postcondition():
    for m in (2, 7, 11):
        cx = complex_for(m)
        builder_checks = 0
        for info in cx.edge_orbits:
            e = cx.edges[info.rep]
            for g in info.stab:
                for vi in (e.v1, e.v2):
                    v = cx.verts[vi]
                    img = poincare_apply(g, v.point)
                    assert img.z == v.point.z and img.h2 == v.point.h2
                    builder_checks += 1
        for info in cx.face_orbits:
            f = cx.faces[info.rep]
            for g in info.stab:
                for vi in f.cycle:
                    v = cx.verts[vi]
                    if v.is_cusp:
                        assert cusp_apply(g, v.point.z) == v.point.z
                    else:
                        img = poincare_apply(g, v.point)
                        assert img.z == v.point.z and img.h2 == v.point.h2
                    builder_checks += 1
        assert builder_checks > 0


def test_identifications_verified():
    """Every recorded conjugator really maps the orbit representative over."""
    cx = complex_for(5)
    for v in cx.verts:
        rep = cx.verts[cx.vertex_orbits[v.orbit].rep]
        if v.is_cusp:
            assert cusp_apply(v.to_rep, rep.point.z) == v.point.z
        else:
            img = poincare_apply(v.to_rep, rep.point)
            assert img.z == v.point.z and img.h2 == v.point.h2


def test_euler_characteristic_stable_under_subdivision(poly_m2):
    cx = complex_for(2)
    chi = cx.euler_characteristic()
    builder = ComplexBuilder(poly_m2)
    # split one edge artificially at an interior point of a face boundary
    spec = builder.specs[0]
    a, b = spec.cycle[0], spec.cycle[1]
    mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    builder.extra_points.add(mid)
    cx2 = builder.build()
    assert cx2.euler_characteristic() == chi


def test_cellular_boundary_squares_to_zero():
    import numpy as np

    for m in (2, 5, 15):
        cx = complex_for(m)
        nv = len(cx.vertex_orbits)
        ne = len(cx.edge_orbits)
        nf = len(cx.face_orbits)
        d0 = np.zeros((ne, nv), dtype=int)
        for si, items in cx.edge_boundaries.items():
            for (vo, _g, sign) in items:
                d0[si, vo] += sign
        d1 = np.zeros((nf, ne), dtype=int)
        for ti, items in cx.face_boundaries.items():
            for (so, _g, sign) in items:
                d1[ti, so] += sign
        assert not (d1 @ d0).any()
