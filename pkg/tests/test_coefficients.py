import random
from fractions import Fraction

import numpy as np
import pytest

from bianchi.arith import field_context
from bianchi.cellcomplex import (
    GroupElement,
    cusp_stabilizer_generators,
    mulclose,
    translation_matrix,
)
from bianchi.coefficients import (
    ModPField,
    coefficient_field,
    engine_for,
    good_primes,
    module_dim,
    torus_cohomology,
    unipotent_invariants,
)

CTX2 = field_context(2)
S_MAT = GroupElement.from_pairs(CTX2, (0, 0), (-1, 0), (1, 0), (0, 0))
T_MAT = GroupElement.from_pairs(CTX2, (1, 0), (1, 0), (0, 0), (1, 0))
W_MAT = GroupElement.from_pairs(CTX2, (1, 0), (0, 1), (0, 0), (1, 0))


def rand_element(ctx, rng, length=4):
    gens = [S_MAT, T_MAT, W_MAT]
    g = GroupElement.identity(ctx)
    for _ in range(length):
        h = rng.choice(gens)
        g = g * (h if rng.random() < 0.5 else h.inv())
    return g


def test_identity_and_center_act_trivially():
    for p in (None, 5, 13):
        fld = coefficient_field(CTX2, p)
        eng = engine_for(fld)
        for n in (0, 1, 3):
            ident = eng.identity(n)
            got_i = eng.action(n, GroupElement.identity(CTX2))
            got_m = eng.action(n, -GroupElement.identity(CTX2))
            if p is None:
                assert got_i == ident and got_m == ident
            else:
                assert np.array_equal(got_i % p, ident % p)
                assert np.array_equal(got_m % p, ident % p)


def test_homomorphism_mod_p():
    rng = random.Random(1)
    for p in (5, 7, 11):          # mixes split and inert behaviour
        fld = coefficient_field(CTX2, p)
        eng = engine_for(fld)
        for _ in range(25):
            g, h = rand_element(CTX2, rng), rand_element(CTX2, rng)
            lhs = eng.action(2, g * h)
            rhs = (eng.action(2, g) @ eng.action(2, h)) % p
            assert np.array_equal(lhs % p, rhs)


def test_homomorphism_exact():
    rng = random.Random(2)
    eng = engine_for(coefficient_field(CTX2, None))
    for _ in range(8):
        g, h = rand_element(CTX2, rng), rand_element(CTX2, rng)
        mg, mh = eng.action(1, g), eng.action(1, h)
        prod = [
            [
                sum((mg[i][k] * mh[k][j] for k in range(4)), CTX2.elem(0))
                for j in range(4)
            ]
            for i in range(4)
        ]
        assert prod == eng.action(1, g * h)


def test_rational_entry_elements_ignore_the_twist():
    """Conjugation fixes Q, so integer matrices act by the plain square."""
    eng = engine_for(coefficient_field(CTX2, None))
    g = GroupElement.from_pairs(CTX2, (1, 0), (2, 0), (1, 0), (3, 0))
    from bianchi.coefficients import _binomial_matrix

    f = eng.field
    plain = _binomial_matrix(
        2, f.embed(g.a, False), f.embed(g.b, False), f.embed(g.c, False),
        f.embed(g.d, False), f.zero, f.one, lambda x, y: x + y, lambda x, y: x * y,
    )
    twisted = _binomial_matrix(
        2, f.embed(g.a, True), f.embed(g.b, True), f.embed(g.c, True),
        f.embed(g.d, True), f.zero, f.one, lambda x, y: x + y, lambda x, y: x * y,
    )
    assert plain == twisted


def test_unipotent_invariants_dimensions():
    gens = [translation_matrix(CTX2, CTX2.elem(1)),
            translation_matrix(CTX2, CTX2.omega())]
    fld = coefficient_field(CTX2, None)
    assert len(unipotent_invariants(fld, 0, gens)) == 1
    for n in (1, 2, 3):
        basis = unipotent_invariants(fld, n, gens)
        assert len(basis) == 1
        vec = basis[0]
        support = [i for i, x in enumerate(vec) if x]
        assert support == [(n + 1) * (n + 1) - 1]        # the (n, n) basis vector
    # a single generic translation leaves a 2-dimensional space at weight 1
    single = [translation_matrix(CTX2, CTX2.elem(1, 1))]
    assert len(unipotent_invariants(fld, 1, single)) == 2


def test_invariants_projector_vs_kernel():
    group = mulclose([S_MAT])
    assert len(group) == 4
    for p in (None, 13):
        fld = coefficient_field(CTX2, p)
        eng = engine_for(fld)
        scale = getattr(eng, "scale", 1)
        basis = eng.invariant_basis(2, group)
        kernel = eng.joint_kernel_basis(2, group)
        assert len(basis) == len(kernel)
        assert len(basis) % scale == 0
    # trivial group and +-1 fix everything
    fld = coefficient_field(CTX2, None)
    eng = engine_for(fld)
    assert len(eng.invariant_basis(2, [GroupElement.identity(CTX2)])) == module_dim(2)
    pm = mulclose([-GroupElement.identity(CTX2)])
    assert len(eng.invariant_basis(2, pm)) == module_dim(2)


def test_projector_idempotent_mod_p():
    group = mulclose([S_MAT])
    p = 13
    eng = engine_for(coefficient_field(CTX2, p))
    acc = 0
    for g in group:
        acc = acc + eng.action(2, g)
    proj = (acc * pow(len(group), -1, p)) % p
    assert np.array_equal((proj @ proj) % p, proj)


def test_torus_cohomology():
    ctx5 = field_context(5)
    g1, g2 = cusp_stabilizer_generators(ctx5, (1, 1), (2, 0))
    for p in (None, 7, 11):
        fld = coefficient_field(ctx5, p)
        for n in (0, 1, 2):
            h = torus_cohomology(fld, n, g1, g2)
            assert h == (1, 2, 1)
            assert h[0] - h[1] + h[2] == 0
    # the translation pair at the unramified cusp gives the same picture
    gens = [translation_matrix(CTX2, CTX2.elem(1)),
            translation_matrix(CTX2, CTX2.omega())]
    assert torus_cohomology(coefficient_field(CTX2, None), 2, *gens) == (1, 2, 1)


def test_torus_rejects_noncommuting():
    with pytest.raises(AssertionError):
        torus_cohomology(coefficient_field(CTX2, None), 1, S_MAT, T_MAT)


def test_invariant_dims_mod_p_at_least_exact():
    group = mulclose([S_MAT])
    exact = len(engine_for(coefficient_field(CTX2, None)).invariant_basis(3, group))
    for p in good_primes(CTX2, 40):
        eng = engine_for(coefficient_field(CTX2, p))
        dim_p = len(eng.invariant_basis(3, group)) // eng.scale
        assert dim_p >= exact


def test_bad_primes_rejected():
    with pytest.raises(ValueError):
        ModPField(CTX2, 2)
    with pytest.raises(ValueError):
        ModPField(field_context(5), 5)
    with pytest.raises(ValueError):
        ModPField(CTX2, 3)
