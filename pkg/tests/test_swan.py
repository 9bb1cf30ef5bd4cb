from fractions import Fraction

import pytest

from bianchi.arith import field_context
from bianchi.geometry import FundamentalRectangle, Hemisphere
from bianchi.swan import (
    HemisphereSearch,
    cell_round,
    compute_polyhedron,
    mu_of_norm,
    next_norm_after,
    norm_values_up_to,
    singular_points,
    verify_certificate,
)
from conftest import polyhedron_for


def test_norm_values():
    ctx2 = field_context(2)
    assert norm_values_up_to(ctx2, 4) == [1, 2, 3, 4]       # j^2 + 2k^2 <= 4
    for m in (2, 5, 7, 15):
        assert norm_values_up_to(field_context(m), 3)[0] == 1
    assert 2 in norm_values_up_to(field_context(7), 4)      # attained at omega
    assert next_norm_after(ctx2, 16) == 17


def test_mu_of_norm():
    ctx = field_context(2)
    assert (1, 0) in mu_of_norm(ctx, 1)
    assert (0, 1) in mu_of_norm(ctx, 2)
    assert all(a >= 0 for (a, b) in mu_of_norm(ctx, 9))


def test_singular_points_examples():
    assert singular_points(field_context(2)) == ()
    sp5 = singular_points(field_context(5))
    assert len(sp5) == 1
    assert sp5[0].z.chart() == (Fraction(1, 2), Fraction(1, 2))   # (1+sqrt(-5))/2
    assert not sp5[0].cls.is_principal()
    sp15 = singular_points(field_context(15))
    charts = sorted(sp.z.chart() for sp in sp15)
    assert charts == [
        (Fraction(-1, 4), Fraction(1, 4)),
        (Fraction(1, 4), Fraction(1, 4)),
    ]


def test_singular_class_census_small():
    for m in (5, 6, 10, 13, 15, 23, 26, 29):
        ctx = field_context(m)
        classes = {sp.cls.form for sp in singular_points(ctx)}
        assert len(classes) == ctx.class_number - 1, m


def test_record_hemispheres_initial_and_idempotent():
    ctx = field_context(2)
    search = HemisphereSearch(ctx)
    added = search.record_hemispheres(1)
    assert added == 1                       # one unit modulo translations
    hem = search.entries[0]
    assert hem.nrm == 1
    assert FundamentalRectangle(ctx).contains_chart(hem.cx, hem.cy)
    assert search.record_hemispheres(1) == 0     # already processed: no change


def test_record_skips_dominated():
    ctx = field_context(2)
    search = HemisphereSearch(ctx)
    search.record_hemispheres(1)
    n_before = len(search.entries)
    # radius-1/sqrt(8) hemispheres centred at integers sit under the units
    added = search.record_hemispheres(8)
    centres = [search.entries[i].key() for i in range(n_before, n_before + added)]
    for (cx, cy, _n) in centres:
        assert not (cy == 0 and cx.denominator == 1)


def test_m2_polyhedron_structure(poly_m2):
    pd = poly_m2
    assert len(pd.active) == 1
    assert pd.max_mu_norm2 == 1
    assert pd.min_vertex_h2 == Fraction(1, 4)
    assert pd.min_vertex_h2 * pd.norm_cursor2 >= 1      # the exit inequality
    poly = pd.polygons[pd.active[0]]
    assert poly.area() == 1                              # tile of the translation lattice


def test_m2_vertex_set(poly_m2):
    charts = {(v.x, v.y) for v in poly_m2.vertices}
    assert (Fraction(1, 2), Fraction(1, 2)) in charts
    assert all(not v.singular for v in poly_m2.vertices)


def test_m5_singular_vertex(poly_m5):
    sing = [v for v in poly_m5.vertices if v.singular]
    assert len(sing) == 1
    assert (sing[0].x, sing[0].y) == (Fraction(1, 2), Fraction(1, 2))
    assert sing[0].h2 == 0


def test_certificates():
    for m in (2, 5, 7):
        cert = verify_certificate(polyhedron_for(m), n_random=150)
        assert cert["no_vertex_strictly_below"], m
        assert cert["min_height_clears_cursor"], m
        assert cert["random_points_covered"], m


def test_cell_round_clean_on_converged(poly_m2):
    search = poly_m2.search
    data = cell_round(search)
    assert not data.dirty
    assert data.area_ok
    assert data.wet_min_h2 == Fraction(1, 4)


def test_class_number_two_bounds():
    from fractions import Fraction as F

    for m in (5, 6, 15):
        ctx = field_context(m)
        pd = polyhedron_for(m)
        if ctx.omega_shifted:
            bound2 = F(3 * abs(ctx.disc)) ** 2
        else:
            bound2 = (F(5) + F(61, 116)) ** 2 * abs(ctx.disc) ** 2
        assert pd.max_mu_norm2 <= bound2
