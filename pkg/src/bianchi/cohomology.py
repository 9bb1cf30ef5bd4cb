"""Equivariant cohomology of the Bianchi group from the quotient complex.

The first page of the spectral sequence has, on its bottom row, one block
M^(stabilizer) per cell orbit; the differentials are signed incidence maps
composed with the action of the conjugating elements.  With no singular
cusps the second cohomology is the cokernel of the edge-to-face
differential; otherwise the cusp vertices contribute torus cohomology on
rows one and two, and the unknown rank of the second-page differential out
of the cusp row leaves an interval, optionally shrunk by the nonvanishing
conjecture or pinned exactly by an external lower bound for the dimension
of the lift subspace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .arith import FieldContext
from .cellcomplex import FloegeComplex
from .coefficients import (
    KRationalField,
    ModPField,
    coefficient_field,
    engine_for,
    good_primes,
    module_dim,
    torus_cohomology,
)


# ---------------------------------------------------------------------------
# the assembled first page


@dataclass
class EquivariantComplex:
    ctx: FieldContext
    n: int
    field: object
    vertex_dims: list[int]          # field dimensions per vertex orbit (q=0 row)
    edge_dims: list[int]
    face_dims: list[int]
    cusp_orbits: list[int]          # vertex-orbit indices with torus stabilizer
    cusp_h: list[tuple[int, int, int]]
    d0: object                      # edge-total x vertex-total
    d1: object                      # face-total x edge-total
    rank_d1: int                    # over the field

    @property
    def e1_20(self) -> int:
        return sum(self.face_dims)

    @property
    def e2_20(self) -> int:
        return self.e1_20 - self.rank_d1


def _offsets(dims: list[int]) -> list[int]:
    out = [0]
    for d in dims:
        out.append(out[-1] + d)
    return out


def build_complex(cx: FloegeComplex, n: int, fld) -> EquivariantComplex:
    """Assemble the bottom-row blocks and differentials; checks d1 d0 = 0."""
    eng = engine_for(fld)
    scale = getattr(eng, "scale", 1)
    ctx = cx.ctx

    vertex_bases = []
    cusp_orbits = []
    cusp_h = []
    for oi, info in enumerate(cx.vertex_orbits):
        if info.cusp_gens is not None:
            basis = eng.joint_kernel_basis(n, list(info.cusp_gens))
            cusp_orbits.append(oi)
            h = torus_cohomology(fld, n, *info.cusp_gens)
            cusp_h.append(h)
            assert h[0] == len(basis) // scale, "cusp H^0 mismatch"
        else:
            basis = eng.invariant_basis(n, info.stab)
        vertex_bases.append(basis)
    edge_bases = [eng.invariant_basis(n, info.stab) for info in cx.edge_orbits]
    face_bases = [eng.invariant_basis(n, info.stab) for info in cx.face_orbits]

    vdims = [len(b) for b in vertex_bases]
    edims = [len(b) for b in edge_bases]
    fdims = [len(b) for b in face_bases]
    voff, eoff, foff = _offsets(vdims), _offsets(edims), _offsets(fdims)

    modp = isinstance(fld, ModPField)

    def new_matrix(r, c):
        if modp:
            return np.zeros((r, c), dtype=np.int64)
        return [[eng.field.zero] * c for _ in range(r)]

    d0 = new_matrix(eoff[-1], voff[-1])
    for si, items in cx.edge_boundaries.items():
        b_sigma = edge_bases[si]
        for (vo, gamma, sign) in items:
            b_nu = vertex_bases[vo]
            rho = eng.action(n, gamma)
            imgs = eng.apply_to_rows(rho, b_nu)
            if modp:
                imgs = (imgs * sign) % eng.p
            else:
                imgs = [[x * sign for x in row] for row in imgs]
            coords = eng.solve_in_span(b_sigma, imgs)
            if modp:
                d0[eoff[si]:eoff[si + 1], voff[vo]:voff[vo + 1]] = (
                    d0[eoff[si]:eoff[si + 1], voff[vo]:voff[vo + 1]] + coords
                ) % eng.p
            else:
                for i in range(len(b_sigma)):
                    row = d0[eoff[si] + i]
                    for j in range(len(b_nu)):
                        row[voff[vo] + j] = row[voff[vo] + j] + coords[i][j]

    d1 = new_matrix(foff[-1], eoff[-1])
    for ti, items in cx.face_boundaries.items():
        b_tau = face_bases[ti]
        for (so, gamma, sign) in items:
            b_sigma = edge_bases[so]
            rho = eng.action(n, gamma)
            imgs = eng.apply_to_rows(rho, b_sigma)
            if modp:
                imgs = (imgs * sign) % eng.p
            else:
                imgs = [[x * sign for x in row] for row in imgs]
            coords = eng.solve_in_span(b_tau, imgs)
            if modp:
                d1[foff[ti]:foff[ti + 1], eoff[so]:eoff[so + 1]] = (
                    d1[foff[ti]:foff[ti + 1], eoff[so]:eoff[so + 1]] + coords
                ) % eng.p
            else:
                for i in range(len(b_tau)):
                    row = d1[foff[ti] + i]
                    for j in range(len(b_sigma)):
                        row[eoff[so] + j] = row[eoff[so] + j] + coords[i][j]

    # d1 o d0 = 0, exactly, in every lane
    if modp:
        prod = (d1 @ d0) % eng.p
        assert not np.any(prod), "d1 d0 != 0 (wiring bug)"
    else:
        if eoff[-1] and voff[-1] and foff[-1]:
            for i in range(foff[-1]):
                for j in range(voff[-1]):
                    s = eng.field.zero
                    for k in range(eoff[-1]):
                        if d1[i][k] and d0[k][j]:
                            s = s + d1[i][k] * d0[k][j]
                    assert not s, "d1 d0 != 0 (wiring bug)"

    rank_d1 = eng.rank(d1) // scale if foff[-1] and eoff[-1] else 0
    return EquivariantComplex(
        ctx=ctx,
        n=n,
        field=fld,
        vertex_dims=[d // scale for d in vdims],
        edge_dims=[d // scale for d in edims],
        face_dims=[d // scale for d in fdims],
        cusp_orbits=cusp_orbits,
        cusp_h=cusp_h,
        d0=d0,
        d1=d1,
        rank_d1=rank_d1,
    )


# ---------------------------------------------------------------------------
# dimension bookkeeping


@dataclass
class DimensionReport:
    m: int
    n: int
    field_kind: str                  # "K" or "F_p" / "F_p^2"
    e2_20: int
    n_singular: int
    h2_exact: Optional[int]          # set when there are no singular cusps
    h2_lower: int
    h2_upper: int
    h2_conjectural: int
    eisenstein: int
    cuspidal_exact: Optional[int]
    cuspidal_lower: int
    cuspidal_upper: int
    cuspidal_conjectural: int
    certified: Optional[str] = None  # None | "unconditional" | "under-conjecture"
    certifying_prime: Optional[int] = None
    single_face_orbit: bool = False

    def as_dict(self):
        return {
            "m": self.m,
            "n": self.n,
            "field": self.field_kind,
            "dim_E2_20": self.e2_20,
            "singular_cusps": self.n_singular,
            "dim_H2": self.h2_exact,
            "dim_H2_interval": [self.h2_lower, self.h2_upper],
            "dim_H2_conjectural": self.h2_conjectural,
            "eisenstein": self.eisenstein,
            "cuspidal": self.cuspidal_exact,
            "cuspidal_interval": [self.cuspidal_lower, self.cuspidal_upper],
            "cuspidal_conjectural": self.cuspidal_conjectural,
            "certified": self.certified,
            "certifying_prime": self.certifying_prime,
        }


def eisenstein_dimension(ctx: FieldContext, n: int) -> int:
    """h - 1 for the trivial weight, h otherwise."""
    if ctx.m in (1, 3):
        raise ValueError("excluded discriminants")
    return ctx.class_number - (1 if n == 0 else 0)


def h2_dimension(comp: EquivariantComplex) -> DimensionReport:
    ctx = comp.ctx
    e2 = comp.e2_20
    nsing = len(comp.cusp_orbits)
    for h in comp.cusp_h:
        assert h == (1, 2, 1), f"unexpected cusp cohomology {h}"
    eis = eisenstein_dimension(ctx, comp.n)
    if nsing == 0:
        h2 = e2
        lower = upper = conj = h2
        exact = h2
    else:
        # H^2 = nsing + e2 - rank(d2), rank in [0, min(2 nsing, e2)]
        upper = nsing + e2
        lower = nsing + e2 - min(2 * nsing, e2)
        conj = nsing + e2 - min(nsing, e2)
        exact = None
    if exact is not None:
        cusp_exact = exact - eis
        assert cusp_exact >= 0, "negative cuspidal dimension"
    else:
        cusp_exact = None
    report = DimensionReport(
        m=ctx.m,
        n=comp.n,
        field_kind=comp.field.describe(),
        e2_20=e2,
        n_singular=nsing,
        h2_exact=exact,
        h2_lower=lower,
        h2_upper=upper,
        h2_conjectural=conj,
        eisenstein=eis,
        cuspidal_exact=cusp_exact,
        cuspidal_lower=max(lower - eis, 0),
        cuspidal_upper=upper - eis,
        cuspidal_conjectural=max(conj - eis, 0),
        single_face_orbit=len(comp.face_dims) == 1,
    )
    assert report.cuspidal_upper >= 0, "upper bound below the Eisenstein part"
    return report


def cuspidal_dimension(report: DimensionReport):
    """Exact cuspidal dimension, or the (lower, upper) interval."""
    if report.h2_exact is not None:
        return report.cuspidal_exact
    return (report.cuspidal_lower, report.cuspidal_upper)


def cellular_h2_trivial(cx: FloegeComplex, p: Optional[int] = None) -> int:
    """Direct cellular H^2 of the quotient with constant coefficients.

    Uses only the signed incidence counts of orbit representatives, with the
    group action discarded: an independent route to the n = 0 answer.
    """
    nfo = len(cx.face_orbits)
    neo = len(cx.edge_orbits)
    inc = [[0] * neo for _ in range(nfo)]
    for ti, items in cx.face_boundaries.items():
        for (so, _gamma, sign) in items:
            inc[ti][so] += sign
    if p is None:
        rows = [[Fraction(x) for x in row] for row in inc]
        from . import linalg

        r = linalg.rank(rows)
    else:
        from . import linalg

        r = linalg.np_rank(np.array(inc, dtype=np.int64), p)
    return nfo - r


# ---------------------------------------------------------------------------
# the mod-p sweep with certification


@dataclass
class SweepResult:
    report: DimensionReport
    per_prime: list[DimensionReport] = field(default_factory=list)
    k_rational: Optional[DimensionReport] = None


def modp_sweep(
    cx: FloegeComplex,
    n: int,
    prime_cap: int = 200,
    lift_lower_bound: Optional[int] = None,
) -> SweepResult:
    """Ascending good primes; stop when an external lower bound is matched.

    With class number one the match certifies the complex dimension
    unconditionally (universal coefficients squeezes it); otherwise the
    certificate is conditional on the nonvanishing of the cusp-row
    differential.  Without a bound, or if no prime matches, the K-rational
    computation is performed directly.
    """
    ctx = cx.ctx
    eis = eisenstein_dimension(ctx, n)
    target = None if lift_lower_bound is None else lift_lower_bound + eis
    per_prime: list[DimensionReport] = []
    h1 = ctx.class_number == 1
    for p in good_primes(ctx, prime_cap):
        comp = build_complex(cx, n, coefficient_field(ctx, p))
        rep = h2_dimension(comp)
        per_prime.append(rep)
        if target is None:
            continue
        if h1 and rep.h2_exact == target:
            final = DimensionReport(**{**rep.__dict__})
            final.certified = "unconditional"
            final.certifying_prime = p
            return SweepResult(report=final, per_prime=per_prime)
        if not h1 and rep.h2_conjectural == target:
            final = DimensionReport(**{**rep.__dict__})
            final.certified = "under-conjecture"
            final.certifying_prime = p
            return SweepResult(report=final, per_prime=per_prime)
    comp = build_complex(cx, n, coefficient_field(ctx, None))
    rep = h2_dimension(comp)
    for prior in per_prime:
        if prior.h2_exact is not None and rep.h2_exact is not None:
            assert prior.h2_exact >= rep.h2_exact, (
                "mod-p dimension below the K-rational dimension"
            )
    return SweepResult(report=rep, per_prime=per_prime, k_rational=rep)
