"""Coefficient modules: symmetric powers tensored with their conjugate twist.

The weight-n module is spanned by x^a y^(n-a) (x) xbar^b ybar^(n-b) with
0 <= a, b <= n; a group element acts on the first factor through the right
substitution (x, y) -> (a*x + c*y, b*x + d*y) and on the second factor the
same way with conjugated entries, so the action matrix is the Kronecker
product of the two symmetric-power substitution matrices.

Computation fields:

  * the field K itself ("complex" dimensions computed exactly),
  * F_p for p > 3 split and unramified: omega has two mod-p images and
    conjugation swaps them,
  * F_{p^2} for p inert: conjugation is the Frobenius.  The whole module is
    companion-embedded over F_p (doubling dimensions), which keeps every
    computation in vectorised integer arithmetic; all ranks are halved on
    the way out.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

import numpy as np

from . import linalg
from .arith import FieldContext, KElem
from .cellcomplex import GroupElement


def module_dim(n: int) -> int:
    return (n + 1) * (n + 1)


# ---------------------------------------------------------------------------
# fields


class KRationalField:
    """Entries live in K itself; conjugation is the field involution."""

    kind = "K"
    p = None
    scale = 1

    def __init__(self, ctx: FieldContext):
        self.ctx = ctx
        self.zero = ctx.elem(0)
        self.one = ctx.elem(1)

    def embed(self, x: KElem, conjugate: bool) -> KElem:
        return x.conj() if conjugate else x

    def describe(self) -> str:
        return "K"


class ModPField:
    """F_p (split) or companion-embedded F_{p^2} (inert)."""

    kind = "modp"

    def __init__(self, ctx: FieldContext, p: int):
        if p <= 3 or ctx.disc % p == 0:
            raise ValueError(f"p={p} is ramified or too small for m={ctx.m}")
        self.ctx = ctx
        self.p = p
        tr, nm = ctx.tr_omega % p, ctx.nrm_omega % p
        self.tr, self.nm = tr, nm
        root = None
        for t in range(p):
            if (t * t - tr * t + nm) % p == 0:
                root = t
                break
        self.split = root is not None
        self.root = root
        self.scale = 1 if self.split else 2

    def describe(self) -> str:
        return f"F_{self.p}" if self.split else f"F_{self.p}^2"

    def _reduce_pair(self, x: KElem) -> tuple[int, int]:
        p = self.p
        r = x.r.numerator * pow(x.r.denominator, -1, p) % p
        w = x.w.numerator * pow(x.w.denominator, -1, p) % p
        return r, w

    def embed_split(self, x: KElem, conjugate: bool) -> int:
        r, w = self._reduce_pair(x)
        t = (self.tr - self.root) % self.p if conjugate else self.root
        return (r + w * t) % self.p

    def embed_inert(self, x: KElem, conjugate: bool) -> tuple[int, int]:
        r, w = self._reduce_pair(x)
        if conjugate:
            return ((r + w * self.tr) % self.p, (-w) % self.p)
        return (r, w)


def good_primes(ctx: FieldContext, cap: int) -> list[int]:
    """Primes > 3 unramified in O, ascending, up to cap."""
    out = []
    sieve = [True] * (cap + 1)
    for p in range(2, cap + 1):
        if not sieve[p]:
            continue
        for q in range(2 * p, cap + 1, p):
            sieve[q] = False
        if p > 3 and ctx.disc % p != 0:
            out.append(p)
    return out


def coefficient_field(ctx: FieldContext, p: Optional[int]):
    return KRationalField(ctx) if p is None else ModPField(ctx, p)


# ---------------------------------------------------------------------------
# symmetric-power substitution matrices


def _binomial_matrix(n, aa, bb, cc, dd, zero, one, add, mul):
    """Matrix of p(x,y) -> p(aa x + cc y, bb x + dd y) on basis x^i y^(n-i).

    Row j, column i: coefficient of x^j y^(n-j) in the image of x^i y^(n-i);
    the assignment g -> matrix is multiplicative for the matrix product.
    """
    pow1 = [[one]]
    pow2 = [[one]]
    for _ in range(n):
        last = pow1[-1]
        nxt = [zero] * (len(last) + 1)
        for i, cf in enumerate(last):
            nxt[i] = add(nxt[i], mul(cf, aa))
            nxt[i + 1] = add(nxt[i + 1], mul(cf, cc))
        pow1.append(nxt)
        last = pow2[-1]
        nxt = [zero] * (len(last) + 1)
        for i, cf in enumerate(last):
            nxt[i] = add(nxt[i], mul(cf, bb))
            nxt[i + 1] = add(nxt[i + 1], mul(cf, dd))
        pow2.append(nxt)
    cols = []
    for i in range(n + 1):
        # conv[j] = coefficient of x^(n-j) y^j in the image of x^i y^(n-i)
        conv = [zero] * (n + 1)
        for j1, c1 in enumerate(pow1[i]):
            for j2, c2 in enumerate(pow2[n - i]):
                conv[j1 + j2] = add(conv[j1 + j2], mul(c1, c2))
        cols.append(conv)
    # basis e_r = x^r y^(n-r) on both sides: entry (r, c) = cols[c][n - r]
    return [[cols[c][n - r] for c in range(n + 1)] for r in range(n + 1)]


# ---------------------------------------------------------------------------
# exact engine (K-rational lane)


class ExactEngine:
    """Block linear algebra over K with exact field elements."""

    def __init__(self, field: KRationalField):
        self.field = field
        self._action_cache: dict = {}

    # matrices are lists of rows of KElem
    def action(self, n: int, g: GroupElement):
        key = (n, g.key())
        hit = self._action_cache.get(key)
        if hit is not None:
            return hit
        f = self.field
        m1 = _binomial_matrix(
            n, f.embed(g.a, False), f.embed(g.b, False), f.embed(g.c, False),
            f.embed(g.d, False), f.zero, f.one, lambda x, y: x + y, lambda x, y: x * y,
        )
        m2 = _binomial_matrix(
            n, f.embed(g.a, True), f.embed(g.b, True), f.embed(g.c, True),
            f.embed(g.d, True), f.zero, f.one, lambda x, y: x + y, lambda x, y: x * y,
        )
        d = n + 1
        out = [[f.zero] * (d * d) for _ in range(d * d)]
        for i1 in range(d):
            for j1 in range(d):
                x = m1[i1][j1]
                if not x:
                    continue
                for i2 in range(d):
                    row = out[i1 * d + i2]
                    for j2 in range(d):
                        y = m2[i2][j2]
                        if y:
                            row[j1 * d + j2] = row[j1 * d + j2] + x * y
        self._action_cache[key] = out
        return out

    def dim(self, n: int) -> int:
        return module_dim(n)

    def identity(self, n: int):
        f = self.field
        d = module_dim(n)
        return [[f.one if i == j else f.zero for j in range(d)] for i in range(d)]

    def sub_identity(self, mat):
        out = [row[:] for row in mat]
        one = self.field.one
        for i in range(len(out)):
            out[i][i] = out[i][i] - one
        return out

    def invariant_basis(self, n: int, group: list[GroupElement]):
        f = self.field
        d = module_dim(n)
        acc = [[f.zero] * d for _ in range(d)]
        for g in group:
            mg = self.action(n, g)
            for i in range(d):
                row, mrow = acc[i], mg[i]
                for j in range(d):
                    row[j] = row[j] + mrow[j]
        invk = f.ctx.elem(Fraction(1, len(group)))
        # invariants = column space of the averaging projector
        proj_t = [[acc[j][i] * invk for j in range(d)] for i in range(d)]
        red, pivots = linalg.rref(proj_t)
        return [red[i] for i in range(len(pivots))]

    def joint_kernel_basis(self, n: int, group: list[GroupElement]):
        stacked = []
        for g in group:
            stacked.extend(self.sub_identity(self.action(n, g)))
        return linalg.nullspace(
            stacked, ncols=module_dim(n), zero=self.field.zero, one=self.field.one
        )

    def rank(self, rows) -> int:
        return linalg.rank(rows)

    def nullity(self, rows, ncols) -> int:
        return ncols - linalg.rank(rows) if rows else ncols

    def solve_in_span(self, basis_rows, targets):
        return linalg.solve_in_span(basis_rows, targets)

    def apply_to_rows(self, mat, rows):
        """Images of the given (row) vectors under the matrix."""
        out = []
        for v in rows:
            img = []
            for i in range(len(mat)):
                s = self.field.zero
                mrow = mat[i]
                for j, x in enumerate(v):
                    if x:
                        s = s + mrow[j] * x
                img.append(s)
            out.append(img)
        return out

    def is_zero_matrix(self, rows) -> bool:
        return all(not x for row in rows for x in row)


# ---------------------------------------------------------------------------
# mod-p engine (numpy lane, inert primes companion-embedded)


class ModPEngine:
    """Block linear algebra over F_p / F_{p^2} on numpy integer matrices.

    For inert p every matrix is the companion embedding of the true matrix
    over F_{p^2}; embedded ranks and dimensions are divided by two at the
    reporting boundary (`scale`).
    """

    def __init__(self, field: ModPField):
        self.field = field
        self.p = field.p
        self.scale = field.scale
        self._action_cache: dict = {}

    def dim(self, n: int) -> int:
        # embedded dimension
        return module_dim(n) * self.scale

    def _sym_np(self, n: int, g: GroupElement, conjugate: bool):
        f = self.field
        p = self.p
        if f.split:
            ent = [f.embed_split(x, conjugate) for x in (g.a, g.b, g.c, g.d)]
            rows = _binomial_matrix(
                n, *ent, 0, 1, lambda x, y: (x + y) % p, lambda x, y: (x * y) % p
            )
            return np.array(rows, dtype=np.int64)
        ent = [f.embed_inert(x, conjugate) for x in (g.a, g.b, g.c, g.d)]
        zero, one = (0, 0), (1, 0)

        def add(u, v):
            return ((u[0] + v[0]) % p, (u[1] + v[1]) % p)

        def mul(u, v):
            # theta^2 = tr*theta - nm
            return (
                (u[0] * v[0] - f.nm * u[1] * v[1]) % p,
                (u[0] * v[1] + u[1] * v[0] + f.tr * u[1] * v[1]) % p,
            )

        rows = _binomial_matrix(n, *ent, zero, one, add, mul)
        a0 = np.array([[x[0] for x in row] for row in rows], dtype=np.int64)
        a1 = np.array([[x[1] for x in row] for row in rows], dtype=np.int64)
        return (a0, a1)

    def action(self, n: int, g: GroupElement) -> np.ndarray:
        key = (n, g.key())
        hit = self._action_cache.get(key)
        if hit is not None:
            return hit
        p = self.p
        if self.field.split:
            m1 = self._sym_np(n, g, False)
            m2 = self._sym_np(n, g, True)
            out = np.kron(m1, m2) % p
        else:
            a0, a1 = self._sym_np(n, g, False)
            b0, b1 = self._sym_np(n, g, True)
            # F_{p^2} Kronecker product in coordinates, then embed
            k0 = (np.kron(a0, b0) - self.field.nm * np.kron(a1, b1)) % p
            k1 = (np.kron(a0, b1) + np.kron(a1, b0) + self.field.tr * np.kron(a1, b1)) % p
            out = self._embed(k0, k1)
        self._action_cache[key] = out
        return out

    def _embed(self, m0: np.ndarray, m1: np.ndarray) -> np.ndarray:
        """Companion embedding of m0 + m1*theta into 2x-size F_p matrices."""
        p, tr, nm = self.p, self.field.tr, self.field.nm
        d1, d2 = m0.shape
        out = np.zeros((2 * d1, 2 * d2), dtype=np.int64)
        out[0::2, 0::2] = m0
        out[0::2, 1::2] = (-nm * m1) % p
        out[1::2, 0::2] = m1
        out[1::2, 1::2] = (m0 + tr * m1) % p
        return out

    def identity(self, n: int) -> np.ndarray:
        return np.eye(self.dim(n), dtype=np.int64)

    def sub_identity(self, mat: np.ndarray) -> np.ndarray:
        out = mat.copy()
        np.fill_diagonal(out, (out.diagonal() - 1) % self.p)
        return out

    def invariant_basis(self, n: int, group: list[GroupElement]) -> np.ndarray:
        p = self.p
        acc = np.zeros((self.dim(n), self.dim(n)), dtype=np.int64)
        for g in group:
            acc = (acc + self.action(n, g)) % p
        invk = pow(len(group), -1, p)
        # invariants = column space of the averaging projector
        proj_t = (acc.T * invk) % p
        red, pivots = linalg.np_rref(proj_t, p)
        return red[: len(pivots)]

    def joint_kernel_basis(self, n: int, group: list[GroupElement]) -> np.ndarray:
        stacked = np.concatenate(
            [self.sub_identity(self.action(n, g)) for g in group], axis=0
        )
        return linalg.np_nullspace(stacked, p=self.p)

    def rank(self, mat: np.ndarray) -> int:
        if mat.size == 0:
            return 0
        return linalg.np_rank(mat, self.p)

    def solve_in_span(self, basis_rows: np.ndarray, targets: np.ndarray) -> np.ndarray:
        return linalg.np_solve_in_span(basis_rows, targets, self.p)

    def apply_to_rows(self, mat: np.ndarray, rows: np.ndarray) -> np.ndarray:
        return (rows @ mat.T) % self.p

    def is_zero_matrix(self, mat: np.ndarray) -> bool:
        return not np.any(mat % self.p)


def engine_for(field):
    return ExactEngine(field) if field.kind == "K" else ModPEngine(field)


# ---------------------------------------------------------------------------
# module-level operations (field-generic API)


def action_matrix(field, n: int, g: GroupElement):
    """Action of g on the weight-n module over the given field."""
    return engine_for(field).action(n, g)


def invariants_dimension(field, n: int, gens: list[GroupElement]) -> int:
    """dim of the fixed space of the finite group generated by gens."""
    from .cellcomplex import mulclose

    eng = engine_for(field)
    group = mulclose(gens)
    basis = eng.invariant_basis(n, group)
    return len(basis) // eng_scale(eng)


def eng_scale(eng) -> int:
    return getattr(eng, "scale", 1)


def unipotent_invariants(field, n: int, gens: list[GroupElement]):
    """Basis of the joint fixed space of translation-type generators.

    Returned in the engine's representation; its length divided by the
    engine scale is the dimension over the field.
    """
    eng = engine_for(field)
    return eng.joint_kernel_basis(n, gens)


def torus_cohomology(field, n: int, g1: GroupElement, g2: GroupElement):
    """(dim H^0, dim H^1, dim H^2) for the free abelian rank-2 stabilizer.

    Koszul complex of the commuting operators A - 1 and B - 1:
    v -> (Av, Bv) and (x, y) -> Bx - Ay.
    """
    assert g1 * g2 == g2 * g1, "generators must commute"
    eng = engine_for(field)
    a = eng.sub_identity(eng.action(n, g1))
    b = eng.sub_identity(eng.action(n, g2))
    d = eng.dim(n)
    if isinstance(eng, ModPEngine):
        d0 = np.concatenate([a, b], axis=0)
        d1 = np.concatenate([b, (-a) % eng.p], axis=1)
        r0, r1 = eng.rank(d0), eng.rank(d1)
    else:
        d0 = [row[:] for row in a] + [row[:] for row in b]
        d1 = [b[i][:] + [-x for x in a[i]] for i in range(d)]
        r0, r1 = eng.rank(d0), eng.rank(d1)
    s = eng_scale(eng)
    h0 = (d - r0) // s
    h2 = (d - r1) // s
    h1 = ((2 * d - r1) - r0) // s
    return (h0, h1, h2)
