"""Exact arithmetic in imaginary quadratic fields K = Q(sqrt(-m)).

Everything downstream (hemisphere geometry, Swan's search, the group
action on upper half-space) reduces to computations with elements
r + w*omega where omega is the standard integral generator

    omega = sqrt(-m)              if m = 1, 2 mod 4,
    omega = (-1 + sqrt(-m)) / 2   if m = 3 mod 4,

with r, w rational.  All heights and radii are carried squared, so no
irrational number is ever materialised: every comparison made anywhere
in the pipeline is a comparison of rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional


def is_squarefree(n: int) -> bool:
    if n <= 0:
        return False
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# rational square roots


def rational_sqrt_if_square(q) -> Optional[Fraction]:
    """Exact nonnegative square root of q, or None if q is not a rational square."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative argument")
    num, den = q.numerator, q.denominator
    rn = math.isqrt(num)
    if rn * rn != num:
        return None
    rd = math.isqrt(den)
    if rd * rd != den:
        return None
    return Fraction(rn, rd)


def floor_sqrt(q) -> int:
    """Largest integer n >= 0 with n*n <= q (q >= 0 rational)."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative argument")
    # floor(sqrt(p/d)) = floor(sqrt(p*d)/d) = isqrt(p*d) // d
    return math.isqrt(q.numerator * q.denominator) // q.denominator


def ceil_sqrt(q) -> int:
    """Smallest integer n >= 0 with n*n >= q (q >= 0 rational)."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative argument")
    s = floor_sqrt(q)
    return s if s * s >= q else s + 1


def floor_mixed_sqrt(b: Fraction, sign: int, d: Fraction, a: Fraction) -> int:
    """floor((b + sign*sqrt(d)) / a) computed exactly, for d >= 0, a > 0."""
    assert sign in (1, -1) and d >= 0 and a > 0
    # n <= (b + s*sqrt(d))/a  <=>  a*n - b <= s*sqrt(d)
    def ok(n: int) -> bool:
        lhs = a * n - b
        if sign == 1:
            return lhs <= 0 or lhs * lhs <= d
        return lhs <= 0 and lhs * lhs >= d

    # float guess, then walk; the exact predicate makes the result exact
    try:
        guess = int((float(b) + sign * math.sqrt(float(d))) / float(a))
    except (OverflowError, ValueError):
        guess = 0
    while not ok(guess):
        guess -= 1
    while ok(guess + 1):
        guess += 1
    return guess


def ceil_mixed_sqrt(b: Fraction, sign: int, d: Fraction, a: Fraction) -> int:
    """ceil((b + sign*sqrt(d)) / a) computed exactly, for d >= 0, a > 0."""
    return -floor_mixed_sqrt(-b, -sign, d, a)


# ---------------------------------------------------------------------------
# binary quadratic forms (positive definite, used for the class group)


def reduce_form(a: int, b: int, c: int) -> tuple[int, int, int]:
    """Reduce a positive definite integral form a*x^2 + b*xy + c*y^2."""
    assert a > 0 and b * b - 4 * a * c < 0
    while True:
        if not (-a < b <= a):
            r = (a - b) // (2 * a)
            b, c = b + 2 * r * a, a * r * r + b * r + c
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return (a, b, c)


def reduced_forms(disc: int) -> tuple[tuple[int, int, int], ...]:
    """All reduced primitive positive definite forms of the given discriminant."""
    assert disc < 0 and disc % 4 in (0, 1)
    out = []
    amax = math.isqrt(-disc // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - disc) % (4 * a) != 0:
                continue
            c = (b * b - disc) // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            out.append((a, b, c))
    return tuple(sorted(out))


def principal_form(disc: int) -> tuple[int, int, int]:
    b = disc % 2
    return (1, b, (b * b - disc) // 4)


# ---------------------------------------------------------------------------
# field context


@dataclass(frozen=True)
class FieldContext:
    """The field Q(sqrt(-m)) with its ring of integers Z[omega].

    omega satisfies omega^2 = -nrm_omega + tr_omega * omega, i.e. it is a
    root of X^2 - tr_omega*X + nrm_omega.
    """

    m: int
    omega_shifted: bool          # True iff m = 3 mod 4
    disc: int
    tr_omega: int                # 0, or -1 in the shifted case
    nrm_omega: int               # m, or (m+1)//4 in the shifted case
    class_number: int
    class_group: tuple[tuple[int, int, int], ...]

    def elem(self, r, w=0) -> "KElem":
        return KElem(self, Fraction(r), Fraction(w))

    def omega(self) -> "KElem":
        return self.elem(0, 1)

    def from_chart(self, x, y) -> "KElem":
        """Element X + Y*sqrt(-m) from its chart coordinates."""
        x, y = Fraction(x), Fraction(y)
        if self.omega_shifted:
            return KElem(self, x + y, 2 * y)
        return KElem(self, x, y)

    def __repr__(self) -> str:
        return f"FieldContext(m={self.m})"


@lru_cache(maxsize=None)
def field_context(m: int) -> FieldContext:
    """Context for Q(sqrt(-m)); rejects non-squarefree m and m in {1, 3}."""
    if m in (1, 3):
        raise ValueError(f"m={m} is excluded (extra units in the ring of integers)")
    if m < 2 or not is_squarefree(m):
        raise ValueError(f"m={m} must be a squarefree integer >= 2")
    shifted = m % 4 == 3
    disc = -m if shifted else -4 * m
    forms = reduced_forms(disc)
    return FieldContext(
        m=m,
        omega_shifted=shifted,
        disc=disc,
        tr_omega=-1 if shifted else 0,
        nrm_omega=(m + 1) // 4 if shifted else m,
        class_number=len(forms),
        class_group=forms,
    )


# ---------------------------------------------------------------------------
# field elements


@dataclass(frozen=True)
class KElem:
    """The element r + w*omega of K, with exact rational coordinates."""

    ctx: FieldContext
    r: Fraction
    w: Fraction

    # -- ring structure ----------------------------------------------------

    def __add__(self, other) -> "KElem":
        other = self._coerce(other)
        return KElem(self.ctx, self.r + other.r, self.w + other.w)

    def __sub__(self, other) -> "KElem":
        other = self._coerce(other)
        return KElem(self.ctx, self.r - other.r, self.w - other.w)

    def __neg__(self) -> "KElem":
        return KElem(self.ctx, -self.r, -self.w)

    def __mul__(self, other) -> "KElem":
        other = self._coerce(other)
        q, t = self.ctx.nrm_omega, self.ctx.tr_omega
        r1, w1, r2, w2 = self.r, self.w, other.r, other.w
        return KElem(
            self.ctx,
            r1 * r2 - q * w1 * w2,
            r1 * w2 + w1 * r2 + t * w1 * w2,
        )

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other) -> "KElem":
        return self._coerce(other) - self

    def __truediv__(self, other) -> "KElem":
        other = self._coerce(other)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in K")
        num = self * other.conj()
        return KElem(self.ctx, num.r / n, num.w / n)

    def inv(self) -> "KElem":
        return KElem(self.ctx, Fraction(1), Fraction(0)) / self

    def _coerce(self, other) -> "KElem":
        if isinstance(other, KElem):
            assert other.ctx.m == self.ctx.m
            return other
        return KElem(self.ctx, Fraction(other), Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.w == 0 and self.r == other
        return (
            isinstance(other, KElem)
            and self.ctx.m == other.ctx.m
            and self.r == other.r
            and self.w == other.w
        )

    def __hash__(self):
        return hash((self.ctx.m, self.r, self.w))

    def __bool__(self) -> bool:
        return self.r != 0 or self.w != 0

    # -- field-theoretic operations ----------------------------------------

    def conj(self) -> "KElem":
        """Complex conjugate; the nontrivial automorphism of K over Q."""
        t = self.ctx.tr_omega
        return KElem(self.ctx, self.r + self.w * t, -self.w)

    def norm(self) -> Fraction:
        """|z|^2 = z * conj(z), a nonnegative rational."""
        q, t = self.ctx.nrm_omega, self.ctx.tr_omega
        return self.r * self.r + t * self.r * self.w + q * self.w * self.w

    def trace(self) -> Fraction:
        return 2 * self.r + self.ctx.tr_omega * self.w

    def chart(self) -> tuple[Fraction, Fraction]:
        """Coordinates (X, Y) with z = X + Y*sqrt(-m)."""
        if self.ctx.omega_shifted:
            return (self.r - self.w / 2, self.w / 2)
        return (self.r, self.w)

    def is_integral(self) -> bool:
        return self.r.denominator == 1 and self.w.denominator == 1

    def as_pair(self) -> tuple[int, int]:
        """Integer coordinates in the basis {1, omega}; requires integrality."""
        if not self.is_integral():
            raise ValueError(f"{self} is not in the ring of integers")
        return (int(self.r), int(self.w))

    def __repr__(self) -> str:
        return f"({self.r}+{self.w}w)"


def norm(c: KElem, ctx: FieldContext | None = None) -> Fraction:
    return c.norm()


def conj(c: KElem) -> KElem:
    return c.conj()


# ---------------------------------------------------------------------------
# integer-pair layer (hot loops in the hemisphere search avoid Fraction)


def pair_norm(ctx: FieldContext, a: int, b: int) -> int:
    """Norm of a + b*omega for integers a, b."""
    return a * a + ctx.tr_omega * a * b + ctx.nrm_omega * b * b


def pair_conj(ctx: FieldContext, a: int, b: int) -> tuple[int, int]:
    return (a + ctx.tr_omega * b, -b)


def pair_mul(ctx: FieldContext, a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    q, t = ctx.nrm_omega, ctx.tr_omega
    return (a[0] * b[0] - q * a[1] * b[1], a[0] * b[1] + a[1] * b[0] + t * a[1] * b[1])


def pair_sub(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    return (a[0] - b[0], a[1] - b[1])


# ---------------------------------------------------------------------------
# ideals: Hermite normal form of the Z-module spanned by O-multiples


def _hnf_of_vectors(vectors: list[tuple[int, int]]) -> tuple[int, int, int]:
    """HNF basis {A, B + C*omega} of the Z-span of (u, v) vectors.

    The vectors are coordinates in the basis {1, omega} and the span must
    have full rank.  Returns (A, B, C) with A, C > 0 and 0 <= B < A.
    """
    uc, c = 0, 0
    rest: list[int] = []
    for (u, v) in vectors:
        if v == 0:
            if u:
                rest.append(u)
            continue
        if c == 0:
            uc, c = u, v
            continue
        g, x, y = _xgcd(c, v)
        # unimodular column operation: keep a generator with omega-part g
        # and a leftover with omega-part 0; the Z-span is unchanged
        rest.append((c // g) * u - (v // g) * uc)
        uc, c = x * uc + y * u, g
    if c == 0:
        raise ValueError("module has rank < 2")
    if c < 0:
        uc, c = -uc, -c
    a = 0
    for u in rest:
        a = math.gcd(a, u)
    if a == 0:
        raise ValueError("module has rank < 2")
    b = uc % a
    return (a, b, c)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """g, x, y with x*a + y*b = g = gcd(a, b), g > 0 (for (a,b) != (0,0))."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def ideal_hnf(ctx: FieldContext, gens: Iterable[tuple[int, int]]) -> tuple[int, int, int]:
    """HNF (A, B, C) of the O-ideal generated by the given integral elements."""
    q, t = ctx.nrm_omega, ctx.tr_omega
    vectors = []
    for (a, b) in gens:
        if a == 0 and b == 0:
            continue
        vectors.append((a, b))
        # (a + b*omega) * omega = -q*b + (a + t*b) * omega
        vectors.append((-q * b, a + t * b))
    if not vectors:
        raise ValueError("zero ideal")
    return _hnf_of_vectors(vectors)


def ideal_norm(ctx: FieldContext, gens: Iterable[tuple[int, int]]) -> int:
    a, _b, c = ideal_hnf(ctx, gens)
    return a * c


def is_unimodular(ctx: FieldContext, mu: KElem | tuple[int, int], lam: KElem | tuple[int, int]) -> bool:
    """True iff mu*O + lam*O = O, decided by the HNF determinant."""
    mu_p = mu.as_pair() if isinstance(mu, KElem) else mu
    lam_p = lam.as_pair() if isinstance(lam, KElem) else lam
    if mu_p == (0, 0) and lam_p == (0, 0):
        raise ValueError("the pair (0, 0) generates the zero ideal")
    return ideal_norm(ctx, [mu_p, lam_p]) == 1


@dataclass(frozen=True)
class IdealClass:
    """An ideal class, represented by its reduced binary quadratic form."""

    form: tuple[int, int, int]

    def is_principal(self) -> bool:
        a, b, c = self.form
        return a == 1


def class_of_hnf(ctx: FieldContext, hnf: tuple[int, int, int]) -> IdealClass:
    a, b, c = hnf
    assert a % c == 0 and b % c == 0, "not an O-stable module"
    a0, b0 = a // c, b // c
    t, q = ctx.tr_omega, ctx.nrm_omega
    # the norm form of the primitive ideal a0*Z + (b0 + omega)*Z
    n_second = b0 * b0 + t * b0 + q
    assert n_second % a0 == 0
    form = reduce_form(a0, 2 * b0 + t, n_second // a0)
    return IdealClass(form)


def ideal_class(ctx: FieldContext, lam: KElem | tuple[int, int], mu: KElem | tuple[int, int]) -> IdealClass:
    """Class of the ideal (lam, mu); principal iff the cusp lam/mu is principal."""
    lam_p = lam.as_pair() if isinstance(lam, KElem) else lam
    mu_p = mu.as_pair() if isinstance(mu, KElem) else mu
    return class_of_hnf(ctx, ideal_hnf(ctx, [lam_p, mu_p]))


def cusp_is_singular(ctx: FieldContext, z: KElem) -> bool:
    """True iff the cusp z in K has nonprincipal pair ideal (lam, mu)."""
    den = (z.r.denominator * z.w.denominator) // math.gcd(
        z.r.denominator, z.w.denominator
    )
    lam = (int(z.r * den), int(z.w * den))
    return not ideal_class(ctx, lam, (den, 0)).is_principal()
