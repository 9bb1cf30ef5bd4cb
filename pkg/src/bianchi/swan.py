"""Search for the finite hemisphere list determining the Bianchi fundamental
polyhedron, with an exact termination certificate.

The search records hemispheres in bands of increasing |mu|^2, pruning
everything that sits everywhere below an already recorded hemisphere (or a
translate of one).  To test termination it computes, for every recorded
hemisphere S, its *dominance polygon*: the convex region of the plane where
no hemisphere of the recorded family (all integer translates included) is
strictly above S.  The polygon is cut out of a small box by exact half-plane
intersections; the difference of two defect functions is linear, so each
competing hemisphere contributes one rational half-plane.

Certificate at a candidate exit:

  * every polygon corner has negative defect (its lift is a real vertex) or
    is a singular cusp with defect zero, and
  * the polygons, translated around, tile the fundamental rectangle exactly
    (rational area bookkeeping).

Convexity of the defect then forces every non-singular point of the plane to
be strictly below some recorded hemisphere, which is the hypothesis under
which the minimal-vertex-height comparison zeta^2 >= 1/N^2 proves that the
recorded list determines the polyhedron.  Both checks are exact, so a
returned polyhedron is correct, not just plausible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .arith import (
    FieldContext,
    IdealClass,
    KElem,
    ceil_mixed_sqrt,
    floor_mixed_sqrt,
    floor_sqrt,
    ideal_class,
    ideal_norm,
    pair_conj,
    pair_norm,
)
from .geometry import (
    FundamentalRectangle,
    Hemisphere,
    chart_dist2,
    defect_chart,
    everywhere_below_raw,
)

# ---------------------------------------------------------------------------
# norm values and element enumeration


def norm_values_up_to(ctx: FieldContext, bound2: int) -> list[int]:
    """Ascending squared norms attained on nonzero integers, up to bound2."""
    if bound2 < 1:
        return []
    q, t = ctx.nrm_omega, ctx.tr_omega
    vals = set()
    # norm(a,b) = (a + t*b/2)^2 + (q - t^2/4) b^2
    bmax = floor_sqrt(Fraction(4 * bound2, 4 * q - t * t))
    for b in range(-bmax, bmax + 1):
        disc = Fraction(t * t * b * b - 4 * (q * b * b - bound2))
        if disc < 0:
            continue
        lo = ceil_mixed_sqrt(Fraction(-t * b), -1, disc, Fraction(2))
        hi = floor_mixed_sqrt(Fraction(-t * b), 1, disc, Fraction(2))
        for a in range(lo, hi + 1):
            n = pair_norm(ctx, a, b)
            if 0 < n <= bound2:
                vals.add(n)
    return sorted(vals)


def next_norm_after(ctx: FieldContext, n2: int) -> int:
    bound = max(2 * n2, n2 + 4)
    while True:
        for v in norm_values_up_to(ctx, bound):
            if v > n2:
                return v
        bound *= 2


def mu_of_norm(ctx: FieldContext, n2: int) -> list[tuple[int, int]]:
    """All mu = a + b*omega with |mu|^2 = n2 and a >= 0 (units act by -1)."""
    q, t = ctx.nrm_omega, ctx.tr_omega
    out = []
    for a in range(0, floor_sqrt(n2) + 1):
        disc = t * t * a * a - 4 * q * (a * a - n2)
        if disc < 0:
            continue
        s = math.isqrt(disc)
        if s * s != disc:
            continue
        for root in {s, -s}:
            num = -t * a + root
            if num % (2 * q) != 0:
                continue
            b = num // (2 * q)
            if (a, b) != (0, 0) and pair_norm(ctx, a, b) == n2:
                out.append((a, b))
    return sorted(set(out))


def _p_interval(constraints) -> Optional[tuple[int, int]]:
    """Integers p with lo <= alpha*p + beta <= hi for every constraint."""
    p_lo, p_hi = None, None
    for (alpha, beta, lo, hi) in constraints:
        if alpha == 0:
            if not (lo <= beta <= hi):
                return None
            continue
        if alpha > 0:
            a = math.ceil(Fraction(lo - beta, alpha))
            b = math.floor(Fraction(hi - beta, alpha))
        else:
            a = math.ceil(Fraction(hi - beta, alpha))
            b = math.floor(Fraction(lo - beta, alpha))
        p_lo = a if p_lo is None else max(p_lo, a)
        p_hi = b if p_hi is None else min(p_hi, b)
        if p_lo > p_hi:
            return None
    if p_lo is None:
        return None
    return (p_lo, p_hi)


def lambdas_with_center_in_rect(
    ctx: FieldContext, mu: tuple[int, int], rect: FundamentalRectangle
) -> Iterable[tuple[int, int]]:
    """All lam with lam/mu in the closed rectangle.

    Writing lam*conj(mu) = u + v*omega, the chart constraints on lam/mu are
    two pairs of linear inequalities in the integer coordinates (p, q) of
    lam; the scan walks q over its exact projection range and solves each
    row's p-interval in closed form.
    """
    n2 = pair_norm(ctx, *mu)
    ca, cb = pair_conj(ctx, *mu)
    qq, t = ctx.nrm_omega, ctx.tr_omega
    # u = ca*p - qq*cb*q,  v = cb*p + (ca + t*cb)*q
    out = []
    if ctx.omega_shifted:
        # constraints: 0 <= v <= n2 and -n2 <= 2u - v <= n2
        q_corner_vals = [Fraction(cb, 2), Fraction(-cb, 2), Fraction(ca), Fraction(ca - cb)]
        q_lo = math.ceil(min(q_corner_vals))
        q_hi = math.floor(max(q_corner_vals))
        for q in range(q_lo, q_hi + 1):
            cons = [
                (cb, (ca + t * cb) * q, 0, n2),
                (2 * ca - cb, (-2 * qq * cb - ca - t * cb) * q, -n2, n2),
            ]
            iv = _p_interval(cons)
            if iv is None:
                continue
            out.extend((p, q) for p in range(iv[0], iv[1] + 1))
    else:
        # constraints: 0 <= u <= n2 and 0 <= v <= n2
        q_corner_vals = [Fraction(0), Fraction(ca), Fraction(-cb), Fraction(ca - cb)]
        q_lo = math.ceil(min(q_corner_vals))
        q_hi = math.floor(max(q_corner_vals))
        for q in range(q_lo, q_hi + 1):
            cons = [
                (ca, -qq * cb * q, 0, n2),
                (cb, (ca + t * cb) * q, 0, n2),
            ]
            iv = _p_interval(cons)
            if iv is None:
                continue
            out.extend((p, q) for p in range(iv[0], iv[1] + 1))
    return out


# ---------------------------------------------------------------------------
# singular points


@dataclass(frozen=True)
class SingularPoint:
    """Singular cusp, reduced into the fundamental rectangle (half-open)."""

    z: KElem
    cls: IdealClass


def singular_points(ctx: FieldContext) -> tuple[SingularPoint, ...]:
    """Representatives mod O of the cusps with nonprincipal pair ideal."""
    m = ctx.m
    rect = FundamentalRectangle(ctx)
    found: dict[tuple[Fraction, Fraction], SingularPoint] = {}
    smax = floor_sqrt(Fraction(4 * m, 3))
    for s in range(2, smax + 1):
        for r in range(-(s // 2) + (1 if s % 2 == 0 else 0), s // 2 + 1):
            if not (-Fraction(s, 2) < r <= Fraction(s, 2)):
                continue
            if s * s > r * r + m:
                continue
            if ctx.omega_shifted:
                if s % 2 != 0 or s == 2 or (r * r + m) % (2 * s) != 0:
                    continue
                p_mod = s // 2
            else:
                if s == 1 or (r * r + m) % s != 0:
                    continue
                p_mod = s
            for p in range(p_mod):
                if math.gcd(p, p_mod) != 1:
                    continue
                # z = p (r + sqrt(-m)) / s
                if ctx.omega_shifted:
                    z = KElem(ctx, Fraction(p * (r + 1), s), Fraction(2 * p, s))
                else:
                    z = KElem(ctx, Fraction(p * r, s), Fraction(p, s))
                z0, _t = rect.reduce(z)
                key = z0.chart()
                if key not in found:
                    den = s
                    lam = (p * r, p) if not ctx.omega_shifted else (p * (r + 1), 2 * p)
                    cls = ideal_class(ctx, lam, (den, 0))
                    assert not cls.is_principal(), "lemma produced a principal cusp"
                    found[key] = SingularPoint(z0, cls)
    return tuple(found[k] for k in sorted(found))


# ---------------------------------------------------------------------------
# spatial index over recorded hemispheres (and their translates)


class _BandGrid:
    """Per-norm-band bucket grid over translated hemisphere centres.

    Bucketing uses float Euclidean coordinates only to shortlist candidates;
    every geometric decision made on a candidate is exact.
    """

    def __init__(self, cell: float):
        self.cell = max(cell, 1e-3)
        self.buckets: dict[tuple[int, int], list] = {}

    def insert(self, ex: float, ey: float, item):
        key = (math.floor(ex / self.cell), math.floor(ey / self.cell))
        self.buckets.setdefault(key, []).append(item)

    def near(self, ex: float, ey: float, radius: float):
        c = self.cell
        ix0 = math.floor((ex - radius) / c) - 1
        ix1 = math.floor((ex + radius) / c) + 1
        iy0 = math.floor((ey - radius) / c) - 1
        iy1 = math.floor((ey + radius) / c) + 1
        for ix in range(ix0, ix1 + 1):
            for iy in range(iy0, iy1 + 1):
                yield from self.buckets.get((ix, iy), ())


def _chart_shift(ctx: FieldContext, g1: int, g2: int) -> tuple[Fraction, Fraction]:
    """Chart offset of the translation by g1 + g2*omega."""
    if ctx.omega_shifted:
        return (Fraction(2 * g1 - g2, 2), Fraction(g2, 2))
    return (Fraction(g1), Fraction(g2))


def _shift_range(ctx: FieldContext, lo_x, hi_x, lo_y, hi_y):
    """Integer translations whose chart offset lands in the given box."""
    if ctx.omega_shifted:
        g2_lo = math.ceil(2 * lo_y)
        g2_hi = math.floor(2 * hi_y)
        for g2 in range(g2_lo, g2_hi + 1):
            g1_lo = math.ceil(lo_x + g2 / 2)
            g1_hi = math.floor(hi_x + g2 / 2)
            for g1 in range(g1_lo, g1_hi + 1):
                yield (g1, g2)
    else:
        for g2 in range(math.ceil(lo_y), math.floor(hi_y) + 1):
            for g1 in range(math.ceil(lo_x), math.floor(hi_x) + 1):
                yield (g1, g2)


class HemisphereSearch:
    """Recorded hemisphere list plus the pruning index."""

    def __init__(self, ctx: FieldContext):
        self.ctx = ctx
        self.rect = FundamentalRectangle(ctx)
        self.entries: list[Hemisphere] = []
        self.recorded_norms: list[int] = []
        self._grids: dict[int, _BandGrid] = {}
        self._sqm = math.sqrt(ctx.m)
        self._have_units = False

    # translate margin (in Euclidean units) for the pruning index: a candidate
    # can only sit under a translate whose centre is within distance 1
    _PRUNE_MARGIN = 1.25

    def _euclid(self, cx: Fraction, cy: Fraction) -> tuple[float, float]:
        return (float(cx), float(cy) * self._sqm)

    def _insert_entry(self, hem: Hemisphere):
        idx = len(self.entries)
        self.entries.append(hem)
        if hem.nrm == 1:
            self._have_units = True
        band = self._grids.setdefault(
            hem.nrm, _BandGrid(cell=max(1.0 / math.sqrt(hem.nrm), 0.05))
        )
        r = 1.0 / math.sqrt(hem.nrm)
        margin = self._PRUNE_MARGIN + r
        x_lo = float(self.rect.x_lo) - margin - float(hem.cx)
        x_hi = float(self.rect.x_hi) + margin - float(hem.cx)
        y_lo = (float(self.rect.y_lo) - margin / self._sqm) - float(hem.cy)
        y_hi = (float(self.rect.y_hi) + margin / self._sqm) - float(hem.cy)
        for (g1, g2) in _shift_range(self.ctx, x_lo, x_hi, y_lo, y_hi):
            sx, sy = _chart_shift(self.ctx, g1, g2)
            ex, ey = self._euclid(hem.cx + sx, hem.cy + sy)
            band.insert(ex, ey, (idx, (g1, g2), ex, ey))

    def _under_unit_lattice(self, u: int, v: int, n2: int) -> bool:
        """Everywhere below a unit hemisphere at a lattice point?

        The candidate centre is (u + v*omega)/n2; the test is whether some
        lattice point g has dist(centre, g) <= 1 - 1/sqrt(n2).  Only the two
        nearest residues in each coordinate can witness this (any other
        lattice point is at distance >= sqrt(m)/2 > 1), so the decision on
        integers below is exact, not merely a heuristic.
        """
        if n2 == 1:
            return False
        ctx = self.ctx
        q_, t = ctx.nrm_omega, ctx.tr_omega
        best = None
        for b in {v // n2, -((-v) // n2)}:
            y = v - b * n2
            num = 2 * u + t * y      # real minimiser of the norm: a = num/(2 n2)
            for a in {num // (2 * n2), -((-num) // (2 * n2))}:
                x = u - a * n2
                d = x * x + t * x * y + q_ * y * y     # dist^2 * n2^2
                if best is None or d < best:
                    best = d
        # dist <= 1 - r with r^2 = 1/n2, squared with a sign guard
        t_num = n2 * n2 + n2 - best
        if t_num < 0:
            return False
        return t_num * t_num >= 4 * n2 * n2 * n2

    def _is_dominated(self, mu, lam, n2, ex, ey, u, v) -> bool:
        """Everywhere below some recorded hemisphere (translates included)?"""
        if n2 == 1:
            # every unit hemisphere is a lattice translate of the first one
            return self._have_units
        if self._have_units and self._under_unit_lattice(u, v, n2):
            return True
        ctx = self.ctx
        r_cand = 1.0 / math.sqrt(n2)
        for band_n2, grid in self._grids.items():
            if band_n2 > n2 or band_n2 == 1:
                continue
            r_band = 1.0 / math.sqrt(band_n2)
            radius = r_band - r_cand + 1e-9
            if radius < 0:
                if band_n2 != n2:
                    continue
                radius = 1e-9
            rad2 = (radius + 1e-7) ** 2
            for (idx, shift, fx, fy) in grid.near(ex, ey, radius):
                dxf = fx - ex
                dyf = fy - ey
                if dxf * dxf + dyf * dyf > rad2:
                    continue
                other = self.entries[idx]
                t_lam = _translate_lam(ctx, other.mu, other.lam, shift)
                if everywhere_below_raw(ctx, mu, lam, n2, other.mu, t_lam, other.nrm):
                    return True
        return False

    def record_hemispheres(self, n2: int) -> int:
        """Record the band |mu|^2 = n2; returns how many hemispheres entered."""
        if n2 in self.recorded_norms:
            return 0
        ctx = self.ctx
        qq, t = ctx.nrm_omega, ctx.tr_omega
        sqm = self._sqm
        added = 0
        for mu in mu_of_norm(ctx, n2):
            ca, cb = pair_conj(ctx, *mu)
            for lam in lambdas_with_center_in_rect(ctx, mu, self.rect):
                p, q = lam
                u = ca * p - qq * cb * q
                v = cb * p + (ca + t * cb) * q
                if ctx.omega_shifted:
                    ex = (u - 0.5 * v) / n2
                    ey = (0.5 * v / n2) * sqm
                else:
                    ex = u / n2
                    ey = (v / n2) * sqm
                if not _pair_unimodular(ctx, mu, lam):
                    continue
                if self._is_dominated(mu, lam, n2, ex, ey, u, v):
                    continue
                self._insert_entry(Hemisphere(ctx, mu, lam))
                added += 1
        self.recorded_norms.append(n2)
        return added

    def covered_at(self, x: Fraction, y: Fraction) -> bool:
        """Is the chart point strictly below some recorded hemisphere?"""
        ex, ey = self._euclid(x, y)
        for band_n2, grid in self._grids.items():
            radius = 1.0 / math.sqrt(band_n2) + 1e-9
            for (idx, shift, _fx, _fy) in grid.near(ex, ey, radius):
                hem = self.entries[idx]
                sx, sy = _chart_shift(self.ctx, *shift)
                d = chart_dist2(self.ctx, x, y, hem.cx + sx, hem.cy + sy) - hem.r2
                if d < 0:
                    return True
        return False

    def min_defect_at(self, x: Fraction, y: Fraction) -> Fraction:
        """min over recorded hemispheres+translates near (x, y) of the defect.

        Exact whenever the minimum is attained within the index margin;
        used for spot checks and certificates, not in the hot path.
        """
        best = None
        ex, ey = self._euclid(x, y)
        for band_n2, grid in self._grids.items():
            radius = 1.0 / math.sqrt(band_n2) + 1.0
            for (idx, shift, _fx, _fy) in grid.near(ex, ey, radius):
                hem = self.entries[idx]
                sx, sy = _chart_shift(self.ctx, *shift)
                d = chart_dist2(self.ctx, x, y, hem.cx + sx, hem.cy + sy) - hem.r2
                if best is None or d < best:
                    best = d
        assert best is not None
        return best


def _translate_lam(ctx, mu, lam, shift) -> tuple[int, int]:
    g1, g2 = shift
    return (
        lam[0] + g1 * mu[0] - ctx.nrm_omega * g2 * mu[1],
        lam[1] + g1 * mu[1] + g2 * mu[0] + ctx.tr_omega * g2 * mu[1],
    )


def _pair_unimodular(ctx, mu, lam) -> bool:
    if mu == (0, 0) and lam == (0, 0):
        return False
    g = math.gcd(pair_norm(ctx, *mu), pair_norm(ctx, *lam))
    if g == 1:
        return True
    return ideal_norm(ctx, [mu, lam]) == 1


# ---------------------------------------------------------------------------
# dominance polygons


@dataclass
class Polygon:
    """Convex chart polygon, CCW; labels[i] generated the edge pts[i]->pts[i+1].

    A label is ("hem", entry_index, shift) for a half-plane cut, or
    ("box", side_index) for a surviving piece of the starting box (which a
    certified round never contains).
    """

    pts: list[tuple[Fraction, Fraction]]
    labels: list[tuple]

    def area(self) -> Fraction:
        return _shoelace(self.pts)

    def bbox(self):
        xs = [p[0] for p in self.pts]
        ys = [p[1] for p in self.pts]
        return min(xs), max(xs), min(ys), max(ys)


def _shoelace(pts) -> Fraction:
    total = Fraction(0)
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return total / 2


def cut_polygon(pts, labels, a, b, c, new_label):
    """Intersect the polygon with the half-plane a*X + b*Y <= c."""
    n = len(pts)
    vals = [a * x + b * y - c for (x, y) in pts]
    if all(v <= 0 for v in vals):
        return pts, labels, False
    out_p: list = []
    out_l: list = []
    for i in range(n):
        j = (i + 1) % n
        vi, vj = vals[i], vals[j]
        if vi <= 0:
            out_p.append(pts[i])
            out_l.append(labels[i])
        if (vi <= 0) != (vj <= 0):
            t = vi / (vi - vj)
            xi = pts[i][0] + t * (pts[j][0] - pts[i][0])
            yi = pts[i][1] + t * (pts[j][1] - pts[i][1])
            out_p.append((xi, yi))
            out_l.append(new_label if vi <= 0 else labels[i])
    # drop zero-length edges created by vertices lying exactly on the line
    clean_p: list = []
    clean_l: list = []
    for k in range(len(out_p)):
        if clean_p and out_p[k] == clean_p[-1]:
            clean_l[-1] = out_l[k]
            continue
        clean_p.append(out_p[k])
        clean_l.append(out_l[k])
    if len(clean_p) > 1 and clean_p[0] == clean_p[-1]:
        # the closing edge has zero length; drop its label with its point
        clean_p.pop()
        clean_l.pop()
    return clean_p, clean_l, True


def clip_to_box(pts, labels, x_lo, x_hi, y_lo, y_hi, wall_tag="wall"):
    sides = [
        (Fraction(-1), Fraction(0), -x_lo, (wall_tag, "x_lo")),
        (Fraction(1), Fraction(0), x_hi, (wall_tag, "x_hi")),
        (Fraction(0), Fraction(-1), -y_lo, (wall_tag, "y_lo")),
        (Fraction(0), Fraction(1), y_hi, (wall_tag, "y_hi")),
    ]
    for a, b, c, lab in sides:
        pts, labels, _ = cut_polygon(pts, labels, a, b, c, lab)
        if len(pts) < 3:
            return [], []
    if _shoelace(pts) <= 0:
        return [], []
    return pts, labels


def dominance_polygon(
    ctx: FieldContext,
    hem: Hemisphere,
    pool_grid: _BandGrid,
    entries: list[Hemisphere],
    self_idx: int,
) -> Optional[Polygon]:
    """Region where no pooled hemisphere is strictly above `hem`.

    Cuts a small box by half-planes defect(hem) <= defect(other), nearest
    competitors first, stopping — exactly — once no farther hemisphere can
    still cut the current polygon.  Returns None for an empty region.
    """
    m = ctx.m
    fs_m = max(1, floor_sqrt(m))
    hx = Fraction(1, floor_sqrt(hem.nrm)) + Fraction(1, 4)
    hy = hx / fs_m
    cx, cy = hem.cx, hem.cy
    pts = [
        (cx - hx, cy - hy),
        (cx + hx, cy - hy),
        (cx + hx, cy + hy),
        (cx - hx, cy + hy),
    ]
    labels = [("box", 0), ("box", 1), ("box", 2), ("box", 3)]

    sqm = math.sqrt(m)
    ex, ey = float(cx), float(cy) * sqm

    def float_stop_radius() -> float:
        # no hemisphere farther than rho + sqrt(1 + max(delta, 0)) can cut;
        # computed as a float upper estimate, with slack added by the caller
        rho2 = 0.0
        dmax = -1e18
        for (px, py) in pts:
            dx = float(px) - ex
            dy = float(py) * sqm - ey
            d2 = dx * dx + dy * dy
            if d2 > rho2:
                rho2 = d2
            if d2 > dmax:
                dmax = d2
        delta = dmax - 1.0 / hem.nrm
        return math.sqrt(rho2) + math.sqrt(1.0 + max(delta, 0.0)) + 1e-6

    radius = 2.0 / math.sqrt(hem.nrm) + 0.8
    processed: set = set()
    while True:
        batch = []
        for item in pool_grid.near(ex, ey, radius):
            idx, shift, fx, fy = item
            if (idx, shift) in processed:
                continue
            if idx == self_idx and shift == (0, 0):
                continue
            dxf = fx - ex
            dyf = fy - ey
            batch.append((dxf * dxf + dyf * dyf, idx, shift))
        batch.sort(key=lambda rec: rec[0])
        stop2 = float_stop_radius() ** 2
        stopped = False
        for (fd2, idx, shift) in batch:
            if fd2 > stop2 + 1e-6:
                stopped = True
                break
            processed.add((idx, shift))
            other = entries[idx]
            sx, sy = _chart_shift(ctx, *shift)
            tcx, tcy = other.cx + sx, other.cy + sy
            a = 2 * (tcx - cx)
            b = 2 * m * (tcy - cy)
            c = (tcx * tcx + m * tcy * tcy - other.r2) - (cx * cx + m * cy * cy - hem.r2)
            if a == 0 and b == 0:
                if c < 0:
                    return None    # concentric and strictly smaller radius
                continue
            pts, labels, changed = cut_polygon(pts, labels, a, b, c, ("hem", idx, shift))
            if len(pts) < 3 or _shoelace(pts) <= 0:
                return None
            if changed:
                stop2 = float_stop_radius() ** 2
        if stopped or radius > 5.2:
            break
        radius = min(radius * 2.0, 5.3)
    return Polygon(pts, labels)


# ---------------------------------------------------------------------------
# one certification round


@dataclass
class VertexRecord:
    """Corner of the dominance structure, reduced into the rectangle."""

    x: Fraction
    y: Fraction
    h2: Fraction          # squared lift height = -defect (0 at cusps)
    singular: bool


@dataclass
class RoundData:
    polygons: dict[int, Optional[Polygon]]
    vertices: dict[tuple[Fraction, Fraction], VertexRecord]
    wet_min_h2: Optional[Fraction]
    dirty: bool
    area_ok: bool


def cell_round(search: HemisphereSearch) -> RoundData:
    ctx = search.ctx
    rect = search.rect
    sqm = math.sqrt(ctx.m)

    # pool: all translates whose centre is within ~5.3 Euclidean units of the
    # rectangle — enough for every adaptive stop bound used by the polygons
    pool = _BandGrid(cell=1.0)
    margin = 5.5
    for idx, hem in enumerate(search.entries):
        x_lo = float(rect.x_lo) - margin - float(hem.cx)
        x_hi = float(rect.x_hi) + margin - float(hem.cx)
        y_lo = (float(rect.y_lo) - margin / sqm) - float(hem.cy)
        y_hi = (float(rect.y_hi) + margin / sqm) - float(hem.cy)
        for (g1, g2) in _shift_range(ctx, x_lo, x_hi, y_lo, y_hi):
            sx, sy = _chart_shift(ctx, g1, g2)
            ex, ey = float(hem.cx + sx), float(hem.cy + sy) * sqm
            pool.insert(ex, ey, (idx, (g1, g2), ex, ey))

    singular_keys = {sp.z.chart() for sp in singular_points(ctx)}

    polygons: dict[int, Optional[Polygon]] = {}
    vertices: dict[tuple[Fraction, Fraction], VertexRecord] = {}
    dirty = False
    wet_min: Optional[Fraction] = None
    for idx, hem in enumerate(search.entries):
        poly = dominance_polygon(ctx, hem, pool, search.entries, idx)
        polygons[idx] = poly
        if poly is None:
            continue
        for (px, py) in poly.pts:
            d = defect_chart(hem, px, py)
            (rx, ry), _shift = rect.reduce_chart(px, py)
            key = (rx, ry)
            if d < 0:
                h2 = -d
                if key not in vertices:
                    vertices[key] = VertexRecord(rx, ry, h2, False)
                if wet_min is None or h2 < wet_min:
                    wet_min = h2
            elif d == 0 and key in singular_keys:
                vertices.setdefault(key, VertexRecord(rx, ry, Fraction(0), True))
            else:
                dirty = True

    area_ok = False
    if not dirty:
        area_ok = _tiles_rectangle(ctx, rect, polygons)
    return RoundData(polygons, vertices, wet_min, dirty, area_ok)


def _tiles_rectangle(ctx, rect, polygons) -> bool:
    total = Fraction(0)
    for idx, poly in polygons.items():
        if poly is None:
            continue
        x0, x1, y0, y1 = poly.bbox()
        lo_x = float(rect.x_lo - x1)
        hi_x = float(rect.x_hi - x0)
        lo_y = float(rect.y_lo - y1)
        hi_y = float(rect.y_hi - y0)
        for (g1, g2) in _shift_range(ctx, lo_x - 0.01, hi_x + 0.01, lo_y - 0.01, hi_y + 0.01):
            sx, sy = _chart_shift(ctx, g1, g2)
            shifted = [(px + sx, py + sy) for (px, py) in poly.pts]
            clipped, _ = clip_to_box(
                shifted, [None] * len(shifted), rect.x_lo, rect.x_hi, rect.y_lo, rect.y_hi
            )
            if clipped:
                total += _shoelace(clipped)
    return total == rect.area()


# ---------------------------------------------------------------------------
# the full search


@dataclass
class PolyhedronData:
    ctx: FieldContext
    rect: FundamentalRectangle
    search: HemisphereSearch
    polygons: dict[int, Optional[Polygon]]
    active: list[int]              # entries carrying a 2-cell
    degenerate: list[int]          # nonempty boundary contact, no 2-cell
    vertices: list[VertexRecord]
    singular: tuple[SingularPoint, ...]
    min_vertex_h2: Fraction
    norm_cursor2: int              # first unrecorded squared norm
    max_mu_norm2: int              # over active + degenerate entries
    rounds: list[dict]

    @property
    def entries(self) -> list[Hemisphere]:
        return self.search.entries


def initial_norm_bound2(ctx: FieldContext) -> Fraction:
    """Starting bound for |mu|^2.

    The extrapolated estimates for the largest needed |mu| overshoot the
    actual structure by an order of magnitude on the larger fields, and the
    termination test grows the bound by itself whenever it is too small, so
    the search starts at |disc| and lets the criterion drive the growth.
    """
    return Fraction(max(-ctx.disc, 8))


def _deep_holes(ctx: FieldContext) -> list[tuple[Fraction, Fraction]]:
    if ctx.omega_shifted:
        return [
            (Fraction(1, 2), Fraction(ctx.m + 3, 4 * ctx.m)),
            (Fraction(1, 2), Fraction(ctx.m - 1, 4 * ctx.m)),
        ]
    return [(Fraction(1, 2), Fraction(1, 2))]


def verify_certificate(data: PolyhedronData, n_random: int = 1000, seed: int = 20260809):
    """Re-check the exit certificate of a computed polyhedron.

    * no vertex is strictly below any recorded hemisphere or translate,
      checked exactly for every vertex against every nearby candidate
      (distant hemispheres cannot reach above a point of positive height);
    * `n_random` seeded non-singular K-points of the rectangle are each
      strictly below some recorded hemisphere;
    * the minimal vertex height clears the first unrecorded radius.

    Returns a dict of named booleans; all true for a sound result.
    """
    import random as _random

    ctx = data.ctx
    search = data.search
    out = {}
    ok_vertices = True
    for v in data.vertices:
        if v.singular:
            continue
        # strictly below S would need defect(S, z) < -h2 < 0
        if search.min_defect_at(v.x, v.y) < -v.h2:
            ok_vertices = False
            break
    out["no_vertex_strictly_below"] = ok_vertices
    out["min_height_clears_cursor"] = data.min_vertex_h2 * data.norm_cursor2 >= 1

    rng = _random.Random(seed)
    rect = data.rect
    singular_keys = {sp.z.chart() for sp in data.singular}
    covered = 0
    tested = 0
    while tested < n_random:
        den = rng.randint(7, 97)
        x = rect.x_lo + (rect.x_hi - rect.x_lo) * Fraction(rng.randint(0, den), den)
        y = rect.y_lo + (rect.y_hi - rect.y_lo) * Fraction(rng.randint(0, den), den)
        if rect.reduce_chart(x, y)[0] in singular_keys:
            continue
        tested += 1
        if search.covered_at(x, y):
            covered += 1
    out["random_points_covered"] = covered == n_random
    out["random_points_total"] = n_random
    return out


def compute_polyhedron(ctx: FieldContext, max_rounds: int = 200) -> PolyhedronData:
    """Run the search to a certified hemisphere list for the polyhedron."""
    search = HemisphereSearch(ctx)
    rect = search.rect
    sing = singular_points(ctx)
    singular_keys = {sp.z.chart() for sp in sing}

    e2 = initial_norm_bound2(ctx)
    recorded_max = 0
    rounds_log: list[dict] = []

    def record_up_to(bound2: Fraction):
        nonlocal recorded_max
        bound2 = Fraction(bound2)
        limit = bound2.numerator // bound2.denominator
        for n2 in norm_values_up_to(ctx, max(limit, 1)):
            if n2 > recorded_max:
                search.record_hemispheres(n2)
        recorded_max = max(recorded_max, limit)

    record_up_to(e2)

    holes = [
        (hx, hy)
        for (hx, hy) in _deep_holes(ctx)
        if rect.reduce_chart(hx, hy)[0] not in singular_keys
    ]

    for round_no in range(max_rounds):
        # cheap pre-check: an uncovered deep hole means more bands are needed
        uncovered_hole = any(not search.covered_at(hx, hy) for (hx, hy) in holes)
        if uncovered_hole:
            e2 = Fraction(max(2 * recorded_max, recorded_max + 4))
            record_up_to(e2)
            rounds_log.append(
                {"round": round_no, "entries": len(search.entries),
                 "norm_bound2": str(e2), "phase": "hole-uncovered"}
            )
            continue

        data = cell_round(search)
        n2_next = next_norm_after(ctx, recorded_max)
        ok = (
            not data.dirty
            and data.area_ok
            and data.wet_min_h2 is not None
            and data.wet_min_h2 * n2_next >= 1
        )
        rounds_log.append(
            {
                "round": round_no,
                "entries": len(search.entries),
                "recorded_max_norm2": recorded_max,
                "next_norm2": n2_next,
                "min_h2": str(data.wet_min_h2),
                "dirty": data.dirty,
                "area_ok": data.area_ok,
                "phase": "certified" if ok else "continue",
            }
        )
        if ok:
            active, degenerate = [], []
            for idx, poly in data.polygons.items():
                if poly is None:
                    continue
                if poly.area() > 0:
                    active.append(idx)
                else:
                    degenerate.append(idx)
            max_n2 = max(search.entries[i].nrm for i in active + degenerate)
            return PolyhedronData(
                ctx=ctx,
                rect=rect,
                search=search,
                polygons=data.polygons,
                active=active,
                degenerate=degenerate,
                vertices=sorted(
                    data.vertices.values(), key=lambda v: (v.x, v.y)
                ),
                singular=sing,
                min_vertex_h2=data.wet_min_h2,
                norm_cursor2=n2_next,
                max_mu_norm2=max_n2,
                rounds=rounds_log,
            )
        if not data.dirty and data.wet_min_h2 is not None:
            # grow the bound to 1/zeta^2, and at least one more band
            e2 = max(1 / data.wet_min_h2, Fraction(n2_next))
        else:
            e2 = Fraction(max(2 * recorded_max, recorded_max + 4))
        record_up_to(e2)

    raise RuntimeError(
        f"polyhedron search for m={ctx.m} did not certify within {max_rounds} rounds"
    )
