"""Exact linear algebra over the coefficient fields.

Two lanes: a generic fraction-free-ish elimination for exact field elements
(rationals, field elements of K), and a vectorised mod-p lane on numpy
integer matrices.  Quadratic-extension fields are handled in the numpy lane
through the companion embedding, which doubles the dimensions and halves the
ranks.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


# ---------------------------------------------------------------------------
# generic exact elimination (elements support +, -, *, /, ==, bool)


def rref(rows):
    """Row echelon form (in place on a copy); returns (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows, ncols=None, zero=Fraction(0), one=Fraction(1)):
    """Basis (list of vectors) of the right kernel."""
    if not rows:
        assert ncols is not None
        return [
            [one if i == j else zero for j in range(ncols)] for i in range(ncols)
        ]
    ncols = len(rows[0])
    red, pivots = rref(rows)
    red = red[: len(pivots)]
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [zero] * ncols
        vec[fc] = one
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][fc]
        basis.append(vec)
    return basis


def solve_in_span(basis_rows, targets):
    """Coordinates of each target w.r.t. the given basis vectors.

    basis_rows: k vectors of length N (linearly independent).
    targets: list of vectors of length N, each required to lie in the span.
    Returns a k x len(targets) coefficient matrix (list of rows).
    """
    k = len(basis_rows)
    if k == 0:
        for t in targets:
            assert not any(t), "nonzero target outside the zero span"
        return []
    n = len(basis_rows[0])
    # solve B^T x = t for each target by eliminating the stacked system
    aug = [[basis_rows[j][i] for j in range(k)] + [t[i] for t in targets] for i in range(n)]
    red, pivots = rref(aug)
    assert all(p < k for p in pivots), "target outside the span of the basis"
    assert len(pivots) == k, "basis not independent"
    out = [[red[r][k + j] for j in range(len(targets))] for r in range(k)]
    return out


# ---------------------------------------------------------------------------
# mod-p numpy lane


def np_rref(a: np.ndarray, p: int):
    """Reduced row echelon form mod p; returns (matrix, pivot columns)."""
    a = np.array(a, dtype=np.int64) % p
    nrows, ncols = a.shape
    pivots = []
    r = 0
    for c in range(ncols):
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        mask = np.nonzero(a[:, c])[0]
        mask = mask[mask != r]
        if len(mask):
            a[mask] = (a[mask] - np.outer(a[mask, c], a[r])) % p
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a, pivots


def np_rank(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    return len(np_rref(a, p)[1])


def np_nullspace(a: np.ndarray, p: int) -> np.ndarray:
    """Rows of the result span the right kernel mod p."""
    nrows, ncols = a.shape
    if nrows == 0:
        return np.eye(ncols, dtype=np.int64)
    red, pivots = np_rref(a, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for bi, fc in enumerate(free):
        basis[bi, fc] = 1
        for r, pc in enumerate(pivots):
            basis[bi, pc] = (-int(red[r, fc])) % p
    return basis


def np_solve_in_span(basis_rows: np.ndarray, targets: np.ndarray, p: int) -> np.ndarray:
    """x with basis_rows^T x = targets^T, i.e. coordinates in the basis."""
    k, n = basis_rows.shape
    t = targets.shape[0]
    if k == 0:
        assert not np.any(targets % p), "nonzero target outside the zero span"
        return np.zeros((0, t), dtype=np.int64)
    aug = np.concatenate([basis_rows.T % p, targets.T % p], axis=1)
    red, pivots = np_rref(aug, p)
    assert all(pc < k for pc in pivots), "target outside the span of the basis"
    assert len(pivots) == k, "basis not independent"
    out = np.zeros((k, t), dtype=np.int64)
    for r in range(k):
        out[r] = red[r, k:]
    return out
