"""Primal simplex with symbolic lexicographic tie-breaking.

The same code runs on ``Fraction`` tableaux (``tol=0``, exact) and on
``float64`` tableaux (``tol>0``).  The objective is perturbed by
``eps**rank[j]`` on every ranked column for an infinitesimal ``eps``; the
perturbation is never materialised, only its sign pattern is read off the
tableau.  The optimum of the perturbed program is the lexicographically
largest optimal point in rank order, hence unique.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import NumericError

FLOAT_TOL = 1e-9
_DEGENERATE_STREAK = 25


def _nonzero(v, tol):
    if tol:
        return np.abs(v) > tol
    return (v != 0).astype(bool)


def _lex_sign(T, basis, rank, j, tol):
    best_rank, sign = None, 0
    if rank[j] >= 0:
        best_rank, sign = rank[j], 1
    col = T[:, j]
    for r in np.flatnonzero(_nonzero(col, tol)):
        rb = rank[basis[r]]
        if rb >= 0 and (best_rank is None or rb < best_rank):
            best_rank, sign = rb, (-1 if col[r] > 0 else 1)
    return sign


def _lex_signs(T, basis, rank, cols, tol):
    """``_lex_sign`` for many columns at once."""
    sub = T[:, cols]
    brank = rank[np.asarray(basis, dtype=int)] if len(basis) else np.zeros(0, dtype=int)
    big = np.iinfo(np.int64).max
    cand = np.where(_nonzero(sub, tol) & (brank >= 0)[:, None], brank[:, None], big)
    if cand.shape[0]:
        row = np.argmin(cand, axis=0)
        best = cand[row, np.arange(len(cols))]
    else:
        row = np.zeros(len(cols), dtype=int)
        best = np.full(len(cols), big)
    own = rank[cols]
    signs = np.zeros(len(cols), dtype=int)
    use_own = (own >= 0) & (own <= best)
    signs[use_own] = 1
    use_row = ~use_own & (best < big)
    if use_row.any():
        vals = sub[row[use_row], np.flatnonzero(use_row)]
        positive = (vals > 0).astype(bool)
        signs[use_row] = np.where(positive, -1, 1)
    return signs


def lex_simplex(T, rhs, c, basis, rank, tol=0, max_iter=100_000):
    """Maximise ``c @ x`` subject to ``T @ x == rhs``, ``x >= 0``.

    ``T`` must already be in canonical form for ``basis`` (unit columns,
    ``rhs >= 0``).  ``rank[j] >= 0`` gives the perturbation order of column
    ``j``; ``-1`` leaves it unperturbed.  Arrays are modified in place.
    Returns ``(x, objective, basis)``.
    """
    m, n = T.shape
    basis = list(basis)
    rank = np.asarray(rank)
    d = c - c[basis] @ T if m else c.copy()
    is_basic = np.zeros(n, dtype=bool)
    is_basic[basis] = True
    streak = 0
    for _ in range(max_iter):
        use_bland = streak >= _DEGENERATE_STREAK
        improving = np.flatnonzero((d > tol).astype(bool) & ~is_basic)
        j = None
        if improving.size:
            j = int(improving[0]) if use_bland else int(improving[np.argmax(d[improving])])
        else:
            ties = np.flatnonzero(~_nonzero(d, tol) & ~is_basic)
            if ties.size:
                pos = np.flatnonzero(_lex_signs(T, basis, rank, ties, tol) > 0)
                if pos.size:
                    j = int(ties[pos[0]])
        if j is None:
            break
        col = T[:, j]
        rows = np.flatnonzero((col > tol).astype(bool))
        if rows.size == 0:
            raise NumericError("linear program is unbounded")
        ratios = [rhs[r] / col[r] for r in rows]
        best = min(ratios)
        if tol:
            cand_rows = [r for r, q in zip(rows, ratios) if q <= best + tol]
        else:
            cand_rows = [r for r, q in zip(rows, ratios) if q == best]
        r = min(cand_rows, key=lambda i: basis[i])
        streak = streak + 1 if (best <= tol if tol else best == 0) else 0
        _pivot(T, rhs, d, r, j, tol)
        is_basic[basis[r]] = False
        is_basic[j] = True
        basis[r] = j
    else:
        raise NumericError("simplex iteration limit reached")
    x = np.zeros(n, dtype=T.dtype)
    if T.dtype == object:
        x[:] = Fraction(0)
    x[basis] = rhs
    if tol:
        x[np.abs(x) <= tol] = 0.0
    obj = c @ x
    return x, obj, basis


def _pivot(T, rhs, d, r, j, tol):
    piv = T[r, j]
    T[r] = T[r] / piv
    rhs[r] = rhs[r] / piv
    col = T[:, j].copy()
    col[r] = 0
    rows = np.flatnonzero(_nonzero(col, tol))
    if rows.size:
        T[rows] -= np.outer(col[rows], T[r])
        rhs[rows] -= col[rows] * rhs[r]
    if d[j] != 0:
        d -= d[j] * T[r]
    if tol:
        rhs[rhs < 0] = np.maximum(rhs[rhs < 0], 0.0)


def as_array(values, exact: bool):
    if exact:
        arr = np.empty(len(values), dtype=object)
        arr[:] = [Fraction(v) for v in values]
        return arr
    return np.asarray(values, dtype=float)


def zeros(shape, exact: bool):
    if exact:
        arr = np.empty(shape, dtype=object)
        arr.fill(Fraction(0))
        return arr
    return np.zeros(shape, dtype=float)
