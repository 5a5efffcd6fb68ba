"""Exact rational linear algebra over gmpy2 ``mpq`` values."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from fractions import Fraction
from typing import Any

import gmpy2
import numpy as np

mpq = gmpy2.mpq


def to_mpq(x: Any):
    """Exact rational from an int, Fraction, mpq, numpy scalar or float (floats convert exactly)."""
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, np.integer):
        return mpq(int(x))
    if isinstance(x, np.floating):
        return mpq(float(x))
    return mpq(x)


def mpq_array(values: Any) -> np.ndarray:
    """Object array of ``mpq`` with the shape of ``values``."""
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    flat_in, flat_out = arr.reshape(-1), out.reshape(-1)
    for k, v in enumerate(flat_in):
        flat_out[k] = to_mpq(v)
    return out


def to_fraction(x: Any) -> Fraction:
    if isinstance(x, Fraction):
        return x
    q = to_mpq(x)
    return Fraction(int(q.numerator), int(q.denominator))


def _rows(m: Any) -> list[list]:
    if isinstance(m, np.ndarray):
        if m.ndim != 2:
            raise ValueError("expected a 2-d matrix")
        return [[to_mpq(v) for v in row] for row in m.tolist()]
    rows = [[to_mpq(v) for v in row] for row in m]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    return rows


def _eliminate(rows: list[list], ncols: int, col_order: Sequence[int]) -> int:
    rank = 0
    nrows = len(rows)
    for c in col_order:
        pivot = next((r for r in range(rank, nrows) if rows[r][c] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        prow = rows[rank]
        inv = 1 / prow[c]
        for r in range(rank + 1, nrows):
            f = rows[r][c]
            if f != 0:
                f *= inv
                row = rows[r]
                for k in range(ncols):
                    if prow[k] != 0:
                        row[k] -= f * prow[k]
        rank += 1
        if rank == nrows:
            break
    return rank


def rank_exact(m: Any, order: str = "forward") -> int:
    """Exact rank by Gaussian elimination over the rationals.

    ``order`` selects the pivot column sweep: ``"forward"`` scans columns left to
    right, ``"reverse"`` right to left, and ``"transpose"`` eliminates the
    transpose. All orderings give the same rank; they exist for cross-checking.
    """
    rows = _rows(m)
    if not rows or not rows[0]:
        return 0
    if order == "transpose":
        rows = [list(col) for col in zip(*rows)]
        order = "forward"
    ncols = len(rows[0])
    if order == "forward":
        cols: Iterable[int] = range(ncols)
    elif order == "reverse":
        cols = range(ncols - 1, -1, -1)
    else:
        raise ValueError(f"unknown order {order!r}")
    return _eliminate(rows, ncols, list(cols))


def det_exact(m: Any):
    """Exact determinant of a square matrix as ``mpq``."""
    rows = _rows(m)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant needs a square matrix")
    det = mpq(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if rows[r][c] != 0), None)
        if pivot is None:
            return mpq(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        prow = rows[c]
        det *= prow[c]
        inv = 1 / prow[c]
        for r in range(c + 1, n):
            f = rows[r][c]
            if f != 0:
                f *= inv
                row = rows[r]
                for k in range(c, n):
                    row[k] -= f * prow[k]
    return det
