"""Minimum-cost linear assignment (Hungarian method, shortest augmenting paths)."""

from __future__ import annotations

import math
from typing import List, Tuple

import numpy as np


def _solve_square(a: List[List[float]]) -> List[int]:
    # O(n^3) Kuhn-Munkres with row/column potentials; returns col index per row
    n = len(a)
    inf = math.inf
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)  # p[j]: row (1-based) assigned to column j
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = a[i0 - 1]
            ui0 = u[i0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - ui0 - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col_of_row = [0] * n
    for j in range(1, n + 1):
        col_of_row[p[j] - 1] = j - 1
    return col_of_row


def hungarian(cost) -> List[Tuple[int, int]]:
    """Minimum total cost one-to-one assignment for a (possibly rectangular) matrix.

    Returns ``min(rows, cols)`` ``(row, col)`` pairs sorted by row. Rectangular
    input is padded to square with a constant large cost; padded pairs are
    dropped.
    """
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2:
        raise ValueError("cost must be a 2-D matrix")
    rows, cols = c.shape
    if rows == 0 or cols == 0:
        return []
    if not np.all(np.isfinite(c)):
        raise ValueError("cost matrix must be finite")
    n = max(rows, cols)
    pad = float(np.abs(c).max()) * 2.0 + 1.0
    square = np.full((n, n), pad)
    square[:rows, :cols] = c
    col_of_row = _solve_square(square.tolist())
    return [(r, col_of_row[r]) for r in range(rows) if col_of_row[r] < cols]
