"""One-to-one RU/STA assignment.

Backed by SciPy's ``linear_sum_assignment``, which solves rectangular
problems directly and returns a maximal matching of min(R, C) pairs.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment


def _as_cost(cm) -> np.ndarray:
    a = np.asarray(cm, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"cost matrix must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("cost matrix contains non-finite entries")
    return a


def solve_min_assignment(cm) -> list[tuple[int, int]]:
    """Minimum-cost maximal matching as sorted (row, col) pairs, 0-based."""
    a = _as_cost(cm)
    if a.size == 0:
        return []
    rows, cols = linear_sum_assignment(a)
    return sorted(zip(rows.tolist(), cols.tolist()))


def solve_max_assignment(cm) -> list[tuple[int, int]]:
    a = _as_cost(cm)
    if a.size == 0:
        return []
    return solve_min_assignment(-a)


def assignment_value(cm, pairs) -> float:
    a = np.asarray(cm, dtype=float)
    return float(sum(a[i, j] for i, j in pairs))
