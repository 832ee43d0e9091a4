"""Linear assignment (Hungarian method) and hexagonal pooling offsets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..hexgrid import SQRT3, spiral_to_axial


def _hungarian(cost: np.ndarray) -> list[int]:
    """Shortest augmenting path Hungarian method with potentials, O(n^3).

    Returns ``col_of_row``.
    """
    n = cost.shape[0]
    INF = math.inf
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)  # p[j]: row matched to column j (1-based, 0 = free)
    way = [0] * (n + 1)
    a = cost.tolist()
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = INF
            j1 = 0
            row = a[i0 - 1]
            ui0 = u[i0]
            for j in range(1, n + 1):
                if not used[j]:
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
        if p[j]:
            col_of_row[p[j] - 1] = j - 1
    return col_of_row


def _min_cost(cost: np.ndarray) -> float:
    if cost.shape[0] == 0:
        return 0.0
    perm = _hungarian(cost)
    return float(sum(cost[i, j] for i, j in enumerate(perm)))


def assignment_solve(cost, tie_break: bool = True) -> tuple[tuple[int, ...], float]:
    """Minimum-cost perfect matching of a square cost matrix.

    Returns ``(perm, total)`` with ``perm[i]`` the column given to row ``i``.
    With ``tie_break`` the lexicographically smallest optimal permutation is
    returned; this re-solves sub-problems row by row and costs O(n^5) in the
    worst case, so switch it off for large matrices.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix must be finite")
    n = cost.shape[0]
    if n == 0:
        return (), 0.0
    perm = _hungarian(cost)
    best = float(sum(cost[i, j] for i, j in enumerate(perm)))
    if not tie_break:
        return tuple(perm), best

    tol = 1e-9 * max(1.0, abs(best), float(np.abs(cost).max()) * n)
    rows = list(range(n))
    free = list(range(n))
    chosen = []
    spent = 0.0
    for i in rows:
        rest_rows = rows[i + 1 :]
        for j in free:
            others = [c for c in free if c != j]
            sub = cost[np.ix_(rest_rows, others)]
            if spent + cost[i, j] + _min_cost(sub) <= best + tol:
                chosen.append(j)
                spent += cost[i, j]
                free = others
                break
        else:  # numerical corner case; keep the plain optimum
            return tuple(perm), best
    return tuple(chosen), float(sum(cost[i, j] for i, j in enumerate(chosen)))


# --- pooling offsets -----------------------------------------------------------

# The 3x3 window around a center cell; the assignment picks 7 of these.
WINDOW = tuple((dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1))


def window_displacement(dr: int, dc: int, parity: int) -> tuple[float, float]:
    """Cartesian displacement (unit pitch) of window cell (dr, dc) from a center in a row of ``parity``."""
    shift = 0.5 * (((parity + dr) & 1) - (parity & 1))
    return dc + shift, dr * SQRT3 / 2.0


def cluster_positions(scale: float = 1.0) -> np.ndarray:
    """Cartesian centers of the 7 order-1 sub-cells (digits 0..6), unit pitch."""
    pts = []
    for d in range(7):
        c = spiral_to_axial([d])
        pts.append(((c.q + c.r / 2.0) * scale, c.r * SQRT3 / 2.0 * scale))
    return np.array(pts)


@dataclass(frozen=True)
class PoolingAssignment:
    ideal: np.ndarray          # (7, 2) ideal offsets
    candidates: tuple          # 9 window offsets (dr, dc)
    offsets: tuple             # 7 chosen (dr, dc), in digit order
    cost: float


@lru_cache(maxsize=None)
def pooling_assignment(parity: int, scale: float = 1.0) -> PoolingAssignment:
    """Match the ideal order-1 cluster to integer window offsets.

    The 7 ideal offsets are padded with two zero-cost dummy rows to a 9x9
    problem over the 3x3 window; the two cells assigned to dummies are the
    ones left out.
    """
    parity &= 1
    ideal = cluster_positions(scale)
    cand = np.array([window_displacement(dr, dc, parity) for dr, dc in WINDOW])
    cost = np.zeros((9, 9))
    d = ideal[:, None, :] - cand[None, :, :]
    cost[:7] = np.sum(d * d, axis=2)
    perm, total = assignment_solve(cost)
    offsets = tuple(WINDOW[perm[i]] for i in range(7))
    return PoolingAssignment(ideal, WINDOW, offsets, total)


def pool_offsets(parity) -> tuple[tuple[int, int], ...]:
    """Seven (drow, dcol) pooling offsets for a window centered on a row of ``parity``.

    ``parity`` may be ``0``/``1`` or ``"even"``/``"odd"``.
    """
    if isinstance(parity, str):
        parity = {"even": 0, "odd": 1}[parity]
    return pooling_assignment(int(parity)).offsets
