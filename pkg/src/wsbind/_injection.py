"""Exhaustive (branch-and-bound) search for a best injection of rows into columns."""
import math
from typing import List, Optional, Sequence, Tuple

Cell = Optional[float]


def best_injection(sims: Sequence[Sequence[Cell]]) -> Optional[List[Tuple[int, float]]]:
    """Injection maximizing the similarity sum over feasible cells.

    ``sims[i][j]`` is the similarity of row ``i`` to column ``j``, or ``None``
    when the pair is infeasible. Returns ``(column, similarity)`` per row, or
    ``None`` when no injection exists. Totals are compared with ``math.fsum`` so
    the optimum does not depend on summation order; among equal totals the
    lexicographically smallest column sequence wins.
    """
    n_rows = len(sims)
    if n_rows == 0:
        return []
    row_best = [max((s for s in row if s is not None), default=None) for row in sims]
    if any(b is None for b in row_best):
        return None
    suffix_bound = [0.0] * (n_rows + 1)
    for i in range(n_rows - 1, -1, -1):
        suffix_bound[i] = suffix_bound[i + 1] + row_best[i]
    used = [False] * len(sims[0])
    chosen: List[Tuple[int, float]] = []
    best: Optional[List[Tuple[int, float]]] = None
    best_total = -1.0

    def search(i: int, partial: float) -> None:
        nonlocal best, best_total
        if i == n_rows:
            total = math.fsum(s for _, s in chosen)
            if total > best_total:
                best, best_total = list(chosen), total
            return
        # the bound uses plain float sums; the slack keeps exact ties reachable
        if partial + suffix_bound[i] < best_total - 1e-9:
            return
        for j, s in enumerate(sims[i]):
            if s is None or used[j]:
                continue
            used[j] = True
            chosen.append((j, s))
            search(i + 1, partial + s)
            chosen.pop()
            used[j] = False

    search(0, 0.0)
    return best
