"""Per-stage structure of ``A[:, i:] x = r`` shared by the exact searches.

At stage ``i`` cells ``0..i-1`` are fixed and cells ``i..k-1`` are open.
Some open cells are determined outright: if a row touches exactly one
open cell, that cell's value is ``r[row] / a``. Removing it can make
further rows singletons, so the forced set is a fixed point, computed
once per stage from the sparsity pattern alone. The remaining open cells
are "free" and are branched on in index order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .model import DesignMatrix


@dataclass(frozen=True)
class Stage:
    index: int
    forced: tuple[tuple[int, int, int], ...]    # (cell, defining row, coefficient)
    free: tuple[int, ...]
    dead_rows: tuple[int, ...]                  # rows no free cell touches
    live_rows: tuple[tuple[int, int, tuple[tuple[int, int], ...]], ...]   # (row, gcd, ((cell, a), ...))
    open_rows: tuple[tuple[int, int, tuple[tuple[int, int], ...]], ...]   # same, over all cells >= index
    live_pairs: tuple = ()
    open_pairs: tuple = ()


class StagePlan:
    def __init__(self, matrix: DesignMatrix):
        self.matrix = matrix
        self.k = matrix.k
        self.d = matrix.d
        self.nonzeros = tuple(
            tuple((row, a) for row, a in enumerate(col) if a) for col in matrix.columns
        )
        self.stages = tuple(self._build(i) for i in range(self.k + 1))

    def _build(self, i: int) -> Stage:
        A = self.matrix.rows
        open_cells = set(range(i, self.k))
        forced = []
        changed = True
        while changed:
            changed = False
            for row in range(self.d):
                touching = [c for c in open_cells if A[row][c]]
                if len(touching) == 1:
                    c = touching[0]
                    forced.append((c, row, A[row][c]))
                    open_cells.discard(c)
                    changed = True
        free = tuple(sorted(open_cells))
        dead = tuple(row for row in range(self.d) if not any(A[row][c] for c in free))
        live, opened = self._rows(free), self._rows(range(i, self.k))
        return Stage(i, tuple(forced), free, dead, live, opened, _pairs(live), _pairs(opened))

    def _rows(self, cells):
        A = self.matrix.rows
        out = []
        for row in range(self.d):
            entries = tuple((c, A[row][c]) for c in cells if A[row][c])
            if entries:
                g = 0
                for _, a in entries:
                    g = gcd(g, a)
                out.append((row, g, entries))
        return tuple(out)

    def reduce(self, i: int, residual) -> list[int] | None:
        """Substitute the forced cells of stage ``i``.

        Returns the reduced residual as a new list, or ``None`` when the
        forced values are fractional or drive a row negative, or a row no
        free cell can reach is nonzero.
        """
        r = list(residual)
        stage = self.stages[i]
        nz = self.nonzeros
        for c, row, a in stage.forced:
            q, rem = divmod(r[row], a)
            if rem:
                return None
            if q:
                for rr, aa in nz[c]:
                    r[rr] -= q * aa
                    if r[rr] < 0:
                        return None
        for row in stage.dead_rows:
            if r[row]:
                return None
        return r

    def cell_cap(self, c: int, r) -> int:
        """Largest value cell ``c`` can take without a negative residual."""
        return min(r[row] // a for row, a in self.nonzeros[c])

    def value_range(self, rows, cells, target: int, r, pairs=()) -> tuple[int, int] | None:
        """Row-capacity relaxation of ``sum_c a_rc x_c = r_row`` over ``cells``.

        Each open cell is capped by its own residual limit. A row whose
        capped total cannot reach ``r_row`` proves infeasibility
        (``None``); otherwise the slack of the other cells gives a lower
        bound for ``target``. Rows are ``(row, gcd, ((cell, a), ...))``.
        """
        nz = self.nonzeros
        caps = {}
        for c in cells:
            caps[c] = min(r[row] // a for row, a in nz[c])
        hi = caps[target]
        lo = 0
        for row, g, entries in rows:
            need = r[row]
            if need % g:
                return None
            total = 0
            own = 0
            for c, a in entries:
                total += a * caps[c]
                if c == target:
                    own = a
            if total < need:
                return None
            if own:
                short = need - (total - own * hi)
                if short > 0:
                    need_v = -(-short // own)
                    if need_v > lo:
                        lo = need_v
        if lo > hi:
            return None
        if pairs and self.pairs_infeasible(pairs, caps, r):
            return None
        return lo, hi

    def pairs_infeasible(self, pairs, caps, r) -> bool:
        """Two-row LP cut.

        For rows ``p, q`` with ``supp(q)`` inside ``supp(p)``, the range of
        ``sum a_q x`` given ``sum a_p x = r_p`` and ``0 <= x <= cap`` is a
        fractional knapsack. Floats are safe here: the cut only fires
        with a margin, so rounding can weaken it but never make it wrong.
        """
        for p, q, items in pairs:
            need = r[p]
            target = r[q]
            hi_val = 0.0
            left = need
            for c, ap, ratio in items:
                mass = ap * caps[c]
                if mass >= left:
                    hi_val += ratio * left
                    left = 0
                    break
                hi_val += ratio * mass
                left -= mass
            if hi_val < target - 1e-7:
                return True
            lo_val = 0.0
            left = need
            for c, ap, ratio in reversed(items):
                mass = ap * caps[c]
                if mass >= left:
                    lo_val += ratio * left
                    break
                lo_val += ratio * mass
                left -= mass
            if lo_val > target + 1e-7:
                return True
        return False


@lru_cache(maxsize=64)
def plan_for(matrix: DesignMatrix) -> StagePlan:
    return StagePlan(matrix)


def _pairs(rows):
    """``(p, q, items)`` for row pairs whose supports nest, items sorted by ``a_q / a_p`` descending."""
    out = []
    for p, _, p_entries in rows:
        p_cells = {c: a for c, a in p_entries}
        for q, _, q_entries in rows:
            if q == p:
                continue
            q_cells = dict(q_entries)
            if not set(q_cells) <= set(p_cells):
                continue
            items = sorted(((c, a, q_cells.get(c, 0) / a) for c, a in p_cells.items()),
                           key=lambda t: (-t[2], t[0]))
            out.append((p, q, tuple(items)))
    return tuple(out)


def step(plan: StagePlan, c: int, r, v: int) -> list[int] | None:
    """Residual after setting cell ``c`` to ``v``; ``None`` if any entry goes negative."""
    out = list(r)
    if v:
        for row, a in plan.nonzeros[c]:
            out[row] -= v * a
            if out[row] < 0:
                return None
    return out
