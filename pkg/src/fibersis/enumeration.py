"""Exact brute-force oracle: count and list fibers, exact cell supports.

Counting is a memoized depth-first search over cells in model order. It
never samples and never rounds, so it is the reference every estimator
and bound in the package is checked against. The cost is exponential in
the worst case; a node budget turns runaway searches into a clean error.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from ._stages import StagePlan, plan_for, step
from .bounds import PartialAssignment, _check_cell
from .errors import FiberError, ResourceBudgetExceeded
from .model import DesignMatrix, FiberSpec, Table

DEFAULT_NODE_BUDGET = 10**8
MEMO_LIMIT = 2_000_000


@dataclass(frozen=True)
class FiberCount:
    count: int
    tables: tuple[Table, ...] | None = None

    def __post_init__(self):
        if self.tables is not None and len(self.tables) != self.count:
            raise FiberError("enumerated list length disagrees with count")


class FiberCounter:
    """Memoized ``#{x >= 0 integer : A[:, i:] x = r}`` for one matrix."""

    def __init__(self, matrix: DesignMatrix):
        self.plan: StagePlan = plan_for(matrix)
        self._memo: dict = {}
        self._supports: dict = {}
        self.nodes = 0
        self._budget = None

    def count(self, i: int, residual, budget: int | None = DEFAULT_NODE_BUDGET) -> int:
        self.nodes = 0
        self._budget = budget
        return self._count(i, residual)

    def _count(self, i: int, residual) -> int:
        plan = self.plan
        r = plan.reduce(i, residual)
        if r is None:
            return 0
        stage = plan.stages[i]
        if not stage.free:
            return 1
        key = (i, *r)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        self.nodes += 1
        if self._budget is not None and self.nodes > self._budget:
            raise ResourceBudgetExceeded(
                f"fiber search exceeded {self._budget} nodes",
                {"nodes": self.nodes, "stage": i, "memo_entries": len(self._memo)},
            )
        total = 0
        c = stage.free[0]
        span = plan.value_range(stage.live_rows, stage.free, c, r, stage.live_pairs)
        if span is not None:
            for v in range(span[0], span[1] + 1):
                nxt = step(plan, c, r, v)
                if nxt is not None:
                    total += self._count(c + 1, nxt)
        if len(self._memo) > MEMO_LIMIT:
            self._memo.clear()
        self._memo[key] = total
        return total

    def support(self, i: int, residual, budget: int | None = DEFAULT_NODE_BUDGET) -> tuple[int, ...]:
        """Values of cell ``i`` that leave a nonempty integer fiber, ascending."""
        key = (i, *residual)
        hit = self._supports.get(key)
        if hit is not None:
            return hit
        self.nodes = 0
        self._budget = budget
        plan = self.plan
        out = []
        span = plan.value_range(plan.stages[i].open_rows, range(i, plan.k), i, residual, plan.stages[i].open_pairs)
        for v in range(span[0], span[1] + 1) if span else ():
            nxt = step(plan, i, residual, v)
            if nxt is not None and self._count(i + 1, nxt):
                out.append(v)
        out = tuple(out)
        if len(self._supports) > MEMO_LIMIT:
            self._supports.clear()
        self._supports[key] = out
        return out


@lru_cache(maxsize=64)
def counter_for(matrix: DesignMatrix) -> FiberCounter:
    return FiberCounter(matrix)


def count_fiber(fiber: FiberSpec, cap: int | None = None,
                node_budget: int | None = DEFAULT_NODE_BUDGET) -> FiberCount:
    """Exact ``|F|``; the tables themselves are listed when ``count <= cap``."""
    n = counter_for(fiber.matrix).count(0, fiber.margin, node_budget)
    tables = None
    if cap is not None and n <= cap:
        tables = tuple(iter_fiber(fiber, node_budget))
    return FiberCount(n, tables)


def iter_fiber(fiber: FiberSpec, node_budget: int | None = DEFAULT_NODE_BUDGET) -> Iterator[Table]:
    """Every table of the fiber in lexicographic order."""
    counter = counter_for(fiber.matrix)
    k = fiber.k

    def walk(prefix: list[int], r) -> Iterator[Table]:
        i = len(prefix)
        if i == k:
            yield tuple(prefix)
            return
        for v in counter.support(i, r, node_budget):
            prefix.append(v)
            yield from walk(prefix, step(counter.plan, i, r, v))
            prefix.pop()

    if counter.count(0, fiber.margin, node_budget):
        yield from walk([], fiber.margin)


def cell_support(state: PartialAssignment, cell: int | None = None,
                 node_budget: int | None = DEFAULT_NODE_BUDGET) -> tuple[int, ...]:
    """Exact support of the next cell given the prefix, as a sorted tuple.

    An empty tuple means the prefix has no completion.
    """
    i = _check_cell(state, cell)
    return counter_for(state.fiber.matrix).support(i, state.residual, node_budget)


def has_solution(matrix: DesignMatrix, target: Sequence[int],
                 node_budget: int | None = DEFAULT_NODE_BUDGET) -> bool:
    """``A x = target`` for some nonnegative integer ``x``."""
    if len(target) != matrix.d:
        raise FiberError(f"target has {len(target)} entries, matrix has d={matrix.d}")
    if any(t < 0 for t in target):
        return False
    return counter_for(matrix).count(0, tuple(target), node_budget) > 0
