"""Per-cell bounds for the next cell of a partially filled table.

Two methods:

``exact-ip``
    The true integer minimum and maximum of the next cell over all
    nonnegative integer completions, found by depth-first
    branch-and-bound. Branches die as soon as a residual entry goes
    negative, a forced cell is fractional, or a row fails the
    gcd / capacity relaxation.
``lp-relaxation``
    ``ceil`` of the real minimum and ``floor`` of the real maximum,
    solved exactly over the rationals.

Results are memoized per design matrix on ``(stage, residual)``; the
residual fully determines the subproblem so the cache is shared by every
fiber of the same matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from . import lp
from ._stages import StagePlan, plan_for, step
from .errors import FiberError
from .model import DesignMatrix, FiberSpec

EXACT_IP = "exact-ip"
LP_RELAXATION = "lp-relaxation"
METHODS = (EXACT_IP, LP_RELAXATION)
_METHOD_ALIASES = {"ip": EXACT_IP, "lp": LP_RELAXATION, EXACT_IP: EXACT_IP, LP_RELAXATION: LP_RELAXATION}

# Cleared wholesale when exceeded; keeps long experiment runs bounded.
MEMO_LIMIT = 2_000_000


def normalize_method(name: str) -> str:
    try:
        return _METHOD_ALIASES[name]
    except KeyError:
        raise FiberError(f"unknown bound method {name!r}; expected one of {METHODS}") from None


@dataclass(frozen=True)
class PartialAssignment:
    fiber: FiberSpec
    prefix: tuple[int, ...] = ()

    def __post_init__(self):
        prefix = tuple(int(v) for v in self.prefix)
        if len(prefix) >= self.fiber.k:
            raise FiberError(f"prefix length {len(prefix)} must be < k={self.fiber.k}")
        if any(v < 0 for v in prefix):
            raise FiberError("prefix values must be nonnegative")
        object.__setattr__(self, "prefix", prefix)
        if any(r < 0 for r in self.residual):
            raise FiberError("prefix overshoots the margin (negative residual)")

    @property
    def residual(self) -> tuple[int, ...]:
        r = list(self.fiber.margin)
        cols = self.fiber.matrix.columns
        for j, v in enumerate(self.prefix):
            if v:
                for row, a in enumerate(cols[j]):
                    r[row] -= a * v
        return tuple(r)

    @property
    def next_cell(self) -> int:
        return len(self.prefix)

    def extend(self, value: int) -> PartialAssignment:
        return PartialAssignment(self.fiber, self.prefix + (value,))


@dataclass(frozen=True)
class CellBounds:
    lower: int
    upper: int
    method: str
    empty: bool = False

    @classmethod
    def nothing(cls, method: str) -> CellBounds:
        return cls(0, 0, method, True)

    @property
    def width(self) -> int:
        """Number of integers in the interval (0 when empty)."""
        return 0 if self.empty else self.upper - self.lower + 1

    def __str__(self):
        return "EMPTY" if self.empty else f"{self.lower} {self.upper}"


class IntegerFeasibility:
    """Memoized branch-and-bound over the cells of one design matrix."""

    def __init__(self, matrix: DesignMatrix):
        self.plan: StagePlan = plan_for(matrix)
        self._feasible: dict = {}
        self._bounds: dict = {}

    def feasible(self, i: int, residual) -> bool:
        """Does ``A[:, i:] x = residual`` have a nonnegative integer solution?"""
        plan = self.plan
        r = plan.reduce(i, residual)
        if r is None:
            return False
        stage = plan.stages[i]
        if not stage.free:
            return True
        key = (i, *r)
        hit = self._feasible.get(key)
        if hit is not None:
            return hit
        ok = False
        c = stage.free[0]
        span = plan.value_range(stage.live_rows, stage.free, c, r, stage.live_pairs)
        if span is not None:
            for v in range(span[1], span[0] - 1, -1):
                nxt = step(plan, c, r, v)
                if nxt is not None and self.feasible(c + 1, nxt):
                    ok = True
                    break
        if len(self._feasible) > MEMO_LIMIT:
            self._feasible.clear()
        self._feasible[key] = ok
        return ok

    def bounds(self, i: int, residual: Sequence[int]) -> CellBounds:
        key = (i, *residual)
        hit = self._bounds.get(key)
        if hit is not None:
            return hit
        plan = self.plan
        stage = plan.stages[i]
        span = plan.value_range(stage.open_rows, range(i, plan.k), i, residual, stage.open_pairs)
        lo = None
        if span is not None:
            lo = next((v for v in range(span[0], span[1] + 1) if self._completes(i, residual, v)), None)
        if lo is None:
            out = CellBounds.nothing(EXACT_IP)
        else:
            hi = next(v for v in range(span[1], lo - 1, -1) if self._completes(i, residual, v))
            out = CellBounds(lo, hi, EXACT_IP)
        if len(self._bounds) > MEMO_LIMIT:
            self._bounds.clear()
        self._bounds[key] = out
        return out

    def _completes(self, i, residual, v) -> bool:
        nxt = step(self.plan, i, residual, v)
        return nxt is not None and self.feasible(i + 1, nxt)


class LPBounds:
    """Memoized exact LP-relaxation bounds for one design matrix."""

    def __init__(self, matrix: DesignMatrix):
        self.matrix = matrix
        self._stage_rows = [tuple(row[i:] for row in matrix.rows) for i in range(matrix.k)]
        self._memo: dict = {}

    def bounds(self, i: int, residual: Sequence[int]) -> CellBounds:
        key = (i, *residual)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        rng = lp.lp_range(self._stage_rows[i], residual, 0)
        if rng is None:
            out = CellBounds.nothing(LP_RELAXATION)
        else:
            lo, hi = math.ceil(rng[0]), math.floor(rng[1])
            out = CellBounds.nothing(LP_RELAXATION) if lo > hi else CellBounds(lo, hi, LP_RELAXATION)
        if len(self._memo) > MEMO_LIMIT:
            self._memo.clear()
        self._memo[key] = out
        return out


@lru_cache(maxsize=64)
def ip_engine(matrix: DesignMatrix) -> IntegerFeasibility:
    return IntegerFeasibility(matrix)


@lru_cache(maxsize=64)
def lp_engine(matrix: DesignMatrix) -> LPBounds:
    return LPBounds(matrix)


def engine(matrix: DesignMatrix, method: str):
    method = normalize_method(method)
    return ip_engine(matrix) if method == EXACT_IP else lp_engine(matrix)


def _check_cell(state: PartialAssignment, cell: int | None) -> int:
    if cell is None:
        return state.next_cell
    if not 0 <= cell < state.fiber.k:
        raise FiberError(f"cell {cell} out of range 0..{state.fiber.k - 1}")
    if cell != state.next_cell:
        raise FiberError(f"cell {cell} is not the next unfixed cell ({state.next_cell})")
    return cell


def bounds_exact_ip(state: PartialAssignment, cell: int | None = None) -> CellBounds:
    """Exact integer min/max of the next cell over all completions of ``state``."""
    i = _check_cell(state, cell)
    return ip_engine(state.fiber.matrix).bounds(i, state.residual)


def bounds_lp(state: PartialAssignment, cell: int | None = None) -> CellBounds:
    """Rounded LP-relaxation bounds; may be looser than :func:`bounds_exact_ip`."""
    i = _check_cell(state, cell)
    return lp_engine(state.fiber.matrix).bounds(i, state.residual)


def compute_bounds(state: PartialAssignment, method: str, cell: int | None = None) -> CellBounds:
    method = normalize_method(method)
    return bounds_exact_ip(state, cell) if method == EXACT_IP else bounds_lp(state, cell)
