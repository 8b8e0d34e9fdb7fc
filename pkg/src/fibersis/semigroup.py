"""Semigroup, cone, lattice and holes of a design matrix, at desk scale.

``Q`` is the set of nonnegative integer combinations of the columns,
``K`` the real cone they span and ``L`` the integer lattice. Points of
``K & L`` that are not in ``Q`` are holes: the LP relaxation of the fiber
is feasible, its integer version is not. Hole search is brute force over
a bounded box, so a "saturated" verdict only speaks for that box.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from . import lp
from .enumeration import has_solution
from .errors import FiberError, ResourceBudgetExceeded
from .model import DesignMatrix

MAX_BOX_POINTS = 10**7


def _check_target(matrix: DesignMatrix, target: Sequence[int]) -> tuple[int, ...]:
    if len(target) != matrix.d:
        raise FiberError(f"target has {len(target)} entries, matrix has d={matrix.d}")
    return tuple(int(t) for t in target)


@lru_cache(maxsize=64)
def lattice_basis(matrix: DesignMatrix) -> tuple[tuple[int, tuple[int, ...]], ...]:
    """Column echelon basis of the lattice spanned by the columns.

    Returns ``(pivot_row, column)`` pairs; each column is zero above its
    pivot row and has a positive pivot. Built with unimodular integer
    column operations only.
    """
    work = [list(c) for c in matrix.columns]
    basis = []
    for row in range(matrix.d):
        live = [c for c in work if c[row]]
        rest = [c for c in work if not c[row]]
        if not live:
            continue
        while len(live) > 1:
            live.sort(key=lambda c: abs(c[row]))
            piv = live[0]
            keep = [piv]
            for c in live[1:]:
                q = c[row] // piv[row]
                reduced = [x - q * y for x, y in zip(c, piv)]
                (keep if reduced[row] else rest).append(reduced)
            live = keep
        piv = live[0]
        if piv[row] < 0:
            piv = [-x for x in piv]
        basis.append((row, tuple(piv)))
        work = [c for c in rest if any(c)]
    return tuple(basis)


def in_lattice(matrix: DesignMatrix, target: Sequence[int]) -> bool:
    t = list(_check_target(matrix, target))
    pivots = dict(lattice_basis(matrix))
    for row in range(matrix.d):
        col = pivots.get(row)
        if col is None:
            if t[row]:
                return False
            continue
        q, rem = divmod(t[row], col[row])
        if rem:
            return False
        if q:
            t = [x - q * y for x, y in zip(t, col)]
    return True


def in_cone(matrix: DesignMatrix, target: Sequence[int]) -> bool:
    t = _check_target(matrix, target)
    if any(x < 0 for x in t):
        return False   # columns are nonnegative
    return lp.is_feasible(matrix.rows, t)


def in_semigroup(matrix: DesignMatrix, target: Sequence[int]) -> bool:
    t = _check_target(matrix, target)
    return has_solution(matrix, t)


def in_saturation(matrix: DesignMatrix, target: Sequence[int]) -> bool:
    t = _check_target(matrix, target)
    return in_lattice(matrix, t) and in_cone(matrix, t)


@dataclass(frozen=True)
class SemigroupAnalysis:
    matrix: DesignMatrix
    box: tuple[int, ...]
    holes: tuple[tuple[int, ...], ...]

    @property
    def saturated_in_box(self) -> bool:
        return not self.holes


def holes_in_box(matrix: DesignMatrix, box: int | Sequence[int]) -> SemigroupAnalysis:
    """All holes ``b`` with ``0 <= b_r <= box[r]``, in lexicographic order."""
    if isinstance(box, int):
        box = (box,) * matrix.d
    box = tuple(int(b) for b in box)
    if len(box) != matrix.d or any(b < 0 for b in box):
        raise FiberError(f"box must give {matrix.d} nonnegative caps")
    volume = math.prod(b + 1 for b in box)
    if volume > MAX_BOX_POINTS:
        raise ResourceBudgetExceeded(f"box has {volume} points (limit {MAX_BOX_POINTS})",
                                     {"points": volume})
    holes = []
    for point in itertools.product(*(range(b + 1) for b in box)):
        if has_solution(matrix, point):
            continue
        if in_lattice(matrix, point) and in_cone(matrix, point):
            holes.append(point)
    return SemigroupAnalysis(matrix, box, tuple(holes))
