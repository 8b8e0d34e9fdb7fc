"""Exact two-phase simplex over the rationals.

Only the shape needed here is supported: equality constraints
``A x = b`` with ``b >= 0`` and ``x >= 0``. Pivoting uses Bland's rule,
so the method terminates without anti-cycling perturbations, and every
quantity is a :class:`fractions.Fraction`; nothing is rounded.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

_ZERO = Fraction(0)


class _Tableau:
    """Rows are ``[coefficients..., rhs]``; ``basis[i]`` is the basic column of row ``i``."""

    def __init__(self, rows, basis, ncols):
        self.rows = rows
        self.basis = basis
        self.ncols = ncols

    def copy(self) -> _Tableau:
        return _Tableau([r[:] for r in self.rows], self.basis[:], self.ncols)

    def pivot(self, pr: int, pc: int, extra=()) -> None:
        prow = self.rows[pr]
        p = prow[pc]
        if p != 1:
            prow = [x / p if x else x for x in prow]
            self.rows[pr] = prow
        nz = [(j, x) for j, x in enumerate(prow) if x]
        for i, row in enumerate(self.rows):
            if i != pr:
                _eliminate(row, pc, nz)
        for row in extra:
            _eliminate(row, pc, nz)
        self.basis[pr] = pc

    def minimize(self, cost: Sequence[Fraction], allowed: int) -> Fraction | None:
        """Minimize ``cost . x`` from the current basic feasible solution.

        Only columns ``< allowed`` may enter. Returns the optimum, or
        ``None`` when unbounded.
        """
        z = list(cost) + [_ZERO] * (self.ncols + 1 - len(cost))
        for i, b in enumerate(self.basis):
            cb = z[b]
            if cb:
                row = self.rows[i]
                for j, x in enumerate(row):
                    if x:
                        z[j] -= cb * x
        while True:
            enter = next((j for j in range(allowed) if z[j] < 0), None)
            if enter is None:
                return -z[-1]
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    if best is None or ratio < best[0] or (ratio == best[0] and self.basis[i] < self.basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return None
            self.pivot(best[1], enter, extra=(z,))


def _eliminate(row, pc, nz):
    f = row[pc]
    if f:
        for j, x in nz:
            row[j] -= f * x


def feasible_basis(A: Sequence[Sequence[int]], b: Sequence[int]) -> _Tableau | None:
    """Phase one: a basic feasible tableau for ``A x = b, x >= 0`` or ``None``.

    Redundant rows are dropped and artificial columns are never basic in
    the returned tableau.
    """
    d = len(A)
    m = len(A[0]) if d else 0
    if any(x < 0 for x in b):
        raise ValueError("right-hand side must be nonnegative")
    n = m + d
    rows = []
    for i in range(d):
        row = [Fraction(a) for a in A[i]] + [_ZERO] * d + [Fraction(b[i])]
        row[m + i] = Fraction(1)
        rows.append(row)
    T = _Tableau(rows, list(range(m, n)), n)
    cost = [_ZERO] * m + [Fraction(1)] * d
    if T.minimize(cost, allowed=m) != 0:
        return None
    # Drive remaining artificials out of the basis; rows where that is
    # impossible are linear combinations of the others.
    i = 0
    while i < len(T.rows):
        if T.basis[i] >= m:
            row = T.rows[i]
            j = next((j for j in range(m) if row[j]), None)
            if j is None:
                del T.rows[i]
                del T.basis[i]
                continue
            T.pivot(i, j)
        i += 1
    return T


def lp_range(A, b, j: int) -> tuple[Fraction, Fraction] | None:
    """Exact ``(min x_j, max x_j)`` over ``{x >= 0 : A x = b}``.

    Returns ``None`` when the polyhedron is empty. The maximum may be
    ``None`` if ``x_j`` is unbounded above.
    """
    T = feasible_basis(A, b)
    if T is None:
        return None
    m = len(A[0])
    lo_cost = [_ZERO] * m
    lo_cost[j] = Fraction(1)
    hi_cost = [_ZERO] * m
    hi_cost[j] = Fraction(-1)
    lo = T.copy().minimize(lo_cost, allowed=m)
    neg_hi = T.minimize(hi_cost, allowed=m)
    return lo, (None if neg_hi is None else -neg_hi)


def is_feasible(A, b) -> bool:
    return feasible_basis(A, b) is not None
