"""Tables, design matrices, fibers, and the built-in model families.

Cells are linearized as follows:

* ``independence(I, J)``: row-major, cell ``(i, j)`` sits at ``i * J + j``.
* ``univariate_logit(I)``: the ``I`` success cells in level order, then the
  ``I`` failure cells in the same order.
* ``bivariate_logit(I, J)``: the ``I*J`` success cells in lexicographic
  ``(i, j)`` order, then the failure cells in the same order.

Covariate levels are the integers ``1..I`` and ``1..J``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from .errors import FiberError

Table = tuple[int, ...]

MODEL_KINDS = ("independence", "univariate-logit", "bivariate-logit")
_SHORTHAND = {"indep": "independence", "unilogit": "univariate-logit", "bilogit": "bivariate-logit"}
_SHORT_NAME = {v: k for k, v in _SHORTHAND.items()}


def as_table(values: Iterable[int], k: int | None = None) -> Table:
    """Validate a cell-count vector and return it as a tuple of Python ints."""
    out = []
    for v in values:
        if isinstance(v, bool) or int(v) != v:
            raise FiberError(f"table entries must be integers, got {v!r}")
        v = int(v)
        if v < 0:
            raise FiberError(f"table entries must be nonnegative, got {v}")
        out.append(v)
    if k is not None and len(out) != k:
        raise FiberError(f"table has {len(out)} cells, model has k={k}")
    return tuple(out)


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    levels: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise FiberError(f"kind: unknown model kind {self.kind!r}")
        want = 1 if self.kind == "univariate-logit" else 2
        if len(self.levels) != want:
            raise FiberError(f"levels: {self.kind} takes {want} level count(s), got {len(self.levels)}")
        floor = 1 if self.kind == "independence" else 2
        for name, n in zip("IJ", self.levels):
            if int(n) != n or n < floor:
                raise FiberError(f"{name}: must be an integer >= {floor} for {self.kind}, got {n!r}")
        object.__setattr__(self, "levels", tuple(int(n) for n in self.levels))

    @classmethod
    def independence(cls, I: int, J: int) -> ModelSpec:
        return cls("independence", (I, J))

    @classmethod
    def univariate_logit(cls, I: int) -> ModelSpec:
        return cls("univariate-logit", (I,))

    @classmethod
    def bivariate_logit(cls, I: int, J: int) -> ModelSpec:
        return cls("bivariate-logit", (I, J))

    @classmethod
    def parse(cls, text: str) -> ModelSpec:
        """Parse the shorthand ``indep:I,J``, ``unilogit:I`` or ``bilogit:I,J``."""
        m = re.fullmatch(r"\s*(\w+)\s*:\s*([\d,\s]+)", text)
        if not m or m.group(1) not in _SHORTHAND:
            raise FiberError(f"model: cannot parse {text!r}; expected indep:I,J | unilogit:I | bilogit:I,J")
        levels = tuple(int(x) for x in m.group(2).split(",") if x.strip())
        return cls(_SHORTHAND[m.group(1)], levels)

    @property
    def shorthand(self) -> str:
        return f"{_SHORT_NAME[self.kind]}:{','.join(map(str, self.levels))}"

    @property
    def k(self) -> int:
        if self.kind == "independence":
            return self.levels[0] * self.levels[1]
        if self.kind == "univariate-logit":
            return 2 * self.levels[0]
        return 2 * self.levels[0] * self.levels[1]

    @property
    def d(self) -> int:
        if self.kind == "independence":
            return self.levels[0] + self.levels[1]
        if self.kind == "univariate-logit":
            return self.levels[0] + 2
        return self.levels[0] * self.levels[1] + 3

    def cell_labels(self) -> list[tuple]:
        """Multi-index of every cell in linear order.

        Independence cells are ``(i, j)``; logit cells are
        ``(outcome, i)`` or ``(outcome, i, j)`` with outcome 1 = success,
        2 = failure, and 1-based levels.
        """
        if self.kind == "independence":
            I, J = self.levels
            return [(i, j) for i in range(1, I + 1) for j in range(1, J + 1)]
        if self.kind == "univariate-logit":
            (I,) = self.levels
            return [(o, i) for o in (1, 2) for i in range(1, I + 1)]
        I, J = self.levels
        return [(o, i, j) for o in (1, 2) for i in range(1, I + 1) for j in range(1, J + 1)]


@dataclass(frozen=True)
class DesignMatrix:
    """A nonnegative integer ``d x k`` matrix with no all-zero column."""

    rows: tuple[tuple[int, ...], ...]
    _columns: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(int(a) for a in row) for row in self.rows)
        if not rows or not rows[0]:
            raise FiberError("rows: design matrix must have d >= 1 and k >= 1")
        k = len(rows[0])
        if any(len(r) != k for r in rows):
            raise FiberError("rows: ragged design matrix")
        if any(a < 0 for r in rows for a in r):
            raise FiberError("rows: design matrix entries must be nonnegative")
        cols = tuple(zip(*rows))
        for j, col in enumerate(cols):
            if not any(col):
                raise FiberError(f"rows: column {j} is all zero (cell would be unbounded)")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_columns", cols)

    @property
    def d(self) -> int:
        return len(self.rows)

    @property
    def k(self) -> int:
        return len(self.rows[0])

    @property
    def columns(self) -> tuple[tuple[int, ...], ...]:
        return self._columns

    def column(self, j: int) -> tuple[int, ...]:
        return self._columns[j]

    def permuted(self, order: Sequence[int]) -> DesignMatrix:
        """Matrix whose ``p``-th column is column ``order[p]`` of this one."""
        if sorted(order) != list(range(self.k)):
            raise FiberError(f"cell order must be a permutation of 0..{self.k - 1}")
        return DesignMatrix(tuple(tuple(row[j] for j in order) for row in self.rows))

    def to_text(self) -> str:
        lines = [f"{self.d} {self.k}"]
        lines += [" ".join(map(str, r)) for r in self.rows]
        return "\n".join(lines) + "\n"

    @cached_property
    def _hash(self):
        return hash(self.rows)

    def __hash__(self):
        return self._hash


def build_design_matrix(spec: ModelSpec) -> DesignMatrix:
    """Design matrix whose rows are the model's sufficient statistics.

    Row order:

    * independence: the ``I`` row sums, then the ``J`` column sums;
    * univariate logit: total successes, ``sum_i i * X_1i``, then the
      per-level totals ``X_+i``;
    * bivariate logit: total successes, ``sum i * X_1i+``,
      ``sum j * X_1+j``, then the per-(i, j) totals ``X_+ij`` in
      lexicographic order.
    """
    k = spec.k
    rows: list[list[int]] = []
    if spec.kind == "independence":
        I, J = spec.levels
        for i in range(I):
            rows.append([1 if c // J == i else 0 for c in range(k)])
        for j in range(J):
            rows.append([1 if c % J == j else 0 for c in range(k)])
    elif spec.kind == "univariate-logit":
        (I,) = spec.levels
        rows.append([1] * I + [0] * I)
        rows.append(list(range(1, I + 1)) + [0] * I)
        for i in range(I):
            rows.append([1 if c % I == i else 0 for c in range(k)])
    else:
        I, J = spec.levels
        n = I * J
        rows.append([1] * n + [0] * n)
        rows.append([c // J + 1 for c in range(n)] + [0] * n)
        rows.append([c % J + 1 for c in range(n)] + [0] * n)
        for cell in range(n):
            rows.append([1 if c % n == cell else 0 for c in range(k)])
    return DesignMatrix(tuple(tuple(r) for r in rows))


def margin_of(matrix: DesignMatrix, table: Sequence[int]) -> tuple[int, ...]:
    """Exact ``A @ n`` in Python integers."""
    if len(table) != matrix.k:
        raise FiberError(f"table has {len(table)} cells, matrix has k={matrix.k}")
    n = [int(x) for x in table]
    return tuple(sum(a * x for a, x in zip(row, n) if a) for row in matrix.rows)


@dataclass(frozen=True)
class FiberSpec:
    """The fiber ``{n >= 0 integer : A n = b}``.

    Built from a raw margin, nonemptiness is not assumed.
    """

    matrix: DesignMatrix
    margin: tuple[int, ...]

    def __post_init__(self):
        margin = tuple(int(b) for b in self.margin)
        if len(margin) != self.matrix.d:
            raise FiberError(f"margin has {len(margin)} entries, matrix has d={self.matrix.d}")
        if any(b < 0 for b in margin):
            raise FiberError("margin entries must be nonnegative")
        object.__setattr__(self, "margin", margin)

    @classmethod
    def from_table(cls, matrix: DesignMatrix, table: Sequence[int]) -> FiberSpec:
        return cls(matrix, margin_of(matrix, as_table(table, matrix.k)))

    @property
    def k(self) -> int:
        return self.matrix.k

    @property
    def d(self) -> int:
        return self.matrix.d


def in_fiber(fiber: FiberSpec, table: Sequence[int]) -> bool:
    if len(table) != fiber.k:
        raise FiberError(f"table has {len(table)} cells, fiber has k={fiber.k}")
    if any(x < 0 for x in table):
        return False
    return margin_of(fiber.matrix, table) == fiber.margin


# -- plain-text I/O ---------------------------------------------------------

def parse_vector(text: str) -> tuple[int, ...]:
    """Integers separated by whitespace and/or commas."""
    parts = [p for p in re.split(r"[\s,]+", text.strip()) if p]
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise FiberError(f"cannot parse integer vector from {text!r}") from None


def parse_matrix(text: str) -> DesignMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FiberError("empty matrix file")
    header = parse_vector(lines[0])
    if len(header) != 2:
        raise FiberError("matrix file must start with a 'd k' line")
    d, k = header
    body = [parse_vector(ln) for ln in lines[1:]]
    if len(body) != d or any(len(r) != k for r in body):
        raise FiberError(f"matrix file declares {d}x{k} but body does not match")
    return DesignMatrix(tuple(body))


def read_matrix(path: str | Path) -> DesignMatrix:
    return parse_matrix(Path(path).read_text())


def read_vector(path: str | Path) -> tuple[int, ...]:
    return parse_vector(Path(path).read_text())
