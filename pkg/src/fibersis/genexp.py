"""Random test tables and the rejection-count experiment.

Each cell independently gets a large value in ``[1, 1000]`` with
probability ``5 / 2**k``, a small positive value with probability
``1/2 - 5/2**k``, and zero otherwise. The small value is
``1 + Poisson(lam)`` (option 1) or uniform on ``[1, 10]`` (option 2).
If no cell ends up above 10, one uniformly chosen cell is overwritten
with a uniform draw from ``[1, 1000]``.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bounds import EXACT_IP
from .errors import FiberError
from .model import FiberSpec, ModelSpec, Table, build_design_matrix
from .sis import CLASSICAL, SISConfig, estimate_count

POISSON = "poisson"
UNIFORM = "uniform"
OPTION_KIND = {1: POISSON, 2: UNIFORM}

LOGIT_MODELS = tuple(
    [ModelSpec.univariate_logit(I) for I in range(5, 11)]
    + [ModelSpec.bivariate_logit(2, J) for J in (5, 6, 7)]
)

CSV_HEADER = ("option", "model", "levels", "time_sec", "reject_tables")


@dataclass(frozen=True)
class GeneratorConfig:
    kind: str
    k: int
    lam: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (POISSON, UNIFORM):
            raise FiberError(f"kind: expected {POISSON!r} or {UNIFORM!r}, got {self.kind!r}")
        if self.k < 1:
            raise FiberError("k must be >= 1")
        if not self.lam > 0:
            raise FiberError("lam must be positive")

    @classmethod
    def for_option(cls, option: int, k: int, lam: float = 1.0, seed: int = 0) -> GeneratorConfig:
        try:
            return cls(OPTION_KIND[option], k, lam, seed)
        except KeyError:
            raise FiberError(f"option must be 1 or 2, got {option!r}") from None


LARGE, SMALL, ZERO = "large", "small", "zero"


def draw_cells(config: GeneratorConfig, rng: np.random.Generator) -> list[tuple[str, int]]:
    """Per-cell ``(branch, value)`` before the fallback rule is applied."""
    big = 5 / 2**config.k
    cells = []
    for _ in range(config.k):
        r = 1.0 - rng.random()      # uniform on (0, 1]
        if r <= big:
            cells.append((LARGE, int(rng.integers(1, 1001))))
        elif r <= 0.5:
            if config.kind == POISSON:
                cells.append((SMALL, 1 + int(rng.poisson(config.lam))))
            else:
                cells.append((SMALL, int(rng.integers(1, 11))))
        else:
            cells.append((ZERO, 0))
    return cells


def generate_table(config: GeneratorConfig, rng: np.random.Generator | None = None) -> Table:
    if rng is None:
        rng = np.random.default_rng(config.seed)
    cells = [v for _, v in draw_cells(config, rng)]
    if max(cells) <= 10:
        cells[int(rng.integers(config.k))] = int(rng.integers(1, 1001))
    return tuple(cells)


@dataclass(frozen=True)
class ExperimentRow:
    option: int
    model: str
    levels: tuple[int, ...]
    time_sec: float
    reject_tables: int
    tables: int = 100

    def __post_init__(self):
        if not 0 <= self.reject_tables <= self.tables:
            raise FiberError("reject_tables out of range")

    def csv_fields(self) -> list[str]:
        return [
            str(self.option),
            "univariate" if self.model == "univariate-logit" else
            "bivariate" if self.model == "bivariate-logit" else self.model,
            ",".join(map(str, self.levels)),
            f"{self.time_sec:.2f}",
            str(self.reject_tables),
        ]


def _table_rng(seed: int, option: int, model_index: int, table_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, option, model_index, table_index])


def _one_table(option: int, model: ModelSpec, model_index: int, table_index: int,
               n_samples: int, seed: int, lam: float) -> bool:
    """Generate one table, run SIS on its fiber, report whether any draw was rejected."""
    rng = _table_rng(seed, option, model_index, table_index)
    gen = GeneratorConfig.for_option(option, model.k, lam)
    table = generate_table(gen, rng)
    fiber = FiberSpec.from_table(build_design_matrix(model), table)
    sis_seed = int(rng.integers(2**63))
    est = estimate_count(fiber, SISConfig(EXACT_IP, CLASSICAL, n_samples, sis_seed))
    return est.rejections > 0


def run_experiment(option: int, models: Sequence[ModelSpec] = LOGIT_MODELS, n_samples: int = 100,
                   tables: int = 100, seed: int = 0, lam: float = 1.0,
                   workers: int = 1) -> list[ExperimentRow]:
    """Count, per model, how many random tables see at least one rejection.

    Bounds are exact-IP and the sampler is classical. ``time_sec`` is
    wall time per model row and is the only non-reproducible field.
    """
    if n_samples < 1 or tables < 1:
        raise FiberError("n_samples and tables must be >= 1")
    GeneratorConfig.for_option(option, 1, lam)
    rows = []
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for mi, model in enumerate(models):
            t0 = time.perf_counter()
            args = [(option, model, mi, t, n_samples, seed, lam) for t in range(tables)]
            if pool is None:
                flags = [_one_table(*a) for a in args]
            else:
                flags = list(pool.map(_one_table, *zip(*args)))
            rows.append(ExperimentRow(option, model.kind, model.levels,
                                      time.perf_counter() - t0, sum(flags), tables))
    finally:
        if pool is not None:
            pool.shutdown()
    return rows
