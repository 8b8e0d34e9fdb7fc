"""Sequential importance sampling over a fiber and the count estimator.

Two samplers share one loop shape: walk the cells in order, pick the
next value uniformly from a candidate set, multiply the weight by the
set's size.

* ``classical`` draws from the integer interval ``[l_i, u_i]`` given by
  exact-IP or LP bounds. Values inside the interval may have no
  completion, which surfaces later as an empty interval (a rejection).
* ``rejection-free`` draws from the exact support of the cell, so every
  draw completes and its probability is exactly ``1 / weight``.

Rejected draws are kept and contribute zero to the estimator, which
makes ``mean(indicator / q)`` unbiased for ``|F|`` even though the
proposal lives on a larger set.

Every draw gets its own RNG stream seeded by ``(seed, draw_index)``, so
results do not depend on how draws are split across worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from ._stages import step
from .bounds import EXACT_IP, engine, normalize_method
from .enumeration import counter_for
from .errors import EmptyFiberError, FiberError
from .model import FiberSpec, Table

CLASSICAL = "classical"
REJECTION_FREE = "rejection-free"
_SAMPLER_ALIASES = {"classical": CLASSICAL, "free": REJECTION_FREE, "rejection-free": REJECTION_FREE}

DEFAULT_SEED = 20240917


def normalize_sampler(name: str) -> str:
    try:
        return _SAMPLER_ALIASES[name]
    except KeyError:
        raise FiberError(f"unknown sampler {name!r}; expected classical or rejection-free") from None


@dataclass(frozen=True)
class SISConfig:
    method: str = EXACT_IP
    sampler: str = CLASSICAL
    n_samples: int = 100
    seed: int = DEFAULT_SEED
    cell_order: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", normalize_method(self.method))
        object.__setattr__(self, "sampler", normalize_sampler(self.sampler))
        if self.n_samples < 1:
            raise FiberError("n_samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise FiberError("seed must be a 64-bit unsigned integer")
        if self.cell_order is not None:
            object.__setattr__(self, "cell_order", tuple(self.cell_order))


@dataclass(frozen=True)
class SampleDraw:
    """One SIS draw.

    ``table`` is ``None`` for a rejected draw; ``prefix`` then holds the
    values drawn before the failure. ``weight`` is the exact ``1/q`` of
    the sampled path and ``trace`` lists ``(candidates, value)`` per cell
    in sampling order.
    """

    table: Table | None
    rejected_at: int | None
    weight: int
    log_weight: float
    trace: tuple[tuple[int, int], ...]
    prefix: Table = ()

    @property
    def accepted(self) -> bool:
        return self.rejected_at is None

    @property
    def probability(self) -> Fraction:
        return Fraction(1, self.weight)

    @property
    def contribution(self) -> int:
        return self.weight if self.accepted else 0


@dataclass(frozen=True)
class CountEstimate:
    estimate: float
    std_error: float
    n_samples: int
    rejections: int
    log_domain: bool
    log10_estimate: float
    exact: Fraction

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.n_samples


def draw_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for draw ``index`` under ``seed``."""
    return np.random.default_rng([seed, index])


def _uniform_below(rng: np.random.Generator, n: int) -> int:
    if n < 2**62:
        return int(rng.integers(n))
    nbytes = (n.bit_length() + 7) // 8
    while True:
        x = int.from_bytes(rng.bytes(nbytes), "little") >> (8 * nbytes - n.bit_length())
        if x < n:
            return x


def _ordered(fiber: FiberSpec, config: SISConfig):
    if config.cell_order is None:
        return fiber, None
    order = config.cell_order
    return FiberSpec(fiber.matrix.permuted(order), fiber.margin), order


def _finish(values, order, rejected_at, weight, log_weight, trace) -> SampleDraw:
    if order is not None:
        if rejected_at is not None:
            rejected_at = order[rejected_at]
        if rejected_at is None:
            table = [0] * len(values)
            for pos, v in zip(order, values):
                table[pos] = v
            values = table
    if rejected_at is None:
        return SampleDraw(tuple(values), None, weight, log_weight, tuple(trace))
    return SampleDraw(None, rejected_at, weight, log_weight, tuple(trace), tuple(values))


def sample_classical(fiber: FiberSpec, config: SISConfig, rng: np.random.Generator) -> SampleDraw:
    """One draw of the interval sampler; rejection is returned, not raised."""
    fiber, order = _ordered(fiber, config)
    eng = engine(fiber.matrix, config.method)
    plan = counter_for(fiber.matrix).plan
    r = fiber.margin
    values, trace = [], []
    weight, log_weight = 1, 0.0
    for i in range(fiber.k):
        b = eng.bounds(i, r)
        if b.empty:
            return _finish(values, order, i, weight, log_weight, trace)
        width = b.upper - b.lower + 1
        v = b.lower + _uniform_below(rng, width) if width > 1 else b.lower
        weight *= width
        log_weight += math.log(width)
        trace.append((width, v))
        values.append(v)
        r = step(plan, i, r, v)
        if r is None:
            return _finish(values, order, i, weight, log_weight, trace)
    if any(r):
        return _finish(values, order, fiber.k - 1, weight, log_weight, trace)
    return _finish(values, order, None, weight, log_weight, trace)


def sample_rejection_free(fiber: FiberSpec, config: SISConfig, rng: np.random.Generator) -> SampleDraw:
    """One draw from the exact cell supports; never rejects.

    Raises :class:`EmptyFiberError` if the fiber has no tables.
    """
    fiber, order = _ordered(fiber, config)
    counter = counter_for(fiber.matrix)
    plan = counter.plan
    r = fiber.margin
    values, trace = [], []
    weight, log_weight = 1, 0.0
    for i in range(fiber.k):
        supp = counter.support(i, r)
        if not supp:
            # Later cells always have support once the first one does.
            raise EmptyFiberError("fiber is empty")
        width = len(supp)
        v = supp[_uniform_below(rng, width)] if width > 1 else supp[0]
        weight *= width
        log_weight += math.log(width)
        trace.append((width, v))
        values.append(v)
        r = step(plan, i, r, v)
    return _finish(values, order, None, weight, log_weight, trace)


def sample(fiber: FiberSpec, config: SISConfig, index: int) -> SampleDraw:
    """Draw number ``index`` of the run described by ``config``."""
    rng = draw_rng(config.seed, index)
    if config.sampler == CLASSICAL:
        return sample_classical(fiber, config, rng)
    return sample_rejection_free(fiber, config, rng)


def iter_samples(fiber: FiberSpec, config: SISConfig) -> Iterator[SampleDraw]:
    for index in range(config.n_samples):
        yield sample(fiber, config, index)


def _contributions(fiber: FiberSpec, config: SISConfig, start: int, stop: int) -> list[tuple[int, bool]]:
    out = []
    for index in range(start, stop):
        draw = sample(fiber, config, index)
        out.append((draw.contribution, draw.accepted))
    return out


def _collect(fiber: FiberSpec, config: SISConfig, workers: int) -> list[tuple[int, bool]]:
    n = config.n_samples
    if workers <= 1 or n < 2 * workers:
        return _contributions(fiber, config, 0, n)
    chunk = -(-n // (4 * workers))
    spans = [(s, min(s + chunk, n)) for s in range(0, n, chunk)]
    with ProcessPoolExecutor(workers) as pool:
        parts = pool.map(_contributions, *zip(*[(fiber, config, a, b) for a, b in spans]))
        return [c for part in parts for c in part]


def _log10(x: Fraction) -> float:
    if x <= 0:
        return -math.inf
    return math.log10(x.numerator) - math.log10(x.denominator)


def estimate_count(fiber: FiberSpec, config: SISConfig, workers: int = 1) -> CountEstimate:
    """Importance estimate of ``|F|`` from ``config.n_samples`` draws.

    The mean and the population variance of the per-draw contributions
    are formed exactly as rationals; floats appear only in the reported
    summary. ``std_error`` is the population standard deviation over
    ``sqrt(N)``.
    """
    contrib = _collect(fiber, config, workers)
    n = len(contrib)
    total = sum(w for w, _ in contrib)
    total_sq = sum(w * w for w, _ in contrib)
    rejections = sum(1 for _, ok in contrib if not ok)
    mean = Fraction(total, n)
    var = Fraction(total_sq, n) - mean * mean
    log10_mean = _log10(mean)
    try:
        estimate = float(mean)
        log_domain = False
    except OverflowError:
        estimate = math.inf
        log_domain = True
    if var == 0:
        std_error = 0.0
    else:
        std_error = 10 ** (0.5 * (_log10(var) - math.log10(n))) if not log_domain else math.inf
    return CountEstimate(estimate, std_error, n, rejections, log_domain, log10_mean, mean)


def rejection_rate(fiber: FiberSpec, config: SISConfig, workers: int = 1) -> float:
    return estimate_count(fiber, config, workers).rejection_rate
