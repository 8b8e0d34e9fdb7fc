import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from fibersis.bounds import (CellBounds, PartialAssignment, bounds_exact_ip, bounds_lp,
                             compute_bounds)
from fibersis.enumeration import counter_for
from fibersis.errors import FiberError
from fibersis.model import DesignMatrix, FiberSpec, ModelSpec, build_design_matrix
from oracles import brute_fiber, brute_support, float_lp_range


def alpha_fiber(alpha):
    return FiberSpec(DesignMatrix(((1, alpha),)), (alpha + 1,))


@pytest.mark.parametrize("alpha", [2, 3, 8, 98])
def test_alpha_example(alpha):
    state = PartialAssignment(alpha_fiber(alpha))
    ip = bounds_exact_ip(state)
    lp = bounds_lp(state)
    assert (ip.lower, ip.upper, ip.method) == (1, alpha + 1, "exact-ip")
    assert (lp.lower, lp.upper, lp.method) == (0, alpha + 1, "lp-relaxation")


def test_alpha_example_second_cell():
    fiber = alpha_fiber(8)
    assert str(bounds_lp(PartialAssignment(fiber, (3,)))) == "EMPTY"
    assert bounds_exact_ip(PartialAssignment(fiber, (3,))).empty
    assert str(bounds_lp(PartialAssignment(fiber, (1,)))) == "1 1"


def test_independence_2x2_first_cell():
    fiber = FiberSpec(build_design_matrix(ModelSpec.independence(2, 2)), (1, 1, 1, 1))
    state = PartialAssignment(fiber)
    for b in (bounds_exact_ip(state, 0), bounds_lp(state, 0)):
        assert (b.lower, b.upper, b.empty) == (0, 1, False)


@pytest.mark.parametrize("spec", [ModelSpec.independence(3, 3), ModelSpec.bivariate_logit(2, 2)])
def test_zero_residual_pins_cell(spec):
    A = build_design_matrix(spec)
    table = [0] * spec.k
    table[0] = 2
    fiber = FiberSpec.from_table(A, table)
    state = PartialAssignment(fiber, (2,))
    for method in ("ip", "lp"):
        b = compute_bounds(state, method)
        assert (b.lower, b.upper) == (0, 0)


def test_errors():
    fiber = alpha_fiber(8)
    with pytest.raises(FiberError):
        bounds_exact_ip(PartialAssignment(fiber), 5)
    with pytest.raises(FiberError):
        bounds_lp(PartialAssignment(fiber), 1)
    with pytest.raises(FiberError):
        PartialAssignment(fiber, (10,))          # residual goes negative
    with pytest.raises(FiberError):
        PartialAssignment(fiber, (1, 1))         # nothing left to bound
    with pytest.raises(FiberError):
        compute_bounds(PartialAssignment(fiber), "shuttle")


def test_cell_bounds_width():
    assert CellBounds(2, 5, "exact-ip").width == 4
    assert CellBounds.nothing("exact-ip").width == 0


FAMILIES = [ModelSpec.independence(2, 3), ModelSpec.independence(3, 3),
            ModelSpec.univariate_logit(3), ModelSpec.univariate_logit(4),
            ModelSpec.bivariate_logit(2, 2)]


def random_states(seed, count, max_entry=3):
    """Small partial assignments; some prefixes are feasible, some only LP-feasible."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        spec = rng.choice(FAMILIES)
        A = build_design_matrix(spec)
        table = [rng.randint(0, max_entry) for _ in range(spec.k)]
        fiber = FiberSpec.from_table(A, table)
        members = brute_fiber(A.rows, fiber.margin)
        base = rng.choice(members)
        cut = rng.randrange(spec.k)
        prefix = list(base[:cut])
        if prefix and rng.random() < 0.4:
            j = rng.randrange(cut)
            prefix[j] = max(0, prefix[j] + rng.choice([-1, 1]))
        try:
            out.append(PartialAssignment(fiber, tuple(prefix)))
        except FiberError:
            continue
    return out


@pytest.mark.parametrize("state", random_states(3, 120), ids=lambda s: f"k{s.fiber.k}p{len(s.prefix)}")
def test_exact_ip_matches_brute_force(state):
    A = state.fiber.matrix
    support = brute_support(A.rows, state.fiber.margin, state.prefix)
    ip = bounds_exact_ip(state)
    if not support:
        assert ip.empty
    else:
        assert (ip.lower, ip.upper) == (support[0], support[-1])


@pytest.mark.parametrize("state", random_states(4, 80), ids=lambda s: f"k{s.fiber.k}p{len(s.prefix)}")
def test_lp_matches_float_lp_and_sandwiches_ip(state):
    A = state.fiber.matrix
    lp = bounds_lp(state)
    ref = float_lp_range(A.rows, state.residual, state.next_cell)
    if ref is None:
        assert lp.empty
    else:
        lo, hi = math.ceil(ref[0] - 1e-9), math.floor(ref[1] + 1e-9)
        assert lp.empty == (lo > hi)
        if not lp.empty:
            assert (lp.lower, lp.upper) == (lo, hi)
    ip = bounds_exact_ip(state)
    if not ip.empty:
        assert not lp.empty
        assert lp.lower <= ip.lower <= ip.upper <= lp.upper


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FAMILIES), st.data())
def test_ip_endpoints_are_attained(spec, data):
    A = build_design_matrix(spec)
    table = data.draw(st.lists(st.integers(0, 4), min_size=spec.k, max_size=spec.k))
    fiber = FiberSpec.from_table(A, table)
    cut = data.draw(st.integers(0, spec.k - 1))
    state = PartialAssignment(fiber, tuple(table[:cut]))
    ip = bounds_exact_ip(state)
    assert not ip.empty           # the observed table completes its own prefix
    counter = counter_for(A)
    for v in (ip.lower, ip.upper):
        residual = [r - a * v for r, a in zip(state.residual, A.column(cut))]
        assert min(residual) >= 0
        if cut + 1 < spec.k:
            assert counter.count(cut + 1, residual) > 0
        else:
            assert not any(residual)
