"""Command-line front end.

Exit codes: 0 success, 1 infeasible or empty result, 2 usage or input
error, 3 resource budget exceeded. Machine-readable output goes to
stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .bounds import PartialAssignment, compute_bounds
from .enumeration import DEFAULT_NODE_BUDGET, count_fiber
from .errors import EmptyFiberError, FiberError, ResourceBudgetExceeded
from .genexp import CSV_HEADER, LOGIT_MODELS, GeneratorConfig, generate_table, run_experiment
from .model import (DesignMatrix, FiberSpec, ModelSpec, as_table, build_design_matrix, in_fiber,
                    margin_of, parse_vector, read_matrix)
from .semigroup import holes_in_box
from .sis import DEFAULT_SEED, SISConfig, estimate_count, iter_samples

EXIT_OK, EXIT_EMPTY, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _vector(text: str) -> tuple[int, ...]:
    """A literal like ``1,2,3`` or the path of a vector file."""
    path = Path(text)
    if path.is_file():
        return parse_vector(path.read_text())
    return parse_vector(text)


def _matrix(args) -> DesignMatrix:
    if args.model and args.matrix:
        raise FiberError("give either --model or --matrix, not both")
    if args.model:
        return build_design_matrix(ModelSpec.parse(args.model))
    if args.matrix:
        return read_matrix(args.matrix)
    raise FiberError("one of --model or --matrix is required")


def _fiber(args) -> FiberSpec:
    matrix = _matrix(args)
    if args.margin is not None and args.table is not None:
        raise FiberError("give either --margin or --table, not both")
    if args.table is not None:
        return FiberSpec.from_table(matrix, _vector(args.table))
    if args.margin is not None:
        return FiberSpec(matrix, _vector(args.margin))
    raise FiberError("one of --margin or --table is required")


def _config(args) -> SISConfig:
    order = _vector(args.cell_order) if args.cell_order else None
    return SISConfig(args.method, args.sampler, args.samples, args.seed, order)


def _fmt(values) -> str:
    return ",".join(map(str, values))


def cmd_bounds(args, out) -> int:
    state = PartialAssignment(_fiber(args), _vector(args.prefix) if args.prefix else ())
    b = compute_bounds(state, args.method, args.cell)
    print(b, file=out)
    return EXIT_EMPTY if b.empty else EXIT_OK


def cmd_sample(args, out) -> int:
    for draw in iter_samples(_fiber(args), _config(args)):
        if draw.accepted:
            print(f"{_fmt(draw.table)} {draw.weight}", file=out)
        else:
            print(f"REJECTED@{draw.rejected_at} {draw.weight}", file=out)
    return EXIT_OK


def cmd_estimate(args, out) -> int:
    config = _config(args)
    est = estimate_count(_fiber(args), config, workers=args.workers)
    record = {
        "estimate": None if est.log_domain else est.estimate,
        "log10_estimate": None if est.exact == 0 else est.log10_estimate,
        "stderr": None if est.log_domain else est.std_error,
        "rejections": est.rejections,
        "N": est.n_samples,
        "seed": config.seed,
    }
    print(json.dumps(record), file=out)
    return EXIT_OK


def cmd_enumerate(args, out) -> int:
    fiber = _fiber(args)
    if args.check is not None:
        ok = in_fiber(fiber, as_table(_vector(args.check), fiber.k))
        print("IN_FIBER" if ok else "NOT_IN_FIBER", file=out)
        return EXIT_OK if ok else EXIT_EMPTY
    cap = args.cap if args.cap is not None else (None if not args.list else 10**6)
    result = count_fiber(fiber, cap=cap, node_budget=args.budget)
    print(result.count, file=out)
    if args.list:
        if result.tables is None:
            print(f"count exceeds --cap {cap}; tables not listed", file=sys.stderr)
        else:
            for t in result.tables:
                print(_fmt(t), file=out)
    return EXIT_OK if result.count else EXIT_EMPTY


def cmd_semigroup(args, out) -> int:
    matrix = _matrix(args)
    box = _vector(args.box)
    if len(box) == 1:
        box = box * matrix.d
    analysis = holes_in_box(matrix, box)
    for h in analysis.holes:
        print(_fmt(h), file=out)
    print("SATURATED" if analysis.saturated_in_box else "NOT-SATURATED", file=out)
    return EXIT_OK


def cmd_generate(args, out) -> int:
    if args.model:
        k = ModelSpec.parse(args.model).k
    elif args.k:
        k = args.k
    else:
        raise FiberError("one of --model or --k is required")
    if args.margins and not args.model:
        raise FiberError("--margins needs --model")
    gen = GeneratorConfig.for_option(args.option, k, args.lam, args.seed)
    for index in range(args.count):
        rng = np.random.default_rng([args.seed, index])
        table = generate_table(gen, rng)
        if args.margins:
            matrix = build_design_matrix(ModelSpec.parse(args.model))
            print(f"{_fmt(table)} {_fmt(margin_of(matrix, table))}", file=out)
        else:
            print(_fmt(table), file=out)
    return EXIT_OK


def cmd_experiment(args, out) -> int:
    models = [ModelSpec.parse(m) for m in args.models] if args.models else list(LOGIT_MODELS)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for option in args.option:
        rows = run_experiment(option, models, args.samples, args.tables, args.seed, args.lam, args.workers)
        for row in rows:
            writer.writerow(row.csv_fields())
    return EXIT_OK


def _add_fiber_args(p, margin=True):
    p.add_argument("--model", help="indep:I,J | unilogit:I | bilogit:I,J")
    p.add_argument("--matrix", help="matrix file: 'd k' header then d rows")
    if margin:
        p.add_argument("--margin", help="margin vector b, literal or file")
        p.add_argument("--table", help="observed table; the margin is A @ table")


def _add_sis_args(p):
    p.add_argument("--sampler", choices=["classical", "free", "rejection-free"], default="classical")
    p.add_argument("--method", choices=["ip", "lp"], default="ip")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--cell-order", help="permutation of 0..k-1 to sample cells in")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fibersis", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="bounds for the next cell after a prefix")
    _add_fiber_args(p)
    p.add_argument("--prefix", default="", help="already-fixed cell values")
    p.add_argument("--cell", type=int, help="0-based cell index; must be the next unfixed one")
    p.add_argument("--method", choices=["ip", "lp"], default="ip")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sample", help="emit SIS draws, one per line, with weights")
    _add_fiber_args(p)
    _add_sis_args(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate", help="estimate the fiber size; prints JSON")
    _add_fiber_args(p)
    _add_sis_args(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("enumerate", help="exact fiber count (and tables)")
    _add_fiber_args(p)
    p.add_argument("--cap", type=int)
    p.add_argument("--list", action="store_true")
    p.add_argument("--check", help="only test whether this table lies in the fiber")
    p.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET, help="search node budget")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("semigroup", help="holes of the column semigroup within a box")
    _add_fiber_args(p, margin=False)
    p.add_argument("--box", required=True, help="caps b1,...,bd (or one cap for all)")
    p.set_defaults(func=cmd_semigroup)

    p = sub.add_parser("generate", help="random tables from the two generators")
    p.add_argument("--option", type=int, choices=[1, 2], default=1)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--model")
    p.add_argument("--k", type=int)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--margins", action="store_true", help="also print A @ table (needs --model)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("experiment", help="rejection-count experiment; prints CSV")
    p.add_argument("--option", type=int, choices=[1, 2], nargs="+", default=[1, 2])
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--models", nargs="+", help="model shorthands (default: the nine logit rows)")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--tables", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except EmptyFiberError as exc:
        print(f"fibersis: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except FiberError as exc:
        print(f"fibersis: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceBudgetExceeded as exc:
        print(f"fibersis: {exc} {exc.progress}", file=sys.stderr)
        return EXIT_BUDGET
