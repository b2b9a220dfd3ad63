"""Command line interface: ``kmm-eda {solve,bench,pmf,eval}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench
from .eda import EdaConfig, run
from .mallows import distance_pmf, theta_from_expected_distance
from .perm import as_permutation
from .qap import evaluate, load_qaplib


class CliError(Exception):
    pass


def _add_eda_options(parser):
    g = parser.add_argument_group("algorithm parameters")
    g.add_argument("--budget-multiplier", type=int, default=1000,
                   help="evaluation budget as a multiple of n^2 (default: 1000)")
    g.add_argument("--budget", type=int, default=None,
                   help="absolute evaluation budget; overrides --budget-multiplier")
    g.add_argument("--pop", type=int, default=972, help="population size (default: 972)")
    g.add_argument("--gamma", type=float, default=5.14, help="schedule intensity (default: 5.14)")
    g.add_argument("--ek-start-frac", type=float, default=0.5,
                   help="starting expected distance as a fraction of n (default: 0.5)")
    g.add_argument("--ek-end", type=float, default=0.25, help="final expected distance (default: 0.25)")
    g.add_argument("--schedule", choices=("exp", "linear"), default="exp")
    g.add_argument("--kernel-mode", choices=("kernels", "best-only"), default="kernels")
    g.add_argument("--evaluation", choices=("full", "auto"), default="full",
                   help="'auto' chains swap deltas from the kernel centre for close samples")


def _config(args, seed: int) -> EdaConfig:
    return EdaConfig(
        population_size=args.pop,
        gamma=args.gamma,
        ek_start_fraction=args.ek_start_frac,
        ek_end=args.ek_end,
        eval_budget=args.budget,
        budget_multiplier=args.budget_multiplier,
        seed=seed,
        schedule_kind="exponential" if args.schedule == "exp" else "linear",
        kernel_mode=args.kernel_mode.replace("-", "_"),
        evaluation=args.evaluation,
    )


def format_solution(perm, objective: int) -> str:
    perm = np.asarray(perm)
    return "%d\n%s\n%d\n" % (perm.size, " ".join(str(int(v) + 1) for v in perm), objective)


def read_solution(path) -> np.ndarray:
    """Read a 1-based solution file and return the 0-based permutation.

    Accepts the format written by ``solve`` (``n`` / permutation /
    objective) and the QAPLIB ``.sln`` layout (``n objective`` /
    permutation).
    """
    lines = [line.split() for line in Path(path).read_text().splitlines() if line.strip()]
    if not lines:
        raise CliError("empty solution file %s" % path)
    try:
        if len(lines) >= 2 and len(lines[0]) in (1, 2):
            n = int(lines[0][0])
            values = [int(tok) for line in lines[1:] for tok in line]
            if len(values) == n + 1 and len(lines[0]) == 1:
                values = values[:-1]
        else:
            values = [int(tok) for tok in lines[0]]
            n = len(values)
    except ValueError:
        raise CliError("solution file %s holds non-integer tokens" % path) from None
    if len(values) != n:
        raise CliError("solution length %d does not match declared size %d" % (len(values), n))
    try:
        return as_permutation(np.array(values) - 1)
    except ValueError:
        raise CliError("solution in %s is not a permutation of 1..%d" % (path, n)) from None


def cmd_solve(args) -> int:
    inst = load_qaplib(args.instance)
    result = run(inst, _config(args, args.seed))
    out = Path(args.output) if args.output else Path(inst.name + ".sol")
    out.write_text(format_solution(result.best_permutation, result.best_objective))
    print("%s objective=%d evaluations=%d seconds=%.3f"
          % (inst.name, result.best_objective, result.evaluations_used, result.wall_seconds))
    return 0


def cmd_bench(args) -> int:
    paths = bench.find_instances(args.instance_dir)
    registry = bench.load_registry(args.registry)
    instances = [load_qaplib(p) for p in paths]
    rows = bench.run_bench(
        instances,
        registry,
        repetitions=args.reps,
        base_seed=args.seed,
        workers=args.workers,
        config=_config(args, args.seed),
    )
    timing = not args.no_timing
    text = bench.report_csv(rows, timing=timing)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.json:
        Path(args.json).write_text(bench.report_json(rows, timing=timing))
    return 0


def cmd_pmf(args) -> int:
    if args.ek is not None:
        theta = theta_from_expected_distance(args.n, args.ek)
        sys.stdout.write("# n=%d ek=%r theta=%r\n" % (args.n, args.ek, theta))
    else:
        theta = args.theta
    pmf = distance_pmf(args.n, theta, exclude_consensus=args.exclude)
    lines = ["k,p"] + ["%d,%r" % (k, float(p)) for k, p in enumerate(pmf.pk)]
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_eval(args) -> int:
    inst = load_qaplib(args.instance)
    perm = read_solution(args.solution)
    if perm.size != inst.n:
        raise CliError("solution length %d does not match instance size %d" % (perm.size, inst.n))
    print(evaluate(inst, perm))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kmm-eda",
        description="Kernels-of-Mallows EDA for the quadratic assignment problem",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one QAPLIB instance")
    p.add_argument("instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="solution file (default: <instance>.sol)")
    _add_eda_options(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="repeated runs over a directory of instances")
    p.add_argument("instance_dir")
    p.add_argument("registry", help="CSV of name,best_known")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="base seed; run r uses seed+r")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output", help="CSV report path (default: stdout)")
    p.add_argument("--json", help="also write the report as JSON to this path")
    p.add_argument("--no-timing", action="store_true",
                   help="leave the mean_seconds column empty so reports are reproducible byte for byte")
    _add_eda_options(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("pmf", help="print the distance distribution p(K=k)")
    p.add_argument("n", type=int)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--theta", type=float)
    which.add_argument("--ek", type=float, help="target expected distance; theta is solved for")
    p.add_argument("--exclude", action="store_true", help="drop k=0 and renormalise")
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("eval", help="evaluate a solution file")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, OSError, RuntimeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
