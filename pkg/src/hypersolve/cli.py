"""Command-line interface: solve / gradcheck / generate / oracle / validate."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import cones, geometry, harness, mainalgo
from .errors import HypersolveError, SchemaError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypersolve")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the restarting solver on a problem file")
    p.add_argument("--problem", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--l1-est", type=float, default=1e-8)
    p.add_argument("--budget", type=int, default=1_000_000)
    p.add_argument("--z-star", type=float, default=None)
    p.add_argument("--mode", choices=["mainalgo", "agm"], default="mainalgo")
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--warm-start", default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("gradcheck", help="finite-difference check of the smoothed gradients")
    p.add_argument("--problem", required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("generate", help="emit a seeded desk-scale problem file")
    p.add_argument("--family", choices=["lp", "socp"], required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n-vars", type=int, default=6)
    p.add_argument("--n-cons", type=int, default=2)
    p.add_argument("--out", default=None)

    p = sub.add_parser("oracle", help="independent optimum for a desk-scale problem")
    p.add_argument("--problem", required=True)

    p = sub.add_parser("validate", help="check a problem file's cone and geometry")
    p.add_argument("--problem", required=True)
    return parser


def _load_instance(path):
    with open(path, "r", encoding="utf-8") as fh:
        return harness.parse_problem(fh.read())


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_solve(args) -> int:
    inst = _load_instance(args.problem)
    if args.mode == "mainalgo" and args.mu is not None:
        print("--mu is only valid with --mode agm", file=sys.stderr)
        return 2
    if args.mode == "agm" and args.mu is None:
        print("--mode agm requires --mu", file=sys.stderr)
        return 2
    if args.warm_start:
        with open(args.warm_start, "r", encoding="utf-8") as fh:
            v_in = np.array(json.load(fh), dtype=float)
    else:
        v_in = harness.default_warm_start(inst)
    cfg = mainalgo.MainConfig(
        eps=args.eps, L1_est=args.l1_est, grad_budget=args.budget, z_star_hint=args.z_star
    )
    if args.mode == "agm":
        report = mainalgo.solve_agm(inst, v_in, args.mu, cfg)
    else:
        report = mainalgo.solve(inst, v_in, cfg)
    _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.out)
    return 0


def _cmd_gradcheck(args) -> int:
    inst = _load_instance(args.problem)
    report = harness.gradcheck(inst, args.mu, args.trials, args.seed)
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    worst = max(report["max_rel_error_max_side"], report["max_rel_error_min_side"])
    return 0 if worst <= 1e-6 else 1


def _cmd_generate(args) -> int:
    if args.family == "lp":
        data = harness.generate_lp(args.n_vars, args.n_cons, args.seed)
    else:
        data = harness.generate_socp_segment(args.seed)
    _emit(json.dumps(data, indent=2) + "\n", args.out)
    return 0


def _cmd_oracle(args) -> int:
    inst = _load_instance(args.problem)
    try:
        result = harness.oracle_lp(inst)
    except HypersolveError:
        result = harness.oracle_segment(inst)
    sys.stdout.write(json.dumps(result.to_dict(), indent=2) + "\n")
    return 0


def _cmd_validate(args) -> int:
    inst = _load_instance(args.problem)
    notes = cones.validate_interior(inst.cone, inst.e)
    geom = inst.geometry
    for line in notes:
        print(line)
    print(f"degree: {inst.degree}")
    print(f"dimension: {inst.dim}")
    print(f"dim L: {geom.dim_L}")
    if geom.degenerate_dimension:
        print("note: L is zero-dimensional; level sets are single points")
    if geom.degenerate_objective:
        print("note: objective is orthogonal to the constraint null space")
    return 0


def run(argv) -> int:
    """Dispatch a CLI invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    handlers = {
        "solve": _cmd_solve,
        "gradcheck": _cmd_gradcheck,
        "generate": _cmd_generate,
        "oracle": _cmd_oracle,
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except HypersolveError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
