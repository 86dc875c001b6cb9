"""Command line front end.

Subcommands: plan, search, recover, approx (full pipeline), dispersion,
adversary, curves.  Raw trial data goes to CSV, aggregates to JSON; both
are pure functions of the configuration and the master seed.

Exit codes: 0 success, 2 configuration error, 3 budget or precondition
error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import rng
from .adversary import fool_deterministic, fool_randomized
from .dispersion import (PointSet, dispersion_lower_estimate, exact_dispersion,
                         halton, uniform_pointset)
from .errors import (BudgetExhaustedError, BudgetTooSmallError, DomainError,
                     InstanceTooLargeError, NonzeroCenterError, ParameterError)
from .pipeline import (ExperimentConfig, convergence_sweep, fit_order,
                       run_pipeline, wilson_interval)
from .recovery import RecoveryConfig, recover
from .search import (SubsetSearchParams, plan, search_deterministic,
                     search_subset, search_uniform_multi, search_uniform_single)
from .specs import approximant_to_dict, tensor_from_spec
from .tensor import QueryOracle, sup_distance_bound

_CONFIG_ERRORS = (DomainError, KeyError, ValueError, json.JSONDecodeError,
                  FileNotFoundError)
_PRECONDITION_ERRORS = (ParameterError, BudgetTooSmallError,
                        BudgetExhaustedError, InstanceTooLargeError,
                        NonzeroCenterError)


def _write_csv(path: Path, rows: Sequence[Dict[str, Any]],
               header: Sequence[str]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(row.get(k)) for k in header])


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, bool):
        return "true" if v else "false"
    return "" if v is None else str(v)


def _emit(obj: Dict[str, Any], out: Optional[Path], name: str):
    text = json.dumps(obj, indent=2, default=_json_default)
    if out is None:
        print(text)
    else:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text + "\n")
        print(f"wrote {out / name}")


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o)}")


def _load_json(path: str) -> Dict[str, Any]:
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_plan(args) -> int:
    bp = plan(args.r, args.M, args.d, args.eps, V=args.V, p=args.p,
              prefer_deterministic=args.deterministic)
    out = {"regime": bp.regime, "n1": bp.n1, "n2": bp.n2,
           "success_prob_lower": bp.success_prob_lower,
           "inputs": {"r": bp.r, "M": bp.M, "d": bp.d, "eps": bp.eps,
                      "V": bp.V, "p": bp.p}}
    if bp.subset_params is not None:
        sp = bp.subset_params
        out["subset_params"] = {"delta_star": sp.delta_star, "d_star": sp.d_star,
                               "alpha": sp.alpha, "c_prob": sp.c_prob}
    _emit(out, args.out, "plan.json")
    return 0


def cmd_search(args) -> int:
    spec = _load_json(args.config)
    tensor = tensor_from_spec(spec)
    oracle = QueryOracle(tensor)
    seed = args.seed
    if args.strategy == "single":
        outcome = search_uniform_single(oracle, seed)
    elif args.strategy == "multi":
        outcome = search_uniform_multi(oracle, args.n1, seed)
    elif args.strategy == "subset":
        params = SubsetSearchParams.from_problem(tensor.r, tensor.M, args.eps)
        outcome = search_subset(oracle, params, args.n1, seed)
    elif args.strategy == "det":
        ps = (halton(args.n1, tensor.d) if args.pointset == "halton"
              else uniform_pointset(args.n1, tensor.d, seed))
        outcome = search_deterministic(oracle, ps)
    else:
        raise ParameterError(f"unknown strategy {args.strategy!r}")
    _emit({"found": outcome.found,
           "z_star": None if outcome.z_star is None else outcome.z_star.tolist(),
           "value": outcome.value,
           "queries_used": outcome.queries_used,
           "iterations": outcome.iterations}, args.out, "search.json")
    return 0


def cmd_recover(args) -> int:
    spec = _load_json(args.config)
    tensor = tensor_from_spec(spec)
    z = np.array([float(t) for t in args.z.split(",")])
    oracle = QueryOracle(tensor, budget=args.budget)
    approx = recover(oracle, z, RecoveryConfig(r=tensor.r, budget_n2=args.budget))
    upper, lower = sup_distance_bound(tensor, approx.line_interpolants,
                                      approx.center_value, seed=args.seed)
    _emit(approximant_to_dict(approx), args.out, "approximant.json")
    rows = [{"error_upper": upper, "error_lower": lower,
             "queries": oracle.query_count}]
    if args.out is not None:
        _write_csv(args.out / "error.csv", rows, ["error_upper", "error_lower", "queries"])
    else:
        print(f"error_upper={upper!r} error_lower={lower!r} queries={oracle.query_count}")
    return 0


def cmd_approx(args) -> int:
    raw = _load_json(args.config)
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.trials is not None:
        raw["trials"] = args.trials
    if args.threads is not None:
        raw["threads"] = args.threads
    cfg = ExperimentConfig.from_dict(raw)
    rows, summary = run_pipeline(cfg)
    header = ["trial", "seed", "queries_phase1", "queries_phase2", "found",
              "error_upper", "error_lower"]
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        _write_csv(args.out / "trials.csv", rows, header)
        print(f"wrote {args.out / 'trials.csv'}")
    _emit(summary, args.out, "summary.json")
    return 0


def cmd_dispersion(args) -> int:
    if args.points is not None:
        ps = PointSet.from_csv(args.points)
    elif args.generator == "halton":
        ps = halton(args.n, args.d)
    else:
        ps = uniform_pointset(args.n, args.d, args.seed)
    if args.export is not None:
        ps.to_csv(args.export)
        print(f"wrote {args.export}")
    if args.estimate:
        value = dispersion_lower_estimate(ps, boxes=args.boxes, seed=args.seed)
        out = {"dispersion_lower_estimate": value, "n": ps.n, "d": ps.d}
    else:
        res = exact_dispersion(ps)
        out = {"dispersion": res.value, "n": ps.n, "d": ps.d,
               "witness_box": {"lower": res.witness_box.lower.tolist(),
                               "upper": res.witness_box.upper.tolist()}}
    _emit(out, args.out, "dispersion.json")
    return 0


def _adversary_strategy(name: str, d: int):
    """Built-in strategies for the lower-bound harness."""
    if name == "zero":
        def zero_det(oracle):
            return None

        def zero_ran(oracle, seed):
            return None
        return zero_det, zero_ran
    if name == "halton-scan":
        def det(oracle):
            budget = oracle.budget if oracle.budget is not None else 1
            ps = halton(budget, oracle.d)
            outcome = search_deterministic(oracle, ps)
            return None  # scan only: output stays zero unless recovered
        return det, None
    if name == "uniform-recover":
        def ran(oracle, seed):
            budget = oracle.budget
            n1 = max(1, budget // 2)
            outcome = search_uniform_multi(oracle, n1, seed)
            if not outcome.found:
                return None
            r = oracle.target.r
            n2 = budget - outcome.queries_used
            from .recovery import min_budget
            if n2 < min_budget(oracle.d, r):
                return None
            rec = recover(oracle, outcome.z_star,
                          RecoveryConfig(r=r, budget_n2=n2))
            return rec
        return None, ran
    raise ParameterError(f"unknown adversary strategy {name!r}")


def cmd_adversary(args) -> int:
    det, ran = _adversary_strategy(args.strategy, args.d)
    if args.mode == "det":
        if det is None:
            raise ParameterError(f"strategy {args.strategy!r} is randomized only")
        err, (k, plus, minus) = fool_deterministic(det, args.d, args.r, args.n)
        out = {"mode": "det", "certified_error_lower": err,
               "untouched_orthant": k, "n": args.n, "d": args.d, "r": args.r,
               "theorem_floor": 1.0}
        _emit(out, args.out, "adversary.json")
        return 0
    if ran is None:
        raise ParameterError(f"strategy {args.strategy!r} is deterministic only")
    report = fool_randomized(ran, args.d, args.r, args.n, args.trials, args.seed)
    rows = [{"trial": t, "error": float(e)}
            for t, e in enumerate(report.trial_errors)]
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        _write_csv(args.out / "adversary_trials.csv", rows, ["trial", "error"])
    _emit({"mode": "ran", "rms_error": report.rms_error,
           "theorem_floor": report.theorem_floor,
           "ci_halfwidth": report.ci_halfwidth,
           "passes_floor": report.passes_floor,
           "trials": args.trials, "n": args.n, "d": args.d, "r": args.r},
          args.out, "adversary.json")
    return 0


def cmd_curves(args) -> int:
    budgets = [int(b) for b in args.budgets.split(",")]
    pairs = convergence_sweep(args.d, args.r, budgets, seed=args.seed)
    rows = [{"n2": n, "error_upper": e} for n, e in pairs]
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        _write_csv(args.out / "curve.csv", rows, ["n2", "error_upper"])
    slope, stderr = fit_order(pairs)
    _emit({"slope": slope, "stderr": stderr, "r": args.r, "d": args.d,
           "pairs": pairs}, args.out, "curve.json")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rankone",
        description="Two-phase approximation of rank-one tensor products "
                    "from point evaluations.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed_default=0):
        p.add_argument("--out", type=Path, default=None,
                       help="output directory (default: print JSON to stdout)")
        p.add_argument("--seed", type=int, default=seed_default, help="master seed")

    p = sub.add_parser("plan", help="budgets and guarantees for a problem")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--V", type=float, default=None)
    p.add_argument("--p", type=float, default=0.5,
                   help="target failure probability")
    p.add_argument("--deterministic", action="store_true",
                   help="prefer the low-dispersion scan in the support regime")
    common(p)
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("search", help="phase 1 only, on a tensor spec")
    p.add_argument("--config", required=True, help="tensor spec JSON file")
    p.add_argument("--strategy", choices=["single", "subset", "multi", "det"],
                   required=True)
    p.add_argument("--n1", type=int, default=1)
    p.add_argument("--eps", type=float, default=0.1,
                   help="target accuracy (subset strategy parameters)")
    p.add_argument("--pointset", choices=["halton", "uniform"], default="halton")
    common(p)
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("recover", help="phase 2 from a known nonzero point")
    p.add_argument("--config", required=True, help="tensor spec JSON file")
    p.add_argument("--z", required=True, help="comma-separated coordinates of z*")
    p.add_argument("--budget", type=int, required=True)
    common(p)
    p.set_defaults(fn=cmd_recover)

    p = sub.add_parser("approx", help="full pipeline over repeated trials")
    p.add_argument("--config", required=True, help="experiment config JSON file")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_approx)

    p = sub.add_parser("dispersion", help="dispersion of a point set")
    p.add_argument("--points", default=None, help="CSV file, one point per row")
    p.add_argument("--generator", choices=["halton", "uniform"], default="halton")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--estimate", action="store_true",
                   help="Monte-Carlo lower estimate instead of the exact value")
    p.add_argument("--boxes", type=int, default=10_000)
    p.add_argument("--export", default=None, help="write the point set to this CSV")
    common(p)
    p.set_defaults(fn=cmd_dispersion)

    p = sub.add_parser("adversary", help="curse-of-dimensionality harness")
    p.add_argument("--mode", choices=["det", "ran"], required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--n", type=int, required=True, help="query budget")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--strategy", default="zero",
                   choices=["zero", "halton-scan", "uniform-recover"])
    common(p)
    p.set_defaults(fn=cmd_adversary)

    p = sub.add_parser("curves", help="error against phase-2 budget, with slope")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--budgets", default="31,61,121,241,481",
                   help="comma-separated phase-2 budgets")
    common(p)
    p.set_defaults(fn=cmd_curves)

    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except _PRECONDITION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
