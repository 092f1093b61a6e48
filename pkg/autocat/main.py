# autocat/main.py
"""
Command-line entry point: python -m autocat.main <command> [options]

Exit codes:
  0  success
  1  numerical or verification failure
  2  usage or configuration error
  3  infrastructure error (scenario plumbing, file system)
"""

import argparse
import json
import logging
import math
import os
import sys
from typing import Callable, List, Optional, Tuple

import pandas as pd
from pydantic import ValidationError

from .engine.eigen import principal_eigenpair
from .engine.grid import build_mesh, read_grid_function, residual_norm
from .engine.nonlinearity import classify, same
from .engine.thresholds import (
    caseIb_admissible,
    lambda_c,
    logistic_threshold,
    threshold_caseIV_nonexistence,
    threshold_caseV,
    threshold_caseVI,
    threshold_caseVII,
    threshold_fold_caseI,
    window_constant,
)
from .engine.verdicts import RESULTS
from .errors import ParameterError, ScenarioError, SolverError
from .programs.models_grid import Domain
from .schemas.run_config import OUTPUT_DIR_ENV, RunConfig, load_run_config
from .services.continuation import continue_branch, sweep_lambda
from .services.diagram import describe, preset_names, run_diagram
from .services.export import write_branch, write_json, write_profile, write_solve_report, write_summary
from .services.scenarios import SUITES, get_scenario, scenario_suite
from .services.shooting import find_flat_profile, radial_shoot, search_flat_profile
from .services.solve import is_nontrivial, solve_with_method
from .services.verify import FLAT_HEIGHTS, run_scenario
from .utils.logging_config import configure_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INFRASTRUCTURE = 3

NOT_APPLICABLE = "n/a (regime)"


def _default_output_dir() -> str:
    return os.environ.get(OUTPUT_DIR_ENV, "autocat_out")


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2))


# =======================================================
# classify / thresholds
# =======================================================


def cmd_classify(args: argparse.Namespace) -> int:
    tag = classify(args.m, args.n)
    _print_json(
        {
            "case": str(tag),
            "tag": tag.tag.value,
            "subcase": tag.subcase,
            "results": {key: RESULTS[key] for key in SUITES[tag.tag]},
        }
    )
    return EXIT_OK


def _needs(condition: bool, message: str) -> None:
    if not condition:
        raise ParameterError(message)


def threshold_table(m: float, n: float, dim: int, domain: Domain, cells: int) -> pd.DataFrame:
    """Every closed-form value with its regime check; inapplicable rows read NOT_APPLICABLE."""
    lambda1 = principal_eigenpair(build_mesh(domain, cells)).lambda1

    def admissible() -> str:
        interval = caseIb_admissible(m, dim)
        return f"({interval.lower:.17g}, {interval.upper:.17g})"

    def caseIV() -> float:
        _needs(same(n, m + 1.0), "needs n = m + 1")
        return threshold_caseIV_nonexistence(m, lambda1)

    def linear(fn: Callable[[float, float], float]) -> Callable[[], float]:
        def value() -> float:
            _needs(same(m, 1.0), "needs m = 1")
            return fn(n, lambda1)

        return value

    def logistic() -> float:
        _needs(same(m, 1.0) and same(n, 1.0), "needs m = n = 1")
        return logistic_threshold(lambda1)

    rows: List[Tuple[str, Callable[[], object]]] = [
        ("lambda1", lambda: lambda1),
        ("lambda_c", lambda: lambda_c(m, n)),
        ("threshold_fold_caseI", lambda: threshold_fold_caseI(m, n)),
        ("caseIb_admissible", admissible),
        ("window_constant", lambda: window_constant(m, n)),
        ("threshold_caseIV_nonexistence", caseIV),
        ("threshold_caseV", linear(threshold_caseV)),
        ("threshold_caseVI", linear(threshold_caseVI)),
        ("threshold_caseVII", linear(threshold_caseVII)),
        ("logistic_threshold", logistic),
    ]
    records = []
    for name, compute in rows:
        try:
            value = compute()
        except ParameterError:
            value = NOT_APPLICABLE
        if isinstance(value, float):
            value = f"{value:.17g}"
        records.append({"threshold": name, "value": value})
    return pd.DataFrame(records, columns=["threshold", "value"])


def cmd_thresholds(args: argparse.Namespace) -> int:
    classify(args.m, args.n)
    if args.kind == "interval":
        if args.dim != 1:
            raise ParameterError("interval domains need --dim 1")
        domain = Domain.interval(0.0, args.size)
    else:
        domain = Domain.radial_ball(args.dim, args.size)
    df = threshold_table(args.m, args.n, args.dim, domain, args.cells)
    print(df.to_string(index=False))
    return EXIT_OK


# =======================================================
# solve / branch / shoot (config driven)
# =======================================================


def _mesh(cfg: RunConfig):
    return build_mesh(cfg.domain.domain(cfg.problem.dim), cfg.domain.cells)


def cmd_solve(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config)
    p = cfg.problem.params()
    mesh = _mesh(cfg)
    report = solve_with_method(p, mesh, cfg.solver.method, cfg.solver.solver_config())
    out_dir = cfg.output.directory
    if "csv" in cfg.output.formats:
        files = write_solve_report(report, mesh, out_dir, "solution")
        reread = read_grid_function(files[0], mesh)
        report.diagnostics["reread_residual"] = residual_norm(p, mesh, reread)
    write_json(os.path.join(out_dir, "solution.json"), report)
    _print_json(report.model_dump(mode="json"))
    return EXIT_OK if report.converged else EXIT_FAILURE


def cmd_branch(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config)
    p = cfg.problem.params()
    mesh = _mesh(cfg)
    solver_cfg = cfg.solver.solver_config()
    if cfg.problem.lambdas:
        strategy = "warm_then_monotone" if cfg.solver.method == "monotone_iteration" else "warm_then_minimize"
        branch = sweep_lambda(p, mesh, cfg.problem.lambdas, strategy=strategy, cfg=solver_cfg)
    else:
        start = solve_with_method(p, mesh, cfg.solver.method, solver_cfg)
        if not is_nontrivial(start):
            raise SolverError(f"no start solution at lambda={p.lam:g} ({'; '.join(start.notes) or start.method})")
        branch = continue_branch(p, mesh, start.solution, cfg.continuation)
    files = write_branch(branch, mesh, cfg.output.directory, with_solutions="csv" in cfg.output.formats)
    _print_json(
        {
            "points": len(branch.points),
            "folds": [f.lam_star for f in branch.folds],
            "gaps": len(branch.gaps),
            "termination": branch.termination,
            "files": files,
        }
    )
    ok = bool(branch.points) and branch.termination != "step_failure"
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_shoot(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config)
    p = cfg.problem.params()
    shoot_cfg = cfg.shoot.shoot_config()
    block = cfg.shoot
    if block.a is not None:
        shot = radial_shoot(p, block.a, shoot_cfg)
        ok = True
    else:
        if block.a_lo is not None and block.a_hi is not None:
            shot = find_flat_profile(p, block.a_lo, block.a_hi, shoot_cfg)
        else:
            shot = search_flat_profile(p, FLAT_HEIGHTS, shoot_cfg)
            if shot is None:
                raise SolverError("no sign change of the shooting discriminant on the default height scan")
        ok = shot.flat
    files = write_profile(shot, cfg.output.directory)
    payload = shot.model_dump(mode="json")
    payload["files"] = files
    _print_json(payload)
    return EXIT_OK if ok else EXIT_FAILURE


# =======================================================
# verify / diagram
# =======================================================


def cmd_verify(args: argparse.Namespace) -> int:
    if args.scenario:
        scenarios = [get_scenario(args.scenario)]
    else:
        scenarios = scenario_suite(args.suite)
    out_dir = args.output_dir or os.path.join(_default_output_dir(), "verify")
    reports = [run_scenario(s, out_dir) for s in scenarios]
    stem = args.scenario or f"summary_{args.suite}"
    files = write_summary(reports, out_dir, stem)
    with open(files[1], "r", encoding="utf-8") as fh:
        print(fh.read(), end="")
    if any(r.status == "error" for r in reports):
        return EXIT_INFRASTRUCTURE
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILURE


def cmd_diagram(args: argparse.Namespace) -> int:
    if args.list:
        _print_json(describe())
        return EXIT_OK
    if not args.figure:
        raise ParameterError("diagram needs --figure (or --list)")
    out_dir = args.output_dir or os.path.join(_default_output_dir(), "diagrams")
    branch, files, ok = run_diagram(args.figure, out_dir)
    _print_json(
        {
            "figure": args.figure,
            "points": len(branch.points),
            "folds": [f.lam_star for f in branch.folds],
            "termination": branch.termination,
            "files": files,
        }
    )
    return EXIT_OK if ok else EXIT_FAILURE


# =======================================================
# Parser and dispatch
# =======================================================


def _finite_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"{text!r} is not a finite number")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="autocat",
        description="Steady states of -Δu = (1-u)u^m - λu^n with zero Dirichlet data",
    )
    parser.add_argument(
        "--log-level", type=str.upper, choices=["DEBUG", "INFO", "WARNING", "ERROR"], default="WARNING"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="case tag and applicable results")
    p.add_argument("--m", type=_finite_float, required=True)
    p.add_argument("--n", type=_finite_float, required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("thresholds", help="closed-form thresholds for (m, n) on a domain")
    p.add_argument("--m", type=_finite_float, required=True)
    p.add_argument("--n", type=_finite_float, required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--kind", choices=["interval", "radial_ball"], default="interval")
    p.add_argument("--size", type=_finite_float, default=1.0, help="interval length or ball radius")
    p.add_argument("--cells", type=int, default=256)
    p.set_defaults(func=cmd_thresholds)

    for name, func, text in (
        ("solve", cmd_solve, "single solve from a run config"),
        ("branch", cmd_branch, "continuation or λ sweep from a run config"),
        ("shoot", cmd_shoot, "radial shooting from a run config"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="INI or JSON run config")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="replay scenarios")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--suite", choices=[tag.value for tag in SUITES])
    group.add_argument("--scenario")
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("diagram", help="bifurcation-diagram data for a preset")
    p.add_argument("--figure", help="preset name: " + ", ".join(preset_names()))
    p.add_argument("--list", action="store_true", help="list the presets")
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_diagram)
    return parser


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "detail": str(exc)}) + "\n")
    return code


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.func(args)
    except (ParameterError, ValidationError) as exc:
        return _fail(EXIT_USAGE, exc)
    except SolverError as exc:
        return _fail(EXIT_FAILURE, exc)
    except (ScenarioError, OSError) as exc:
        logger.exception("%s failed", args.command)
        return _fail(EXIT_INFRASTRUCTURE, exc)


if __name__ == "__main__":
    sys.exit(main())
