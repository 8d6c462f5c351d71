"""
Command-line interface.

    heatnet run --network N --scenario S --out DIR [--dt 1800 --dx 150 ...]
    heatnet presolve --network N --out DIR
    heatnet stationary --network N --scenario S --out DIR
    heatnet generate --kind aroma_like --seed 0 --out DIR

Exit codes: 0 success, 1 solve failure, 2 invalid input.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from heatnet import __version__
from heatnet.assemble.scenario import dump_scenario
from heatnet.control.stationary import solve_stationary
from heatnet.core.config import settings
from heatnet.core.exceptions import HeatNetError, SolveError
from heatnet.core.logging import configure_logging
from heatnet.network.loader import dump_network, load_network
from heatnet.presolve.directions import fix_flow_directions
from heatnet.schemas.enums import MixingModel, Scheme
from heatnet.schemas.report import RunConfig
from heatnet.services.pipeline import prepare, presolve, run_pipeline
from heatnet.services.reporting import (
    timeseries_frame,
    write_error,
    write_fixing,
    write_json,
    write_report,
    write_timeseries,
    write_trajectory,
)
from heatnet.services.synthetic import generate_synthetic
from heatnet.solver.config import SolverConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SOLVE_FAILED = 1
EXIT_INVALID_INPUT = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as error JSON"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(json.dumps({"error": "UsageError", "message": message, "key": None}))
        raise SystemExit(EXIT_INVALID_INPUT)


def _solver_option(text: str) -> Dict[str, float]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    key, value = text.split("=", 1)
    try:
        return {key.strip(): float(value)}
    except ValueError:
        raise argparse.ArgumentTypeError(f"solver option {key!r} needs a number") from None


def _add_grid_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--network", required=True, help="network JSON file")
    parser.add_argument("--scenario", required=True, help="scenario JSON file")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--dt", type=float, default=1800.0, help="time step in seconds")
    parser.add_argument("--dx", type=float, default=150.0, help="spatial step in meters")
    parser.add_argument("--scheme", choices=[s.value for s in Scheme], default=Scheme.CENTRAL.value)
    parser.add_argument("--mixing", choices=[m.value for m in MixingModel], default=MixingModel.NLP.value)
    parser.add_argument("--presolve", dest="presolve", action="store_true", default=True)
    parser.add_argument("--no-presolve", dest="presolve", action="store_false")
    parser.add_argument(
        "--solver-option", type=_solver_option, action="append", default=[], metavar="KEY=VALUE",
        help="override a solver parameter, e.g. kkt_tol=1e-7",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="heatnet", description="Optimal control of district heating networks")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="stream solver iteration logs")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="stationary init, instantaneous control and full-horizon solve")
    _add_grid_options(run)
    phases = run.add_mutually_exclusive_group()
    phases.add_argument("--ic-only", action="store_true", help="stop after instantaneous control")
    phases.add_argument("--skip-ic", action="store_true", help="warm start from the stationary state")
    run.add_argument("--dump-model", metavar="PATH", help="write the full-horizon model listing")
    run.add_argument("--seed", type=int, default=0)

    pre = sub.add_parser("presolve", help="fix flow directions and write fixing.json")
    pre.add_argument("--network", required=True)
    pre.add_argument("--out", default="out")

    stat = sub.add_parser("stationary", help="stationary state at t=0, written to stationary.json")
    _add_grid_options(stat)

    gen = sub.add_parser("generate", help="write a synthetic network and day scenario")
    gen.add_argument("--kind", choices=["aroma_like", "street_like", "tree"], required=True)
    gen.add_argument("--size", type=int, default=3, help="pipes per side for --kind tree")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--waste-bound", type=float, default=None, help="max waste power in W (default unbounded)")
    gen.add_argument("--out", default="out")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    overrides: Dict[str, float] = {}
    for option in args.solver_option:
        overrides.update(option)
    try:
        SolverConfig.with_overrides(overrides)
    except ValueError as exc:
        raise HeatNetError(f"invalid solver option: {exc}", key="solver_option") from exc
    return RunConfig(
        network=args.network,
        scenario=args.scenario,
        out=args.out,
        dt=args.dt,
        dx=args.dx,
        scheme=Scheme(args.scheme),
        mixing=MixingModel(args.mixing),
        presolve=args.presolve,
        ic_only=getattr(args, "ic_only", False),
        skip_ic=getattr(args, "skip_ic", False),
        verbose=args.verbose,
        seed=getattr(args, "seed", 0),
        solver_overrides=overrides,
        dump_model=getattr(args, "dump_model", None),
    )


def cmd_run(args: argparse.Namespace) -> int:
    config = _run_config(args)
    result = run_pipeline(config)
    out = Path(config.out)
    write_report(result.report, out / "report.json")
    write_timeseries(
        timeseries_frame(result.network, result.scenario, result.disc, result.trajectory),
        out / "timeseries.csv",
    )
    write_fixing(result.fixing, out / "fixing.json", config.presolve)
    write_trajectory(result.trajectory, out / "trajectory.json")
    if not result.feasible:
        raise SolveError(f"no solution within tolerance (status {result.report.status})", key="report")
    return EXIT_OK


def cmd_presolve(args: argparse.Namespace) -> int:
    network = load_network(args.network)
    fixing = fix_flow_directions(network)
    path = write_fixing(fixing, Path(args.out) / "fixing.json")
    print(json.dumps({"fixed": len(fixing.fixed_pipes(network)), "pipes": len(network.pipes), "path": str(path)}))
    return EXIT_OK


def cmd_stationary(args: argparse.Namespace) -> int:
    config = _run_config(args)
    network, scenario, disc = prepare(config)
    fixing = presolve(network, config.presolve)
    stationary = solve_stationary(
        network, scenario, disc, fixing if config.presolve else None, 0,
        SolverConfig.with_overrides(config.solver_overrides),
    )
    write_json(
        {
            "t_stat": round(stationary.wall_time, 3),
            "stat_steps": stationary.solves,
            "slack_norm": stationary.outcome.slack_norm,
            "feasible": stationary.outcome.feasible,
            "snapshot": stationary.snapshot.to_document(),
        },
        Path(config.out) / "stationary.json",
    )
    if not stationary.outcome.feasible:
        raise SolveError("stationary state not within tolerance", key="stationary")
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    network, scenario = generate_synthetic(args.kind, args.seed, args.size, args.waste_bound)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dump_network(network, out / "network.json")
    dump_scenario(scenario, out / "scenario.json")
    print(json.dumps({"network": str(out / "network.json"), "scenario": str(out / "scenario.json")}))
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "presolve": cmd_presolve,
    "stationary": cmd_stationary,
    "generate": cmd_generate,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    configure_logging(args.log_level, verbose=args.verbose)

    try:
        return COMMANDS[args.command](args)
    except SolveError as exc:
        _report_error(exc, args)
        return EXIT_SOLVE_FAILED
    except HeatNetError as exc:
        _report_error(exc, args)
        return EXIT_INVALID_INPUT
    except OSError as exc:
        error = HeatNetError(f"cannot read or write file: {exc}", key=getattr(exc, "filename", None))
        _report_error(error, args)
        return EXIT_INVALID_INPUT


def _report_error(error: HeatNetError, args: argparse.Namespace) -> None:
    logger.error(f"❌ {error.message}")
    print(json.dumps(error.to_dict()))
    out = getattr(args, "out", None)
    if out:
        try:
            write_error(error, out)
        except OSError:
            pass


if __name__ == "__main__":
    sys.exit(main())
