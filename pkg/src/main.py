"""Main entry point for the matroid toolkit command line."""

import argparse
import sys
import os
from typing import Any, Dict, List, Optional

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.apps.bench import run_bench, verify_report
from src.apps.run_report import load_report, run, save_report
from src.apps.solvers import ProblemSpec
from src.core.errors import InstanceFormatError, InvalidArgument, MatroidError
from src.core.oracle import configure_tuning
from src.utils.helpers import ensure_data_files_exist, load_config
from src.utils.logger import get_logger, setup_logger

logger = get_logger(__name__)

# subcommand -> (help, input argument help, how many inputs)
PROBLEMS = {
    "intersect": ("maximum common independent set of two matroids", "two matroid JSON files", 2),
    "union": ("matroid union of one or more matroids", "matroid JSON files", "+"),
    "kfold": ("k-fold union of one matroid (--k)", "matroid JSON file", 1),
    "kdst": ("k edge-disjoint spanning trees (--k)", "graph file", 1),
    "kforest": ("k forests of largest total size (--k)", "graph file", 1),
    "kpseudoforest": ("k pseudoforests of largest total size (--k)", "graph file", 1),
    "mixed": ("f forests plus p pseudoforests (--f, --p)", "graph file", 1),
    "arboricity": ("fewest forests covering all edges", "graph file", 1),
    "pseudoarboricity": ("fewest pseudoforests covering all edges", "graph file", 1),
    "tree-packing": ("most edge-disjoint spanning trees", "graph file", 1),
    "shannon": ("winner of the Shannon switching game", "graph file", 1),
    "colorful-st": ("spanning tree with distinct edge colors (c=)", "graph file", 1),
    "graphic-intersect": ("common forest of two graphs over the same edges", "two graph files", 2),
    "bipartite-matching": ("maximum matching of a bipartite graph", "graph file", 1),
    "scheduling-intersect": ("jobs schedulable on two resources", "job file", 1),
    "linear-intersect": ("common independent rows of two matrices", "two matrix files", 2),
    "forest-deadlines": ("largest forest with per-edge release days and deadlines", "graph file", 1),
}


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per problem plus bench and verify."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="extra config file overriding data/config.json")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], default=None)
    common.add_argument("--log-file", default=None, help="also write the log to this file")
    common.add_argument("--seed", type=int, default=None)

    solving = argparse.ArgumentParser(add_help=False)
    solving.add_argument("--k", type=int, default=2, help="number of bases / forests (default 2)")
    solving.add_argument("--f", type=int, default=1, help="forests for mixed (default 1)")
    solving.add_argument("--p", type=int, default=1, help="pseudoforests for mixed (default 1)")
    solving.add_argument("--epsilon", type=float, default=None,
                         help="stop intersection once the s-t distance exceeds 1/epsilon")
    solving.add_argument("--json", metavar="PATH", default=None, help="write the run report as JSON")
    solving.add_argument("--stats-only", action="store_true", default=None,
                         help="print statistics instead of the solution")

    parser = argparse.ArgumentParser(
        prog="matroidkit",
        description="Matroid intersection and union with dynamic rank oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (help_text, inputs_help, count) in PROBLEMS.items():
        p = sub.add_parser(name, help=help_text, parents=[common, solving])
        p.add_argument("inputs", nargs=count, help=inputs_help)

    bench = sub.add_parser("bench", help="differential trials against brute force", parents=[common])
    bench.add_argument("--trials", type=int, default=None)
    bench.add_argument("--workers", type=int, default=None)
    bench.add_argument("--max-n", type=int, default=None)

    verify = sub.add_parser("verify", help="re-check a saved JSON run report", parents=[common])
    verify.add_argument("report", help="report written with --json")
    return parser


def _pick(flag: Any, fallback: Any) -> Any:
    return fallback if flag is None else flag


def _run_problem(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    spec = ProblemSpec(
        subcommand=args.command,
        inputs=list(args.inputs),
        k=args.k,
        f=args.f,
        p=args.p,
        epsilon=_pick(args.epsilon, config["solver"]["epsilon"]),
        seed=_pick(args.seed, config["seed"]),
        stats_only=bool(_pick(args.stats_only, config["output"]["stats_only"])),
    )
    if spec.epsilon is not None and spec.epsilon <= 0:
        raise InvalidArgument(f"--epsilon must be positive, got {spec.epsilon}")
    report = run(spec)
    print(report.render_text(stats_only=spec.stats_only))
    if args.json:
        save_report(report, args.json)
        logger.info("report written to %s", args.json)
    return 0


def _run_bench(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    summary = run_bench(
        trials=_pick(args.trials, config["bench"]["trials"]),
        workers=_pick(args.workers, config["bench"]["workers"]),
        max_n=_pick(args.max_n, config["bench"]["max_n"]),
        seed=_pick(args.seed, config["seed"]),
    )
    print(summary.render_text())
    return 0 if not summary.failures else 1


def _run_verify(args: argparse.Namespace) -> int:
    if not os.path.exists(args.report):
        raise FileNotFoundError(args.report)
    report = load_report(args.report)
    if report is None:
        raise InstanceFormatError("not a readable run report", args.report)
    verify_report(report)
    print(f"verified: {report.problem}, size {report.size}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    ensure_data_files_exist()
    config = load_config(args.config)
    setup_logger(_pick(args.log_level, config["logging"]["level"]), args.log_file)
    configure_tuning(config["oracle"]["pin_distance"], config["oracle"]["max_auto_pins"])

    try:
        if args.command == "bench":
            return _run_bench(args, config)
        if args.command == "verify":
            return _run_verify(args)
        return _run_problem(args, config)
    except MatroidError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == '__main__':
    sys.exit(main())
