"""
Command-line entry point
"""
import argparse
import logging
import sys
from typing import List, Optional

from rebsim import __version__
from rebsim.config import settings
from rebsim.exceptions import RebsimError
from rebsim.schemas.config import Config, OutputFormat

logger = logging.getLogger(__name__)


def configure_logging(verbose: bool = False) -> None:
    level = logging.DEBUG if (settings.DEBUG or verbose) else settings.LOG_LEVEL.upper()
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.APP_NAME,
        description="Remote-entanglement protocol simulator",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (stdout when omitted)")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], dest="fmt")
    common.add_argument("--seed", type=int, help="reserved; every computation is deterministic")

    subcommands = parser.add_subparsers(dest="command", required=True)

    params = subcommands.add_parser("params", parents=[common], help="derived device quantities")
    params.add_argument("--config", required=True, help="run document (JSON)")

    run = subcommands.add_parser("run", parents=[common], help="one protocol evaluation")
    run.add_argument("--config", required=True, help="run document (JSON)")

    sweep = subcommands.add_parser("sweep", parents=[common], help="evaluate the configured grid")
    sweep.add_argument("--config", required=True, help="run document (JSON)")
    sweep.add_argument("--parallelism", type=int, help="worker processes (default REBSIM_THREADS)")

    frontier = subcommands.add_parser("pareto", parents=[common], help="frontier of a saved sweep")
    frontier.add_argument("results", help="CSV written by 'sweep'")
    selection = frontier.add_mutually_exclusive_group()
    selection.add_argument("--group-by", help="one frontier per value of this axis")
    selection.add_argument("--max-infidelity", type=float, help="best row within this bound")
    return parser


def dispatch(args: argparse.Namespace) -> None:
    from rebsim.commands import cmd_params, cmd_pareto, cmd_run, cmd_sweep

    if args.command == "pareto":
        cmd_pareto(args.results, args.out, args.group_by, args.max_infidelity, args.fmt)
        return
    config = Config.load(args.config)
    if args.command == "params":
        cmd_params(config, args.out, args.fmt)
    elif args.command == "run":
        cmd_run(config, args.out, args.fmt)
    elif args.command == "sweep":
        cmd_sweep(config, args.out, args.parallelism, args.fmt)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and run one subcommand

    Returns:
        0 on success, otherwise the failing exception's exit code
        (2 config, 3 numerical guard, 4 no feasible point)
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    if args.seed is not None:
        logger.debug("seed %d ignored: no stochastic components", args.seed)
    try:
        dispatch(args)
    except RebsimError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
