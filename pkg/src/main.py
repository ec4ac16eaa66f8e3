"""Command-line entry point."""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from src.cli.commands import COMMAND_MODULES
from src.cli.commands.common import fail
from src.cli.models import RunConfig
from src.config import settings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Toy CSIDH, lattice-based class group action oracle and simulated hidden shift attacks",
    )
    parser.add_argument("--seed", type=int, help="Seed fixing all randomness of the run")
    parser.add_argument("--config", help="Flat key=value configuration file")
    parser.add_argument("--out", help="Directory for JSONL records")
    parser.add_argument("--solver", choices=["kuperberg", "regev", "mitm"], help="Hidden shift solver")
    parser.add_argument("--budget", type=int, help="Work budget: oracle queries, or candidates for params-gen")
    parser.add_argument("--no-persist", dest="persist", action="store_false", default=None,
                        help="Do not store results in the database")
    parser.add_argument("--log-level", help="Logging level (default from settings)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMAND_MODULES:
        module.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, (args.log_level or settings.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    overrides = {k: v for k, v in vars(args).items() if k in RunConfig.model_fields}
    try:
        config = RunConfig.load(args.config, overrides)
        config.apply_settings()
    except (ValidationError, ValueError, OSError) as e:
        return fail(args.command, str(e), type(e).__name__, code=2)

    try:
        return args.handler(args, config)
    except Exception as e:
        logging.getLogger(__name__).error(f"Unexpected error in {args.command}: {e}")
        return fail(args.command, str(e), type(e).__name__)


if __name__ == "__main__":
    sys.exit(main())
