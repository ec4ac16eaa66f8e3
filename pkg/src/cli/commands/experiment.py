"""table2 subcommand: maximal exponents of short decompositions."""

import argparse

from src.cli.commands.common import emit, finish, open_db
from src.cli.models import RunConfig
from src.services.experiment_service import ExperimentService
from src.utils.records import output_path, render_table, write_jsonl

ROW_COLUMNS = {
    "log10_delta": "log10|delta|",
    "generator_count": "s",
    "max_coefficient": "max coefficient",
    "exponent_bound": "exp(ln^(1/3)|delta|)",
    "mean_max": "mean max",
    "raw_max_coefficient": "max (HNF basis)",
    "class_number": "h",
    "delta": "delta",
}


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("table2", help="Maximal exponent over random classes")
    parser.add_argument("--digits", help="Comma-separated sizes log10|delta|")
    parser.add_argument("--count", type=int, help="Discriminants per size")
    parser.add_argument("--deltas", help="Comma-separated explicit discriminants")
    parser.add_argument("--trials", type=int, help="Random classes per discriminant")
    parser.add_argument("--mode", choices=["consecutive", "reordered"], help="Prime set")
    parser.set_defaults(handler=handle_table2)


def handle_table2(args: argparse.Namespace, config: RunConfig) -> int:
    db = open_db(config)
    try:
        service = ExperimentService(db, config.seed)
        result = service.run(config.trials, config.digits, config.count, config.deltas, config.mode)
    finally:
        if db is not None:
            db.close()
    if result['rows']:
        emit("table2", result['rows'], config, columns=ROW_COLUMNS)
        path = output_path(config.out, "trials.jsonl")
        if path:
            write_jsonl(path, result['trials'])
    if result['reference']:
        print("\nPublished reference rows:")
        print(render_table(result['reference'], {
            "log10_delta": "log10|delta|", "generator_count": "s",
            "max_coefficient": "max coefficient", "exponent_bound": "exp(ln^(1/3)|delta|)",
        }))
    return finish("table2", result)
