"""attack subcommand."""

import argparse

from src.cli.commands.common import emit, finish, open_db
from src.cli.models import PARAMETER_SETS, RunConfig
from src.services.attack_service import AttackService


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("attack", help="Recover random Alice keys with a hidden shift solver")
    parser.add_argument("--params", choices=sorted(PARAMETER_SETS), help="Named parameter set")
    parser.add_argument("--ells", help="Comma-separated small primes")
    parser.add_argument("--keys", type=int, help="Number of keys to attack")
    parser.add_argument("--m", type=int, help="Secret exponent bound")
    parser.set_defaults(handler=handle_attack)


def handle_attack(args: argparse.Namespace, config: RunConfig) -> int:
    db = open_db(config)
    try:
        service = AttackService(config.csidh_params(), config.solver, config.seed, db)
        result = service.run(config.keys, config.m)
    finally:
        if db is not None:
            db.close()
    if result['records']:
        emit("attack", result['records'], config, columns={
            "index": "#", "solver": "solver", "public_A": "public A", "recovered": "recovered",
            "first_attempt": "first try", "shift": "shift", "exponents": "exponents",
            "queries": "queries", "peak_pool": "peak pool",
        })
        print(f"recovered={str(result['recovered'] == config.keys).lower()} "
              f"({result['recovered']}/{config.keys}, first attempt {result['first_attempt']})")
    return finish("attack", result)
