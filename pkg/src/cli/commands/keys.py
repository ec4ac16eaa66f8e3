"""keygen and exchange subcommands."""

import argparse

from src.cli.commands.common import emit, fail, finish
from src.cli.models import PARAMETER_SETS, RunConfig
from src.services.exchange_service import ExchangeService


def _add_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--params", choices=sorted(PARAMETER_SETS), help="Named parameter set")
    parser.add_argument("--ells", help="Comma-separated small primes")
    parser.add_argument("--keys", type=int, help="Number of keys or exchanges")
    parser.add_argument("--m", type=int, help="Secret exponent bound")


def register(subparsers: argparse._SubParsersAction) -> None:
    keygen = subparsers.add_parser("keygen", help="Generate CSIDH key pairs")
    _add_params(keygen)
    keygen.set_defaults(handler=handle_keygen)

    exchange = subparsers.add_parser("exchange", help="Run in-process key exchanges")
    _add_params(exchange)
    exchange.set_defaults(handler=handle_exchange)


def handle_keygen(args: argparse.Namespace, config: RunConfig) -> int:
    service = ExchangeService(config.csidh_params(), config.seed)
    result = service.generate_keys(config.keys, config.m)
    if not result['success']:
        return fail("keygen", result['error'], "IsogenyError")
    emit("keygen", result['records'], config,
         columns={"index": "#", "secret": "secret", "public_A": "public A"})
    return 0


def handle_exchange(args: argparse.Namespace, config: RunConfig) -> int:
    service = ExchangeService(config.csidh_params(), config.seed)
    result = service.exchange(config.keys, config.m)
    if result['transcripts']:
        emit("exchange", result['transcripts'], config, columns={
            "index": "#", "alice_public": "A (Alice)", "bob_public": "A (Bob)",
            "alice_shared": "shared (Alice)", "bob_shared": "shared (Bob)", "agreed": "agreed",
        })
    return finish("exchange", result)
