"""params-gen, params-audit and cost subcommands."""

import argparse
import math
import random

from src.cli.commands.common import emit, fail, finish
from src.cli.models import PARAMETER_SETS, RunConfig
from src.models.records import ParamsRecord
from src.services.params_service import ParamsService
from src.utils.records import output_path, render_table


def register(subparsers: argparse._SubParsersAction) -> None:
    gen = subparsers.add_parser("params-gen", help="Find p = 4 * l_1 ... l_u - 1 prime")
    gen.add_argument("--u", type=int, default=3, help="Number of small primes")
    gen.add_argument("--ell-bound", type=int, default=50, help="Largest small prime allowed")
    gen.set_defaults(handler=handle_params_gen)

    audit = subparsers.add_parser("params-audit", help="Check p (and ells) for CSIDH use")
    audit.add_argument("--params", choices=sorted(PARAMETER_SETS), help="Named parameter set")
    audit.add_argument("--p", type=int, help="Prime to audit")
    audit.add_argument("--ells", help="Comma-separated small primes")
    audit.set_defaults(handler=handle_params_audit)

    cost = subparsers.add_parser("cost", help="Classical and subexponential cost exponents")
    cost.add_argument("--log-p", type=int, nargs="+", default=[512, 1024, 1792],
                      help="Bit sizes of p (64 to 4096)")
    cost.set_defaults(handler=handle_cost)


def handle_params_gen(args: argparse.Namespace, config: RunConfig) -> int:
    result = ParamsService().generate(args.u, args.ell_bound, config.budget)
    if not result['success']:
        return fail("params-gen", result['error'], "ParamsServiceError")
    params = result['params']
    emit("params-gen", [ParamsRecord(p=params.p, ells=list(params.ells), discriminant=params.discriminant)],
         config)
    path = output_path(config.out, "params.txt")
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(params.to_text())
    return 0


def handle_params_audit(args: argparse.Namespace, config: RunConfig) -> int:
    ells = config.ells
    if not ells and config.p is None:
        ells = list(PARAMETER_SETS[config.params or "toy419"])
    p = config.p if config.p is not None else 4 * math.prod(ells) - 1
    result = ParamsService(random.Random(config.seed)).audit(p, ells)
    report = result['report']
    if report is None:
        return fail("params-audit", result['error'], "ParamsServiceError")
    emit("params-audit", [report], config,
         columns={"p": "p", "discriminant": "delta", "class_number": "h", "passed": "passed"})
    print(render_table(report.checks))
    print("PASS" if report.passed else "FAIL")
    return finish("params-audit", result)


def handle_cost(args: argparse.Namespace, config: RunConfig) -> int:
    result = ParamsService().costs(args.log_p)
    if not result['success']:
        return fail("cost", result['error'], "ParamsServiceError")
    emit("cost", result['rows'], config, columns={
        "log_p": "log p",
        "classical_log2": "classical (log2)",
        "reference_quantum_log2": "published quantum (log2)",
        "subexp_log2": "subexp estimate (log2)",
        "query_log2": "query estimate (log2)",
    })
    print("Estimates drop all lower-order terms; the published quantum column is reference data, "
          "not a security claim.")
    return 0
