"""classgroup and lattice passthrough subcommands."""

import argparse
import random
import sys
from typing import List

from src.cli.commands.common import emit, fail
from src.cli.models import RunConfig
from src.models.records import ClassGroupReport, FormResult, LatticeReport
from src.services.classgroup import (
    ClassGroupError, QuadForm, compose, dlog, group_structure, inverse, power, prime_form,
    random_class, reduce,
)
from src.services.lattice import (
    IntMatrix, LatticeError, babai_nearest_plane, bkz_reduce, hnf, lll, shortest_vector_enum, snf,
)

LATTICE_OPERATIONS = ("hnf", "snf", "lll", "bkz", "svp", "babai")


def register(subparsers: argparse._SubParsersAction) -> None:
    cg = subparsers.add_parser("classgroup", help="Class number, structure and form arithmetic")
    cg.add_argument("--delta", type=int, required=True, help="Negative discriminant")
    cg.add_argument("--reduce", metavar="FORM", help="Reduce a,b,c")
    cg.add_argument("--compose", nargs=2, metavar="FORM", help="Compose two forms")
    cg.add_argument("--power", nargs=2, metavar=("FORM", "E"), help="Raise a form to an integer power")
    cg.add_argument("--inverse", metavar="FORM", help="Inverse class")
    cg.add_argument("--prime", type=int, help="Prime form of norm p, if p splits")
    cg.add_argument("--dlog", metavar="FORM", help="Coordinates in the structure's generators")
    cg.add_argument("--random", type=int, default=0, metavar="N", help="Sample N random classes")
    cg.set_defaults(handler=handle_classgroup)

    lat = subparsers.add_parser("lattice", help="Normal forms and reduction of an integer row basis")
    lat.add_argument("operation", choices=LATTICE_OPERATIONS)
    lat.add_argument("matrix", help="Matrix file: a 'rows cols' header, then one row per line; '-' reads stdin")
    lat.add_argument("--target", help="Comma-separated target vector for babai")
    lat.add_argument("--block-size", type=int, default=2, help="BKZ block size")
    lat.set_defaults(handler=handle_lattice)


def _form(text: str, delta: int) -> QuadForm:
    return reduce(QuadForm.parse(text), delta)


def handle_classgroup(args: argparse.Namespace, config: RunConfig) -> int:
    rng = random.Random(config.seed)
    delta = args.delta
    try:
        S = group_structure(delta, rng)
        ops: List[FormResult] = []
        if args.reduce:
            ops.append(FormResult(operation="reduce", argument=args.reduce,
                                  result=str(reduce(QuadForm.parse(args.reduce), delta))))
        if args.compose:
            f, g = (_form(t, delta) for t in args.compose)
            ops.append(FormResult(operation="compose", argument=" ".join(args.compose), result=str(compose(f, g))))
        if args.power:
            f = _form(args.power[0], delta)
            ops.append(FormResult(operation="power", argument=" ".join(args.power),
                                  result=str(power(f, int(args.power[1])))))
        if args.inverse:
            ops.append(FormResult(operation="inverse", argument=args.inverse,
                                  result=str(inverse(_form(args.inverse, delta)))))
        if args.prime:
            form = prime_form(delta, args.prime)
            ops.append(FormResult(operation="prime_form", argument=str(args.prime),
                                  result=str(form) if form is not None else "not split"))
        if args.dlog:
            coords = dlog(S, _form(args.dlog, delta))
            ops.append(FormResult(operation="dlog", argument=args.dlog, result=",".join(map(str, coords))))
        for _ in range(args.random):
            f = random_class(S, rng)
            ops.append(FormResult(operation="random", argument="", result=str(f)))
    except (ClassGroupError, ValueError) as e:
        return fail("classgroup", str(e), type(e).__name__)
    report = ClassGroupReport(delta=delta, class_number=S.order, divisors=list(S.divisors),
                              generators=[str(g) for g in S.generators], operations=ops)
    emit("classgroup", [report], config,
         columns={"delta": "delta", "class_number": "h", "divisors": "divisors"})
    if ops:
        print()
        print("\n".join(f"{op.operation}({op.argument}) = {op.result}" for op in ops))
    return 0


def _read_matrix(path: str) -> IntMatrix:
    if path == "-":
        return IntMatrix.parse(sys.stdin.read())
    with open(path) as fh:
        return IntMatrix.parse(fh.read())


def handle_lattice(args: argparse.Namespace, config: RunConfig) -> int:
    try:
        B = _read_matrix(args.matrix)
    except OSError as e:
        return fail("lattice", f"Cannot read matrix: {e}", type(e).__name__, code=2)
    except LatticeError as e:
        return fail("lattice", str(e), type(e).__name__, code=2)
    try:
        report = LatticeReport(operation=args.operation, basis=B.tolist())
        if args.operation == "hnf":
            report.result = hnf(B).H.tolist()
        elif args.operation == "snf":
            result = snf(B)
            report.result = result.D.tolist()
            report.divisors = result.divisors
        elif args.operation == "lll":
            report.result = lll(B).tolist()
        elif args.operation == "bkz":
            report.result = bkz_reduce(B, args.block_size).tolist()
        elif args.operation == "svp":
            report.vector, report.norm_squared = shortest_vector_enum(B)
        else:
            if not args.target:
                return fail("lattice", "babai needs --target", "ValueError", code=2)
            t = [int(x) for x in args.target.split(",")]
            v = babai_nearest_plane(B, t)
            report.vector = v
            report.norm_squared = sum((a - b) ** 2 for a, b in zip(t, v))
    except (LatticeError, ValueError) as e:
        return fail("lattice", str(e), type(e).__name__)
    emit("lattice", [report], config, columns={"operation": "operation", "result": "result",
                                                "divisors": "divisors", "vector": "vector"})
    return 0
