"""Command-line front end: `gp-states <command> ...`.

Exit codes: 0 ok, 1 usage or invalid input, 2 near-boundary or
ill-conditioned input, 3 oracle mismatch.
"""

import argparse
import logging
import sys
from typing import List, Optional

from .exceptions import GpStateError, OracleMismatchError
from .models.report import Report
from .models.settings import SystemSettings
from .services.report_service import ReportService
from .services.spec_loader import load_state, load_unitary

logger = logging.getLogger("gp_states")

EXIT_OK = 0
EXIT_ORACLE = OracleMismatchError.exit_code


def _order(value: str) -> Optional[int]:
    if value.strip().lower() in {"infinite", "inf", "infinity"}:
        return None
    try:
        order = int(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"order must be a positive integer or 'infinite', got {value!r}") from e
    if order < 1:
        raise argparse.ArgumentTypeError(f"order must be positive, got {order}")
    return order


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with code 1 like every other invalid input."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive(value: str) -> float:
    tolerance = float(value)
    if tolerance <= 0:
        raise argparse.ArgumentTypeError(f"tolerance must be positive, got {value}")
    return tolerance


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tolerance", type=_positive, default=None, help="Comparison tolerance (default 1e-9)")
    common.add_argument("--max-len", type=int, default=None, help="Bound on |J| + |K| for word tables (default 6)")
    common.add_argument("--verify", action="store_true", help="Re-derive moments with the oracle")
    common.add_argument("--format", choices=["text", "structured"], default=None, help="Report format")
    common.add_argument("--log-level", default=None, help="Logging level for stderr")

    parser = _Parser(
        prog="gp-states",
        description="Geometric progression states on Cuntz algebras",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    classify = subparsers.add_parser("classify", parents=[common], help="Uniqueness / mixture classification")
    classify.add_argument("spec", help="State spec file (JSON or YAML)")

    evaluate = subparsers.add_parser("eval", parents=[common], help="Tabulate omega(s_J s_K*)")
    evaluate.add_argument("spec")
    evaluate.add_argument("--word", action="append", dest="words", default=None, help="Word such as 's2 s1 s1*'; repeatable")

    equiv = subparsers.add_parser("equiv", parents=[common], help="Decide equivalence of two states")
    equiv.add_argument("spec_a")
    equiv.add_argument("spec_b")
    equiv.add_argument("--witness", action="store_true", help="Add an exhaustive moment comparison")

    canon = subparsers.add_parser("canon", parents=[common], help="Canonical invariant")
    canon.add_argument("spec")

    lift = subparsers.add_parser("lift", parents=[common], help="Lift a finite-order parameter")
    lift.add_argument("spec")
    lift.add_argument("--order", type=int, required=True, help="Target order (a multiple of k)")

    gauge = subparsers.add_parser("gauge", parents=[common], help="Gauge action of U(n-1)")
    gauge.add_argument("spec")
    gauge.add_argument("--unitary", required=True, help="File or inline JSON with an (n-1)x(n-1) unitary")

    gram = subparsers.add_parser("gram", parents=[common], help="Gram matrix, spectrum and correlation dimension")
    gram.add_argument("spec")

    factorize = subparsers.add_parser("factorize", parents=[common], help="Factorize s_J = t_hatJ s_n^a")
    factorize.add_argument("word", help="Word of generators, e.g. 's2 s2 s2'")
    factorize.add_argument("--n", type=int, required=True)
    factorize.add_argument("--order", type=_order, required=True, help="Order k or 'infinite'")
    return parser


def configure_logging(settings: SystemSettings, level: Optional[str] = None) -> None:
    if not settings.enable_logging:
        logging.disable(logging.CRITICAL)
        return
    logging.basicConfig(
        stream=sys.stderr,
        level=(level or settings.log_level).upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )


def run(args: argparse.Namespace, settings: SystemSettings) -> Report:
    service = ReportService(settings)
    command = args.command
    if command == "classify":
        return service.classify(load_state(args.spec, settings.tolerances), {"spec": args.spec})
    if command == "eval":
        max_len = settings.default_max_len if args.max_len is None else args.max_len
        return service.evaluate(
            load_state(args.spec, settings.tolerances),
            words=args.words,
            max_len=args.max_len,
            verify=args.verify,
            arguments={"spec": args.spec, "words": args.words or f"all with |J|+|K| <= {max_len}", "verify": args.verify},
        )
    if command == "equiv":
        return service.equivalence(
            load_state(args.spec_a, settings.tolerances),
            load_state(args.spec_b, settings.tolerances),
            witness=args.witness,
            max_len=args.max_len,
            arguments={"spec_a": args.spec_a, "spec_b": args.spec_b, "witness": args.witness},
        )
    if command == "canon":
        return service.canonical(load_state(args.spec, settings.tolerances), {"spec": args.spec})
    if command == "lift":
        return service.lift(load_state(args.spec, settings.tolerances), args.order, {"spec": args.spec, "order": args.order})
    if command == "gauge":
        return service.gauge(
            load_state(args.spec, settings.tolerances),
            load_unitary(args.unitary),
            max_len=args.max_len,
            arguments={"spec": args.spec, "unitary": args.unitary},
        )
    if command == "gram":
        return service.gram(load_state(args.spec, settings.tolerances), {"spec": args.spec})
    order = "infinite" if args.order is None else args.order
    return service.factorize(args.n, args.order, args.word, {"word": args.word, "n": args.n, "order": order})


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = SystemSettings()
    if args.tolerance is not None:
        settings = settings.with_tolerance(args.tolerance)
    configure_logging(settings, args.log_level)
    output_format = args.format or settings.output_format

    try:
        report = run(args, settings)
    except GpStateError as e:
        logger.error("%s: %s", type(e).__name__, e)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code

    sys.stdout.write(report.render(output_format))
    if report.verdicts.get("oracle") == "mismatch":
        return EXIT_ORACLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
