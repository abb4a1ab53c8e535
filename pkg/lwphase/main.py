import argparse
import sys
from typing import List, Optional

from pydantic import ValidationError

from .api import commands
from .core.config import settings
from .core.exceptions import NumericalError, ScenarioError
from .core.logger import logger
from .services.action import ActionModel
from .services.validation import FAULTS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.APP_NAME,
        description="Retarded on-shell action phases and spin entanglement of superposed particle branches",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    models = [m.value for m in ActionModel]

    p = sub.add_parser("phase", help="Phase table for every spin configuration")
    p.add_argument("file", help="Scenario JSON file")
    p.add_argument("--model", choices=models, help="Override the file's action model")
    p.add_argument("--tol", type=float, help="Quadrature tolerance in radians")
    p.add_argument("--out", help="Output path (stdout if omitted)")
    p.add_argument("--format", dest="fmt", choices=["json", "csv"], default="json")
    p.add_argument("--workers", type=int, help="Process pool size")

    e = sub.add_parser("entangle", help="Entanglement of the evolved spin state")
    e.add_argument("file", help="Scenario JSON file")
    e.add_argument("--amplitudes", help="JSON list of initial amplitudes (reals or [re, im]); uniform by default")
    e.add_argument("--model", choices=models)
    e.add_argument("--tol", type=float)
    e.add_argument("--partition", type=int, nargs="+", help="Spins on one side of the bipartition")
    e.add_argument("--out")
    e.add_argument("--workers", type=int)

    s = sub.add_parser("sweep", help="Sweep a scenario value and tabulate all models")
    s.add_argument("file", help="Scenario JSON file")
    s.add_argument(
        "--param", action="append", required=True, dest="params",
        help="Dotted path of the swept value, e.g. builder.params.T; repeat to tie several values",
    )
    s.add_argument("--range", nargs=2, required=True, dest="value_range", metavar=("LO", "HI"),
                   help='Range ends, e.g. "1 ns" "10 ns"')
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--models", nargs="+", choices=models)
    s.add_argument("--tol", type=float)
    s.add_argument("--out")
    s.add_argument("--workers", type=int)

    v = sub.add_parser("validate", help="Run the built-in invariant suite")
    v.add_argument("--tol-scale", type=float, default=1.0, help="Divide numerical tolerances by this factor")
    v.add_argument("--fault", choices=sorted(FAULTS), help="Inject a convention error")
    v.add_argument("--samples", type=int, default=1000, help="Random worldlines for the retardation checks")
    v.add_argument("--out")

    return parser


def _format_validation_error(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "file"
        lines.append(f"{path}: {item['msg']}")
    return "\n".join(lines)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger.info(f"Starting {settings.APP_NAME} v{settings.APP_VERSION}: {args.command}")
    try:
        if args.command == "phase":
            return commands.cmd_phase(args.file, args.model, args.tol, args.out, args.fmt, args.workers)
        if args.command == "entangle":
            return commands.cmd_entangle(
                args.file, args.amplitudes, args.out, args.model, args.tol, args.partition, args.workers
            )
        if args.command == "sweep":
            return commands.cmd_sweep(
                args.file, args.params, args.value_range, args.steps, args.out, args.models, args.tol, args.workers
            )
        return commands.cmd_validate(args.tol_scale, args.fault, args.samples, args.out)
    except ValidationError as e:
        message = _format_validation_error(e)
        logger.error(f"Schema error:\n{message}")
        print(message, file=sys.stderr)
        return commands.EXIT_SCHEMA
    except ScenarioError as e:
        logger.error(f"Scenario error: {str(e)}")
        print(str(e), file=sys.stderr)
        return commands.EXIT_SCHEMA
    except NumericalError as e:
        logger.error(f"Numerical failure: {str(e)}")
        print(str(e), file=sys.stderr)
        return commands.EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
