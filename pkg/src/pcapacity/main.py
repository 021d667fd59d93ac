"""
Command-line front end.

    pcap classify <spec.json> --p 2
    pcap capacity <spec.json> --p 2 --R 10 --method both
    pcap sweep    <spec.json> --p-grid 1.5:4:0.5
    pcap energy   <spec.json> --p 2 --schedule 2,4,16,256

classify exits 0 (Parabolic), 1 (Hyperbolic) or 2 (Inconclusive); energy
exits 0 when the energies decay and 1 otherwise. Errors exit with 3
(arguments, spec files), 4 (unmet preconditions), 5 (numerical failures)
or 6 (anything else). Results go to standard output, logs to standard error.
"""

import sys
import time
import logging
import argparse
from typing import List, Optional, Sequence

import pandas as pd

from .errors import (
    CapacityError,
    CriterionError,
    ManifoldError,
    PCapacityError,
    PreconditionError,
    ProfileError,
    QuadratureError,
    SpecFileError,
)
from .models.geometry import base_manifold
from .records import (
    CAPACITY_COLUMNS,
    ENERGY_COLUMNS,
    FLOAT_FORMAT,
    SWEEP_COLUMNS,
    capacity_records,
    energy_records,
    sweep_records,
    to_csv,
    to_json_line,
    verdict_record,
)
from .services import CutoffFamily
from .sources import (
    create_capacity_engine,
    create_classify_options,
    create_grid_size,
    create_log_level,
    create_parabolicity_service,
    create_quadrature_spec,
    create_submersion_service,
    load_spec,
)

logger = logging.getLogger(__name__)

EXIT_CODES = {"Parabolic": 0, "Hyperbolic": 1, "Inconclusive": 2}
EXIT_USAGE = 3
EXIT_PRECONDITION = 4
EXIT_NUMERICAL = 5
EXIT_OTHER = 6


class UsageError(PCapacityError):
    """Exception raised for invalid command-line arguments"""
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _p_value(text: str) -> float:
    p = float(text)
    if not p > 1.0:
        raise argparse.ArgumentTypeError(f"p must exceed 1, got {text}")
    return p


def parse_p_grid(text: str) -> List[float]:
    """'a:b:step' → [a, a+step, ..., <= b]"""
    try:
        start, stop, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise UsageError(f"--p-grid must look like a:b:step, got '{text}'")
    if not step > 0.0:
        raise UsageError(f"--p-grid step must be positive, got {step}")
    grid = []
    k = 0
    while start + k * step <= stop + 1e-9 * step:
        grid.append(round(start + k * step, 12))
        k += 1
    if not grid:
        raise UsageError(f"--p-grid '{text}' is empty")
    if grid[0] <= 1.0:
        raise UsageError(f"p must exceed 1, --p-grid starts at {grid[0]}")
    return grid


def parse_schedule(text: str) -> List[int]:
    try:
        schedule = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"--schedule must be comma-separated integers, got '{text}'")
    if len(schedule) < 2:
        raise UsageError(f"--schedule needs at least 2 entries, got {len(schedule)}")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise UsageError(f"--schedule must be strictly increasing, got {schedule}")
    return schedule


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rel-tol", type=float, default=None, help="quadrature relative tolerance (default 1e-10)")
    common.add_argument("--log-level", default=None, help="logging level (default WARNING)")
    common.add_argument("--timing", action="store_true", help="add wall_time to each record")

    parser = _Parser(prog="pcap", description="p-capacity and p-parabolicity of model warped products")
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)
    commands.required = True

    classify = commands.add_parser("classify", parents=[common], help="decide p-parabolicity")
    classify.add_argument("spec")
    classify.add_argument("--p", type=_p_value, required=True)
    classify.add_argument("--t-max", type=float, default=None, help="integration horizon (default 1e6)")
    classify.add_argument("--margin", type=float, default=None, help="tail exponent margin (default 0.05)")
    classify.add_argument("--log-data", default=None, metavar="PATH", help="write (t, log g) samples as CSV")

    capacity = commands.add_parser("capacity", parents=[common], help="Cap_p(D, D_R)")
    capacity.add_argument("spec")
    capacity.add_argument("--p", type=_p_value, required=True)
    capacity.add_argument("--R", type=float, required=True)
    capacity.add_argument("--method", choices=("flux", "variational", "both"), default="flux")
    capacity.add_argument("--grid", type=int, default=None, help="variational grid size (default 2000)")
    capacity.add_argument("--format", choices=("json", "csv"), default="json")

    sweep = commands.add_parser("sweep", parents=[common], help="classify along a p grid")
    sweep.add_argument("spec")
    sweep.add_argument("--p-grid", required=True, help="a:b:step")

    energy = commands.add_parser("energy", parents=[common], help="pulled-back cutoff energies")
    energy.add_argument("spec")
    energy.add_argument("--p", type=_p_value, required=True)
    energy.add_argument("--schedule", required=True, help="j1,j2,...")
    energy.add_argument("--family", choices=("optimal", "log"), default="optimal")
    return parser


def _stamp(records, started: float, timing: bool):
    if timing:
        elapsed = time.perf_counter() - started
        for record in records:
            record["wall_time"] = elapsed
    return records


def cmd_classify(args) -> int:
    started = time.perf_counter()
    spec = load_spec(args.spec)
    quadrature = create_quadrature_spec(spec.options, args.rel_tol)
    options = create_classify_options(spec.options, args.t_max, args.margin)
    if spec.kind == "submersion":
        service = create_submersion_service(quadrature, options)
        submersion = spec.to_submersion()
        manifold = base_manifold(submersion)
        base_verdict = service.criterion.classify(manifold, args.p)
        verdict = service.transfer_verdict(submersion, base_verdict, args.p)
        criterion = service.criterion
    else:
        criterion = create_parabolicity_service(quadrature, options)
        manifold = spec.to_manifold()
        verdict = criterion.classify(manifold, args.p)

    if args.log_data:
        samples = criterion.log_samples(manifold, args.p, options.T_max)
        frame = pd.DataFrame(samples, columns=["t", "log_g"])
        frame.to_csv(args.log_data, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.info(f"Wrote {len(samples)} log samples to {args.log_data}")

    record = verdict_record(verdict, args.spec, spec.kind)
    _stamp([record], started, args.timing)
    print(to_json_line(record))
    return EXIT_CODES[verdict["decision"]]


def cmd_capacity(args) -> int:
    started = time.perf_counter()
    spec = load_spec(args.spec)
    manifold = spec.to_manifold()
    engine = create_capacity_engine(create_quadrature_spec(spec.options, args.rel_tol))
    estimates = []
    if args.method in ("flux", "both"):
        estimates.append(engine.flux_capacity(manifold, args.p, args.R))
    if args.method in ("variational", "both"):
        grid = create_grid_size(spec.options, args.grid)
        estimates.append(engine.variational_capacity(manifold, args.p, args.R, grid))

    records = _stamp(capacity_records(estimates, args.spec), started, args.timing)
    if args.format == "csv":
        columns = CAPACITY_COLUMNS + (["wall_time"] if args.timing else [])
        sys.stdout.write(to_csv(records, columns))
    else:
        for record in records:
            print(to_json_line(record))
    return 0


def cmd_sweep(args) -> int:
    started = time.perf_counter()
    grid = parse_p_grid(args.p_grid)
    spec = load_spec(args.spec)
    manifold = spec.to_manifold()
    quadrature = create_quadrature_spec(spec.options, args.rel_tol)
    service = create_parabolicity_service(quadrature, create_classify_options(spec.options))
    table = service.sweep_p(manifold, grid)
    for note in table["notes"]:
        logger.info(note)
    records = _stamp(sweep_records(table), started, args.timing)
    columns = SWEEP_COLUMNS + (["wall_time"] if args.timing else [])
    sys.stdout.write(to_csv(records, columns))
    return 0


def cmd_energy(args) -> int:
    started = time.perf_counter()
    schedule = parse_schedule(args.schedule)
    spec = load_spec(args.spec)
    submersion = spec.to_submersion()
    quadrature = create_quadrature_spec(spec.options, args.rel_tol)
    service = create_submersion_service(quadrature, create_classify_options(spec.options))
    report = service.verify_decay(submersion, args.p, schedule, CutoffFamily(kind=args.family))
    for note in report["notes"]:
        logger.info(note)
    records = _stamp(energy_records(report), started, args.timing)
    columns = ENERGY_COLUMNS + (["wall_time"] if args.timing else [])
    sys.stdout.write(to_csv(records, columns))
    return 0 if report["decays"] else 1


COMMANDS = {
    "classify": cmd_classify,
    "capacity": cmd_capacity,
    "sweep": cmd_sweep,
    "energy": cmd_energy,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        level = create_log_level(args.log_level)
    except (UsageError, ValueError) as e:
        print(f"pcap: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SpecFileError, ValueError) as e:
        logger.error(f"Invalid input: {e}")
        print(f"pcap: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as e:
        logger.error(f"Precondition not met: {e}")
        print(f"pcap: precondition failed: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (QuadratureError, CapacityError, CriterionError, ProfileError, ManifoldError) as e:
        logger.error(f"Numerical failure: {e}")
        print(f"pcap: numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        print(f"pcap: unexpected error: {e}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    raise SystemExit(main())
