import argparse
import logging
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from fracton import __version__
from fracton.algebra.classes import class_members, dual_class, parse_class_parameter, spin_members
from fracton.algebra.fqhe import class_occupation_table, dual_pairs, farey_graph, graph_occupation_table, lll_occupation
from fracton.config import settings
from fracton.exceptions import DomainError, FractonError, UsageError
from fracton.models import FractonClass, GridSpec, RunConfig, StateReport
from fracton.services import entanglement, export, solver
from fracton.services.verification import MODULES, VerificationSuite, format_report

# Configure logging; standard output carries the results
logging.basicConfig(
    level=getattr(logging, settings.log_level.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler(sys.stderr)
    ]
)

logger = logging.getLogger(__name__)

DISTRIBUTION_COLUMNS = ["xi", "Y", "n", "theta", "p", "q", "identity_defect"]


def _unique(values: Sequence[float]) -> List[float]:
    """Drop repeated points, keeping first-seen order"""
    unique: List[float] = []
    for value in values:
        if value not in unique:
            unique.append(value)
    return unique


def _grid_values(config: RunConfig) -> np.ndarray:
    if config.grid is not None:
        return config.grid.values()
    return np.array(_unique(config.points), dtype=float)


def cmd_distribution(config: RunConfig) -> int:
    """n, Y, Theta, p, q and the partition-identity defect along a grid"""
    several = len(config.classes) > 1
    by_x = config.grid_variable == "x"
    rows: List[Dict] = []
    failures = 0

    values = _grid_values(config)
    for label, h in zip(config.class_labels, config.classes):
        results = solver.sweep(h, values, log_xi=by_x, tolerance=config.solver_tolerance)
        for value, result in zip(values, results):
            row: Dict = {"h": label} if several else {}
            if by_x:
                row["x"] = float(value)
            if isinstance(result, DomainError):
                failures += 1
                if not by_x:
                    row["xi"] = float(value)
                row["error"] = str(result)
            else:
                row.update(
                    xi=result.xi, Y=result.Y, n=result.n, theta=result.theta, p=result.p, q=result.q,
                    identity_defect=solver.partition_identity_defect(result),
                )
            rows.append(row)

    columns = (["h"] if several else []) + (["x"] if by_x else []) + DISTRIBUTION_COLUMNS
    if failures:
        columns.append("error")
        logger.error(f"{failures} of {len(rows)} grid points failed")

    text = export.to_json(rows) if config.output_format == "json" else export.to_csv(rows, columns)
    export.emit(text, config.output)
    return 2 if failures else 0


def cmd_entanglement_curve(config: RunConfig) -> int:
    """E[h, p] for each class along a p grid, one column per class"""
    ps = _grid_values(config)
    if ps.size and (ps.min() < 0.0 or ps.max() > 1.0):
        raise UsageError(f"p grid must lie within [0, 1], got [{ps.min()}, {ps.max()}]")

    columns = ["p"] + [f"E[{label}]" for label in config.class_labels]
    rows = []
    for p in ps:
        row = {"p": float(p)}
        for label, h in zip(config.class_labels, config.classes):
            row[f"E[{label}]"] = entanglement.measure(h, float(p))
        rows.append(row)

    text = export.to_json(rows) if config.output_format == "json" else export.to_csv(rows, columns)
    export.emit(text, config.output)
    return 0


def cmd_state(config: RunConfig) -> int:
    """JSON report of the entanglement of a state read from an amplitude file"""
    if config.amplitudes is None or config.modes is None or config.particles is None:
        raise UsageError("state needs --amplitudes, --modes and --particles")
    if len(config.class_labels) != 1:
        raise UsageError("state takes exactly one --h")

    fracton_class = FractonClass(h=config.class_labels[0])
    state = entanglement.read_amplitude_file(config.amplitudes, fracton_class, config.modes, config.particles)
    breakdown = entanglement.state_breakdown(fracton_class, state)
    report = {
        "h": str(fracton_class.h),
        "modes": config.modes,
        "particles": config.particles,
        "basis_size": entanglement.count_bounded_compositions(config.modes, config.particles, fracton_class.cap),
        "total_entanglement_bits": sum(term.bits for term in breakdown),
        "per_term": breakdown,
    }
    export.emit(export.to_json(StateReport(**report)), config.output)
    return 0


def cmd_farey(config: RunConfig) -> int:
    """Transition graph of one band, plus optional dual-pair and occupation tables"""
    if config.max_denominator is None:
        raise UsageError("farey needs --max-den")
    graph = farey_graph(config.max_denominator, config.band)

    if config.output_format == "dot":
        text = export.graph_to_dot(graph)
    elif config.output_format == "json":
        text = export.to_json(graph)
    else:
        text = export.to_csv(({"nu1": a, "nu2": b} for a, b in graph.edges), ["nu1", "nu2"])
    export.emit(text, config.output)

    if config.pairs_output is not None:
        export.emit(export.dual_pairs_to_csv(dual_pairs(graph)), config.pairs_output)
    if config.table_output is not None:
        export.emit(export.table_to_csv(graph_occupation_table(graph)), config.table_output)
    return 0


def cmd_classes(config: RunConfig) -> int:
    """Members, spins, dual class and lowest-Landau-level occupation per band"""
    rows = []
    for label in config.class_labels:
        fracton_class = FractonClass(h=label)
        dual = dual_class(fracton_class)
        members = class_members(fracton_class, config.bands)
        spins = spin_members(fracton_class, config.bands)
        if fracton_class.is_boundary:
            occupations = ["inf" if fracton_class.h == 2 else lll_occupation(nu) for nu in members]
        else:
            occupations = [row.n for row in class_occupation_table([fracton_class], config.bands)]
        for band, (nu, spin, n) in enumerate(zip(members, spins, occupations)):
            rows.append({"h": fracton_class, "dual_h": dual, "band": band, "nu": nu, "spin": spin, "n": n})

    columns = ["h", "dual_h", "band", "nu", "spin", "n"]
    if config.output_format == "json":
        text = export.to_json([{key: str(value) for key, value in row.items()} for row in rows])
    else:
        text = export.to_csv(rows, columns)
    export.emit(text, config.output)
    return 0


def cmd_verify(config: RunConfig) -> int:
    """Run the identity suite; exit 1 when an asserted check fails"""
    suite = VerificationSuite(solver_tolerance=config.solver_tolerance)
    results = suite.run(config.only)
    text = export.to_json(results) if config.output_format == "json" else format_report(results)
    export.emit(text, config.output)
    return 1 if any(result.status == "FAIL" for result in results) else 0


COMMANDS = {
    "distribution": cmd_distribution,
    "entanglement": cmd_entanglement_curve,
    "state": cmd_state,
    "farey": cmd_farey,
    "classes": cmd_classes,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracton",
        description="Fractal distribution functions, entropy, entanglement and Farey classification of fractons",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    def add_output(sub: argparse.ArgumentParser, formats: Sequence[str], default: str) -> None:
        sub.add_argument("--output", help="output path (default: standard output)")
        sub.add_argument("--format", dest="output_format", choices=list(formats), default=default)

    distribution = subparsers.add_parser("distribution", help="solve the fractal distribution along a grid")
    distribution.add_argument("--h", action="append", required=True, help='class, e.g. "3/2" or "1.5"; repeatable')
    points = distribution.add_mutually_exclusive_group(required=True)
    points.add_argument("--xi", action="append", type=float, help="single xi value; repeatable")
    points.add_argument("--xi-grid", help="min,max,count[,linear|log] over xi")
    points.add_argument("--x-grid", help="min,max,count[,linear|log] over x = (epsilon - mu)/kT")
    distribution.add_argument("--solver-tolerance", type=float)
    add_output(distribution, ["csv", "json"], "csv")

    curve = subparsers.add_parser("entanglement", aliases=["entanglement-curve"],
                                  help="entanglement measure E[h, p] along a p grid")
    curve.add_argument("--h", action="append", required=True)
    p_points = curve.add_mutually_exclusive_group()
    p_points.add_argument("--p", action="append", type=float, help="single p value; repeatable")
    p_points.add_argument("--p-grid", default="0,1,21", help="min,max,count (default 0,1,21)")
    add_output(curve, ["csv", "json"], "csv")

    state = subparsers.add_parser("state", help="entanglement of a state read from an amplitude file")
    state.add_argument("--h", action="append", required=True)
    state.add_argument("--modes", type=int, required=True)
    state.add_argument("--particles", type=int, required=True)
    state.add_argument("--amplitudes", required=True, help="file of '<occupation> <re> <im>' lines")
    add_output(state, ["json"], "json")

    farey = subparsers.add_parser("farey", help="Farey transition graph of a band")
    farey.add_argument("--max-den", dest="max_denominator", type=int, required=True)
    farey.add_argument("--band", type=int, default=0, help="band index k of (k, k + 1)")
    farey.add_argument("--pairs-output", help="CSV of dual pairs")
    farey.add_argument("--table-output", help="CSV of (h, nu, n)")
    add_output(farey, ["dot", "csv", "json"], "dot")

    classes = subparsers.add_parser("classes", help="members, spins and duals of classes")
    classes.add_argument("--h", action="append", required=True)
    classes.add_argument("--bands", type=int, default=3)
    add_output(classes, ["csv", "json"], "csv")

    verify = subparsers.add_parser("verify", help="run the identity suite")
    verify.add_argument("--only", action="append", choices=list(MODULES), default=[])
    verify.add_argument("--solver-tolerance", type=float)
    add_output(verify, ["text", "json"], "text")

    return parser


def _parse_grid(text: Optional[str]) -> Optional[GridSpec]:
    if text is None:
        return None
    try:
        return GridSpec.parse(text)
    except ValueError as e:
        raise UsageError(f"invalid grid {text!r}: {e}") from e


def build_config(args: argparse.Namespace) -> RunConfig:
    """Resolve parsed arguments into a RunConfig"""
    subcommand = "entanglement" if args.subcommand == "entanglement-curve" else args.subcommand
    labels: List[str] = getattr(args, "h", None) or []
    fields: Dict = {
        "subcommand": subcommand,
        "class_labels": labels,
        "classes": [parse_class_parameter(label) for label in labels],
        "output": args.output,
        "output_format": args.output_format,
    }

    if subcommand == "distribution":
        fields["points"] = args.xi or []
        fields["grid"] = _parse_grid(args.xi_grid or args.x_grid)
        fields["grid_variable"] = "x" if args.x_grid else "xi"
        fields["solver_tolerance"] = args.solver_tolerance
    elif subcommand == "entanglement":
        fields["points"] = args.p or []
        fields["grid"] = None if args.p else _parse_grid(args.p_grid)
    elif subcommand == "state":
        fields.update(modes=args.modes, particles=args.particles, amplitudes=args.amplitudes)
    elif subcommand == "farey":
        fields.update(
            max_denominator=args.max_denominator,
            band=args.band,
            pairs_output=args.pairs_output,
            table_output=args.table_output,
        )
    elif subcommand == "classes":
        fields["bands"] = args.bands
    elif subcommand == "verify":
        fields.update(only=args.only, solver_tolerance=args.solver_tolerance)

    return RunConfig(**fields)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns 0 on success, 1 on a failed check, 2 on a usage or domain error"""
    args = build_parser().parse_args(argv)
    try:
        config = build_config(args)
        logger.info(f"Running {config.subcommand}")
        return COMMANDS[config.subcommand](config)
    except ValidationError as e:
        logger.error(f"Invalid arguments: {e}")
        return 2
    except (UsageError, DomainError) as e:
        logger.error(str(e))
        return 2
    except FractonError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 2
    except OSError as e:
        logger.error(f"Cannot access file: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
