"""
CSV, JSON and DOT writers. Output is deterministic: floats carry
`csv_significant_digits` significant digits and rows keep their input order.
"""
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import pandas as pd
from jinja2 import Environment, FileSystemLoader
from pydantic import BaseModel

from fracton.config import settings
from fracton.models import DualPair, OccupationRow, TransitionGraph

logger = logging.getLogger(__name__)

BASE_DIR = Path(__file__).resolve().parent.parent

templates = Environment(
    loader=FileSystemLoader(str(BASE_DIR / "templates")),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
    autoescape=False,
)


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, f".{settings.csv_significant_digits}g")
    if isinstance(value, (int, Fraction, BaseModel)):
        return str(value)
    return str(value)


def to_csv(rows: Iterable[Dict[str, Any]], columns: Sequence[str]) -> str:
    """Render dict rows as CSV with a fixed column order; missing cells are empty"""
    formatted = [{column: format_value(row.get(column)) for column in columns} for row in rows]
    frame = pd.DataFrame(formatted, columns=list(columns), dtype=str)
    return frame.to_csv(index=False, lineterminator="\n")


def to_json(payload: Any) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    elif isinstance(payload, list):
        payload = [item.model_dump(mode="json") if isinstance(item, BaseModel) else item for item in payload]
    return json.dumps(payload, indent=2) + "\n"


def graph_to_dot(graph: TransitionGraph) -> str:
    """Undirected DOT graph, vertices labelled "p/q [h=a/b]" """
    template = templates.get_template("transition_graph.dot.j2")
    vertices = [{"name": str(nu), "h": str(graph.class_of(nu))} for nu in graph.vertices]
    edges = [(str(a), str(b)) for a, b in graph.edges]
    return template.render(
        band=graph.band,
        max_denominator=graph.max_denominator,
        vertices=vertices,
        edges=edges,
    )


def table_to_csv(rows: List[OccupationRow]) -> str:
    """h,nu,n rows in exact rational form"""
    return to_csv(({"h": row.h, "nu": row.nu, "n": row.n} for row in rows), ["h", "nu", "n"])


def dual_pairs_to_csv(pairs: List[DualPair]) -> str:
    return to_csv(
        ({"nu": pair.nu, "dual": pair.dual, "h": pair.h, "dual_h": pair.dual_h} for pair in pairs),
        ["nu", "dual", "h", "dual_h"],
    )


def emit(text: str, destination: Optional[Path] = None) -> None:
    """Write to a file, or to standard output when no path is given"""
    if destination is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    destination.parent.mkdir(parents=True, exist_ok=True)
    with open(destination, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    logger.info(f"Wrote {destination}")
