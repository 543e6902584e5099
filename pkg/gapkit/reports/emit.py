"""Versioned JSON reports and CSV plot series."""

import csv
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from gapkit.errors import ReportError
from gapkit.gap.fourier import CauchyDecayTrace, measure_fourier, scan_grid, scan_step_bound
from gapkit.sets.measure import AtomicMeasure
from gapkit.utils import dumps

logger = logging.getLogger(__name__)

SCHEMA = "gapkit/1"


class ReportEnvelope(BaseModel):
    """Top level of every JSON report; no timestamps, so equal runs give equal bytes."""

    model_config = ConfigDict(populate_by_name=True)

    schema_version: str = Field(default=SCHEMA, alias="schema")
    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    results: Dict[str, Any] = Field(default_factory=dict)
    passed: bool = True


def to_jsonable(obj: Any) -> Any:
    """Plain JSON data from models, arrays, complex numbers and measures."""
    if isinstance(obj, BaseModel):
        return to_jsonable(dict(obj))
    if isinstance(obj, AtomicMeasure):
        return {
            "supports": to_jsonable(obj.supports),
            "weights": to_jsonable(obj.weights),
            "total_variation": to_jsonable(obj.total_variation),
        }
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, complex):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Path):
        return str(obj)
    raise ReportError(f"Cannot serialize {type(obj).__name__} into a report")


def build_envelope(command: str, config: Dict[str, Any], results: Dict[str, Any], passed: bool = True) -> ReportEnvelope:
    return ReportEnvelope(command=command, config=to_jsonable(config), results=to_jsonable(results), passed=passed)


def render_report(envelope: ReportEnvelope) -> str:
    return dumps(envelope.model_dump(mode="json", by_alias=True)) + "\n"


def emit_report(envelope: ReportEnvelope, path: Optional[Union[str, Path]] = None) -> str:
    """Render the report and write it to ``path`` when given.

    Returns:
        The JSON text
    """
    text = render_report(envelope)
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as e:
            raise ReportError(f"Cannot write report to {path}: {e}") from e
        logger.info(f"report written to {path}")
    return text


def parse_report(text: str) -> ReportEnvelope:
    """Validate JSON text against the report model."""
    try:
        envelope = ReportEnvelope.model_validate_json(text)
    except ValueError as e:
        raise ReportError(f"Invalid report: {e}") from e
    if envelope.schema_version != SCHEMA:
        raise ReportError(f"Unsupported report schema {envelope.schema_version!r}")
    return envelope


def report_schema() -> Dict[str, Any]:
    """JSON schema of the report envelope."""
    return ReportEnvelope.model_json_schema(by_alias=True)


def _write_rows(path: Union[str, Path], header: Tuple[str, str], rows) -> None:
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for x, v in rows:
                writer.writerow([repr(float(x)), repr(float(v))])
    except OSError as e:
        raise ReportError(f"Cannot write CSV to {path}: {e}") from e


def write_scan_csv(
    measure: AtomicMeasure, interval: Tuple[float, float], path: Union[str, Path], step: Optional[float] = None
) -> int:
    """Write |mu^(x)| on a grid of ``interval`` under the header ``x,abs_ft``.

    Returns:
        Number of rows written
    """
    step = step or min(scan_step_bound(measure), (interval[1] - interval[0]) / 512.0)
    xs = scan_grid(interval, step)
    values = np.abs(measure_fourier(measure, xs))
    _write_rows(path, ("x", "abs_ft"), zip(xs, values))
    return int(xs.size)


def write_decay_csv(trace: CauchyDecayTrace, path: Union[str, Path]) -> int:
    """Write the Cauchy decay trace under the header ``y,trace``, lower axis first."""
    rows = sorted(trace.samples)
    _write_rows(path, ("y", "trace"), rows)
    return len(rows)
