"""Readers and writers for sample files, estimator summaries, curves and geodesic balls."""
import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, List, Sequence, TextIO, Union

import numpy as np
from pydantic import ValidationError

from shared.errors import SampleFileError
from shared.models import (
    BALL_CSV_COLUMNS,
    CSV_SUMMARY_COLUMNS,
    BallPoint,
    FitReport,
    PosteriorSummary,
    SampleSet,
)
from src.utils import format_real, round_real

logger = logging.getLogger("paretogeo.data_io")

PathLike = Union[str, Path]


# ==================== SAMPLE FILES ====================


def _meaningful_lines(text: str):
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield line_number, line


def _parse_observation(token: str, path: PathLike, line_number: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise SampleFileError(f"cannot parse {token!r} as a real number", path, line_number) from None
    if not (value > 0) or math.isinf(value):
        raise SampleFileError(f"observation must be a positive finite real, got {token!r}", path, line_number)
    return value


def parse_sample_text(text: str, path: PathLike = "<input>") -> SampleSet:
    """Newline-delimited reals, or CSV with a header containing column `x`.

    Blank lines and lines starting with '#' are skipped.
    """
    lines = list(_meaningful_lines(text))
    if not lines:
        raise SampleFileError("no observations found", path)

    header_line, header = lines[0]
    fields = [field.strip().lower() for field in header.split(",")]
    values: List[float] = []
    if "x" in fields:
        column = fields.index("x")
        for line_number, line in lines[1:]:
            cells = next(csv.reader([line]))
            if column >= len(cells):
                raise SampleFileError(f"row has no column 'x' ({len(cells)} fields)", path, line_number)
            values.append(_parse_observation(cells[column].strip(), path, line_number))
    elif len(fields) > 1:
        raise SampleFileError("CSV input needs a header row with a column named 'x'", path, header_line)
    else:
        for line_number, line in lines:
            values.append(_parse_observation(line, path, line_number))

    if not values:
        raise SampleFileError("no observations found", path)
    logger.debug(f"Read {len(values)} observations from {path}")
    return SampleSet(values=values)


def read_sample_file(path: PathLike) -> SampleSet:
    text = Path(path).read_text(encoding="utf-8")
    return parse_sample_text(text, path)


def write_sample_file(path: PathLike, samples: SampleSet) -> None:
    # repr keeps every bit, so a reread sample has identical statistics.
    with open(path, "w", encoding="utf-8") as handle:
        for value in samples.values:
            handle.write(f"{value!r}\n")
    logger.info(f"Wrote {len(samples)} samples to {path}")


# ==================== JSON ====================


def _round_floats(obj: Any, precision: int) -> Any:
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return round_real(obj, precision)
    if isinstance(obj, dict):
        return {key: _round_floats(value, precision) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(value, precision) for value in obj]
    return obj


def to_json(payload: Any, precision: int) -> str:
    """One top-level JSON object; pydantic models are dumped by alias, floats rounded."""
    if hasattr(payload, "model_dump"):
        payload = payload.model_dump(mode="json", by_alias=True)
    return json.dumps(_round_floats(payload, precision), indent=2)


def fit_report_to_json(report: FitReport, precision: int) -> str:
    return to_json(report, precision)


def read_fit_report(text: str) -> FitReport:
    try:
        return FitReport.model_validate(json.loads(text))
    except (json.JSONDecodeError, ValidationError) as e:
        raise ValueError(f"not a fit report: {e}") from e


def read_summary_json(text: str) -> List[PosteriorSummary]:
    data = json.loads(text)
    rows = data["rows"] if isinstance(data, dict) else data
    return [PosteriorSummary.model_validate(row) for row in rows]


# ==================== CSV ====================


def write_summary_csv(rows: Iterable[PosteriorSummary], handle: TextIO, precision: int) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(CSV_SUMMARY_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.estimator_kind,
                row.conditioning,
                format_real(row.alpha_hat, precision),
                format_real(row.beta_hat, precision),
                format_real(row.distance_to_reference, precision),
            ]
        )


def summary_to_csv(rows: Iterable[PosteriorSummary], precision: int) -> str:
    buffer = io.StringIO()
    write_summary_csv(rows, buffer, precision)
    return buffer.getvalue()


def read_summary_csv(text: str) -> List[PosteriorSummary]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_SUMMARY_COLUMNS:
        raise ValueError(f"summary CSV header must be {','.join(CSV_SUMMARY_COLUMNS)}")
    return [PosteriorSummary.model_validate(record) for record in reader]


def write_ball_csv(rays: Sequence[Sequence[BallPoint]], handle: TextIO, precision: int) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(BALL_CSV_COLUMNS)
    for ray in rays:
        for point in ray:
            writer.writerow(
                [point.ray_index]
                + [format_real(getattr(point, name), precision) for name in BALL_CSV_COLUMNS[1:]]
            )


def write_curve_csv(
    columns: Sequence[str], rows: Iterable[Sequence[float]], handle: TextIO, precision: int
) -> None:
    # Densities span many decades, so they are written in scientific notation.
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([f"{value:.{precision}e}" for value in row])


# ==================== GRIDS ====================


def parse_grid(grid: str) -> np.ndarray:
    """`start:stop:count` (linear) or `log:start:stop:count` (log-spaced, start > 0)."""
    parts = [part.strip() for part in grid.split(":")]
    logarithmic = parts[0].lower() == "log"
    if logarithmic:
        parts = parts[1:]
    if len(parts) != 3:
        raise ValueError(f"grid must look like start:stop:count or log:start:stop:count, got {grid!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValueError(f"grid has a non-numeric field: {grid!r}") from None
    if count < 2:
        raise ValueError("grid needs at least two points")
    if not (start < stop):
        raise ValueError(f"grid start must be below stop, got {grid!r}")
    if logarithmic:
        if start <= 0:
            raise ValueError("log grid needs a positive start")
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)
