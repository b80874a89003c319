"""
Parameter-grid execution, persistence and Pareto reduction
"""
import bisect
import json
import logging
import math
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, TextIO, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from rebsim import __version__
from rebsim.config import settings
from rebsim.exceptions import NoFeasiblePointError, ParameterError
from rebsim.schemas.sweep import ProtocolOutcome, SweepGrid, SweepMetadata, SweepResult
from rebsim.services.protocols import pareto

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ("success_probability", "infidelity", "fidelity", "herald_pattern", "error")
METRIC_COLUMNS = ("success_probability", "infidelity", "fidelity")

Evaluator = Callable[[Mapping[str, float]], ProtocolOutcome]
Target = Union[str, Path, TextIO]


def resolve_parallelism(parallelism: Optional[int] = None) -> int:
    """Explicit value, else REBSIM_THREADS, never below 1"""
    if parallelism is None:
        parallelism = settings.THREADS
    if parallelism < 1:
        raise ParameterError(f"parallelism must be >= 1, got {parallelism}")
    return parallelism


def run_sweep(
    evaluator: Evaluator,
    grid: SweepGrid,
    parallelism: Optional[int] = None,
    config_hash: str = "",
) -> SweepResult:
    """
    Evaluate every grid point exactly once

    Points are dispatched to a loky process pool and collected in grid
    order, so the rows do not depend on the number of workers.

    Args:
        evaluator: picklable callable mapping swept values to an outcome row
        grid: cartesian grid, row-major in axis order
        parallelism: worker processes (defaults to REBSIM_THREADS)
        config_hash: hash of the run document, stored in the metadata

    Returns:
        SweepResult with one row per grid point
    """
    workers = resolve_parallelism(parallelism)
    points = list(grid.points())
    logger.info("sweep: %d points over %s, %d worker(s)", len(points), grid.names or "[]", workers)
    started_at = datetime.now(timezone.utc)
    start = time.perf_counter()

    if workers == 1:
        rows = [evaluator(point) for point in points]
    else:
        rows = Parallel(n_jobs=workers, backend="loky")(
            delayed(evaluator)(point) for point in points
        )

    wall_time = time.perf_counter() - start
    failed = sum(1 for row in rows if not row.ok)
    logger.info("sweep finished in %.2f s, %d failed point(s)", wall_time, failed)
    metadata = SweepMetadata(
        config_hash=config_hash,
        version=__version__,
        numpy_version=np.__version__,
        started_at=started_at,
        wall_time_s=wall_time,
        workers=workers,
        rows=len(rows),
        failed_rows=failed,
    )
    return SweepResult(grid=grid, rows=list(rows), metadata=metadata)


def result_frame(rows: List[ProtocolOutcome], axes: List[str]) -> pd.DataFrame:
    """Rows as a DataFrame in the persisted column order"""
    records = []
    for row in rows:
        record: Dict[str, object] = {name: row.swept_values.get(name, math.nan) for name in axes}
        record.update(
            success_probability=row.success_probability,
            infidelity=row.infidelity,
            fidelity=row.fidelity,
            herald_pattern=row.herald_pattern,
            error=row.error or "",
        )
        records.append(record)
    return pd.DataFrame.from_records(records, columns=list(axes) + list(RESULT_COLUMNS))


def write_csv(rows: List[ProtocolOutcome], axes: List[str], target: Target) -> None:
    """
    Persist rows as CSV

    Doubles are written with 17 significant digits, '.' decimals and '\\n'
    line endings; NaN metrics of failed rows are empty cells.
    """
    frame = result_frame(rows, axes)
    frame.to_csv(
        target,
        index=False,
        float_format="%.17g",
        lineterminator="\n",
        encoding="utf-8",
    )
    if isinstance(target, (str, Path)):
        logger.info("wrote %d row(s) to %s", len(rows), target)


def _parse_float(cell: str) -> float:
    """Exact parse of a %.17g cell; empty cells are NaN"""
    if cell == "":
        return math.nan
    try:
        return float(cell)
    except ValueError as exc:
        raise ParameterError(f"non-numeric value '{cell}' in a numeric column") from exc


def read_csv(source: Union[str, Path, TextIO]) -> SweepResult:
    """
    Load rows written by ``write_csv``

    Returns:
        SweepResult without grid or metadata; axes are the leading columns
    """
    frame = pd.read_csv(source, dtype=str, keep_default_na=False, encoding="utf-8")
    missing = [c for c in RESULT_COLUMNS if c not in frame.columns]
    if missing:
        raise ParameterError(f"not a result file, missing columns {missing}")
    axes = [c for c in frame.columns if c not in RESULT_COLUMNS]
    numeric = axes + list(METRIC_COLUMNS)
    frame[numeric] = frame[numeric].apply(lambda column: column.map(_parse_float))
    rows = []
    for record in frame.to_dict(orient="records"):
        swept = {name: float(record[name]) for name in axes}
        error = record["error"] or None
        if error is not None:
            rows.append(ProtocolOutcome.failed(swept, error))
            continue
        rows.append(
            ProtocolOutcome(
                success_probability=float(record["success_probability"]),
                fidelity=float(record["fidelity"]),
                infidelity=float(record["infidelity"]),
                herald_pattern=record["herald_pattern"],
                swept_values=swept,
            )
        )
    return SweepResult(rows=rows)


def write_metadata(metadata: SweepMetadata, path: Union[str, Path]) -> Path:
    """JSON sidecar next to the CSV (``<csv>.meta.json``)"""
    sidecar = Path(str(path) + ".meta.json")
    sidecar.write_text(json.dumps(metadata.model_dump(mode="json"), indent=2) + "\n", encoding="utf-8")
    logger.info("wrote metadata to %s", sidecar)
    return sidecar


def pareto_csv(result: SweepResult) -> List[ProtocolOutcome]:
    """Frontier rows of a sweep, by increasing success probability"""
    return pareto(result.rows)


def best_point(result: SweepResult, max_infidelity: float) -> ProtocolOutcome:
    """
    Highest-success row whose infidelity does not exceed the bound

    Raises:
        NoFeasiblePointError: if no valid row satisfies the bound
    """
    feasible = [r for r in pareto(result.rows) if r.infidelity <= max_infidelity]
    if not feasible:
        raise NoFeasiblePointError(f"no point with infidelity <= {max_infidelity:g}")
    return max(feasible, key=lambda r: r.success_probability)


def frontier_families(result: SweepResult, group_by: str) -> Dict[float, List[ProtocolOutcome]]:
    """
    One Pareto frontier per value of an outer axis

    Args:
        result: sweep rows
        group_by: name of the axis whose values label the families

    Returns:
        Frontiers keyed by axis value, in increasing order
    """
    if group_by not in result.axis_names:
        raise ParameterError(f"'{group_by}' is not a swept axis; axes are {result.axis_names}")
    groups: Dict[float, List[ProtocolOutcome]] = {}
    for row in result.rows:
        groups.setdefault(row.swept_values[group_by], []).append(row)
    return {value: pareto(groups[value]) for value in sorted(groups)}


def infidelity_at_success(frontier: List[ProtocolOutcome], success: float) -> float:
    """
    Frontier infidelity at a given success probability

    Linear between neighbouring frontier points; below the first point the
    first point's infidelity applies.

    Raises:
        NoFeasiblePointError: if ``success`` exceeds every frontier point
    """
    points = sorted(frontier, key=lambda r: r.success_probability)
    if not points or success > points[-1].success_probability:
        raise NoFeasiblePointError(f"frontier never reaches success probability {success:g}")
    successes = [p.success_probability for p in points]
    index = bisect.bisect_left(successes, success)
    if index == 0:
        return points[0].infidelity
    low, high = points[index - 1], points[index]
    span = high.success_probability - low.success_probability
    weight = (success - low.success_probability) / span
    return low.infidelity + weight * (high.infidelity - low.infidelity)
