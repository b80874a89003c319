"""
Simulation commands: single runs, sweeps and Pareto reduction
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd

from rebsim.commands.output import output_stream, write_json
from rebsim.exceptions import ConfigError
from rebsim.schemas.config import Config, OutputFormat
from rebsim.schemas.sweep import ProtocolOutcome, SweepResult
from rebsim.services.builder import ProtocolBuilder, ProtocolEvaluator
from rebsim.services.protocols import ProtocolEngine
from rebsim.services.sweep import (
    best_point,
    frontier_families,
    pareto_csv,
    read_csv,
    run_sweep,
    write_csv,
    write_metadata,
)

logger = logging.getLogger(__name__)


def _outcome_document(outcome: ProtocolOutcome) -> Dict[str, object]:
    return outcome.model_dump(mode="json")


def _emit_rows(
    rows: List[ProtocolOutcome],
    axes: List[str],
    out: Optional[Union[str, Path]],
    fmt: OutputFormat,
) -> None:
    if fmt == OutputFormat.JSON:
        write_json([_outcome_document(r) for r in rows], out)
        return
    with output_stream(out) as stream:
        write_csv(rows, axes, stream)
    if out is not None:
        logger.info("wrote %d row(s) to %s", len(rows), out)


def cmd_run(
    config: Config,
    out: Optional[str] = None,
    fmt: Optional[OutputFormat] = None,
) -> ProtocolOutcome:
    """
    Run the configured protocol once at its fixed parameters

    Numerical guards raise instead of producing an error row.

    Args:
        config: validated run document (the sweep section is ignored)
        out: output path; stdout when omitted
        fmt: json (default) or a single-row csv

    Returns:
        ProtocolOutcome
    """
    config.numerics.apply()
    spec = ProtocolBuilder(config).build({})
    outcome = ProtocolEngine().run(spec, {})
    fmt = OutputFormat(fmt or OutputFormat.JSON)
    if fmt == OutputFormat.JSON:
        write_json(_outcome_document(outcome), out)
    else:
        _emit_rows([outcome], [], out, fmt)
    return outcome


def cmd_sweep(
    config: Config,
    out: Optional[str] = None,
    parallelism: Optional[int] = None,
    fmt: Optional[OutputFormat] = None,
) -> SweepResult:
    """
    Evaluate the configured grid and persist every row

    Args:
        config: validated run document
        out: CSV/JSON path (defaults to ``output.path``, then stdout)
        parallelism: worker processes (defaults to REBSIM_THREADS)
        fmt: overrides ``output.format``

    Returns:
        SweepResult; a metadata sidecar is written next to file outputs
    """
    out = out or config.output.path
    fmt = OutputFormat(fmt or config.output.format)
    result = run_sweep(
        ProtocolEvaluator(config),
        config.sweep,
        parallelism=parallelism,
        config_hash=config.config_hash(),
    )
    _emit_rows(result.rows, result.axis_names, out, fmt)
    if out is not None:
        write_metadata(result.metadata, out)
    return result


def load_results(path: Union[str, Path]) -> SweepResult:
    """Read a sweep CSV, mapping unreadable files to ConfigError"""
    try:
        return read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ConfigError(f"cannot read results '{path}': {exc}") from exc


def cmd_pareto(
    results: Union[str, Path],
    out: Optional[str] = None,
    group_by: Optional[str] = None,
    max_infidelity: Optional[float] = None,
    fmt: Optional[OutputFormat] = None,
) -> List[ProtocolOutcome]:
    """
    Reduce a saved sweep to its frontier

    Args:
        results: CSV written by ``sweep``
        out: output path; stdout when omitted
        group_by: emit one frontier per value of this axis
        max_infidelity: emit only the best row within this infidelity bound
        fmt: csv (default) or json

    Returns:
        Rows written

    Raises:
        NoFeasiblePointError: if ``max_infidelity`` excludes every row
    """
    result = load_results(results)
    fmt = OutputFormat(fmt or OutputFormat.CSV)
    if max_infidelity is not None:
        rows = [best_point(result, max_infidelity)]
    elif group_by is not None:
        families = frontier_families(result, group_by)
        rows = [row for family in families.values() for row in family]
    else:
        rows = pareto_csv(result)
    logger.info("frontier: %d of %d row(s)", len(rows), len(result.rows))
    _emit_rows(rows, result.axis_names, out, fmt)
    return rows
