"""
Device command: derived cavity-QED quantities
"""
import logging
from typing import Dict, Optional

import pandas as pd

from rebsim.commands.output import output_stream, write_json
from rebsim.schemas.config import Config, OutputFormat
from rebsim.services.reporting import derived_parameters, flatten

logger = logging.getLogger(__name__)


def cmd_params(
    config: Config,
    out: Optional[str] = None,
    fmt: Optional[OutputFormat] = None,
) -> Dict[str, Dict[str, object]]:
    """
    Report C (bare and dephased), F_p, η_out, Γ, Γ′, DW′, QE′ and the
    per-spin (r, t, l) of both device profiles

    Args:
        config: validated run document
        out: output path; stdout when omitted
        fmt: json (default) or csv as ``device,quantity,value`` rows

    Returns:
        The report that was written
    """
    report = derived_parameters(config)
    if OutputFormat(fmt or OutputFormat.JSON) == OutputFormat.JSON:
        write_json(report, out)
        return report

    rows = [
        {"device": device, "quantity": name, "value": value}
        for device, values in report.items()
        for name, value in flatten(values)
    ]
    with output_stream(out) as stream:
        pd.DataFrame(rows, columns=["device", "quantity", "value"]).to_csv(
            stream, index=False, float_format="%.17g", lineterminator="\n"
        )
    return report
