"""
Output plumbing shared by the commands
"""
import json
import logging
import math
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, Optional, TextIO, Union

logger = logging.getLogger(__name__)


@contextmanager
def output_stream(path: Optional[Union[str, Path]]) -> Iterator[TextIO]:
    """Text stream for ``path``, or stdout when no path is given"""
    if path is None:
        yield sys.stdout
        return
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps '\n' line endings on every platform
    with path.open("w", encoding="utf-8", newline="") as handle:
        yield handle


def _finite(value: Any) -> Any:
    """Copy of ``value`` with NaN and infinities replaced by None"""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(item) for item in value]
    return value


def write_json(document: object, path: Optional[Union[str, Path]]) -> None:
    """Strict JSON; undefined quantities are written as null"""
    with output_stream(path) as stream:
        json.dump(_finite(document), stream, indent=2, allow_nan=False)
        stream.write("\n")
    if path is not None:
        logger.info("wrote %s", path)
