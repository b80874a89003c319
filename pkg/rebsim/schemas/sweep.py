"""
Pydantic schemas for protocol outcomes and sweep results
"""
import itertools
import math
from datetime import datetime
from enum import Enum
from typing import Dict, Iterator, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from rebsim.config import settings


class ProtocolOutcome(BaseModel):
    """Result of one protocol evaluation; error rows carry NaN metrics"""
    success_probability: float = Field(..., description="Summed trace over accepting patterns")
    fidelity: float = Field(..., description="Fidelity to the target Bell state")
    infidelity: float = Field(..., description="1 - fidelity")
    herald_pattern: str = Field("", description="Accepting patterns, e.g. 'TF|FT'")
    swept_values: Dict[str, float] = Field(default_factory=dict, description="Grid coordinates")
    error: Optional[str] = Field(None, description="Exception class and message if the point failed")

    @model_validator(mode="after")
    def check_ranges(self):
        if self.error is not None:
            return self
        tol = settings.TRACE_TOL
        if not (-tol <= self.success_probability <= 1.0 + tol):
            raise ValueError(f"success probability {self.success_probability} outside [0, 1]")
        if abs(self.infidelity - (1.0 - self.fidelity)) > 1e-12:
            raise ValueError("infidelity must equal 1 - fidelity")
        return self

    @property
    def ok(self) -> bool:
        return self.error is None

    @classmethod
    def failed(cls, swept_values: Dict[str, float], error: str) -> "ProtocolOutcome":
        nan = float("nan")
        return cls(
            success_probability=nan,
            fidelity=nan,
            infidelity=nan,
            herald_pattern="",
            swept_values=swept_values,
            error=error,
        )


class AxisScale(str, Enum):
    LINEAR = "linear"
    LOG = "log"


class SweepAxis(BaseModel):
    """One swept parameter"""
    name: str = Field(..., min_length=1, description="Parameter name")
    min: float = Field(..., description="First value")
    max: float = Field(..., description="Last value")
    count: int = Field(..., ge=1, description="Number of points")
    scale: AxisScale = Field(AxisScale.LINEAR, description="linear or log spacing")

    @model_validator(mode="after")
    def check_bounds(self):
        if self.min > self.max:
            raise ValueError(f"axis '{self.name}': min ({self.min}) > max ({self.max})")
        if self.scale == AxisScale.LOG and self.min <= 0:
            raise ValueError(f"axis '{self.name}': log scale requires min > 0")
        return self

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.min])
        if self.scale == AxisScale.LOG:
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


class SweepGrid(BaseModel):
    """Cartesian product of axes, row-major in config order"""
    axes: List[SweepAxis] = Field(default_factory=list)

    @field_validator("axes")
    @classmethod
    def unique_names(cls, axes):
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate axis names {names}")
        return axes

    @property
    def names(self) -> List[str]:
        return [a.name for a in self.axes]

    @property
    def cardinality(self) -> int:
        return math.prod(a.count for a in self.axes)

    def points(self) -> Iterator[Dict[str, float]]:
        """Grid points in row-major order; an empty grid yields one empty point"""
        names = self.names
        for combo in itertools.product(*(a.values() for a in self.axes)):
            yield {name: float(v) for name, v in zip(names, combo)}


class SweepMetadata(BaseModel):
    """Contents of the JSON sidecar"""
    config_hash: str = Field(..., description="sha256 of the canonical run document")
    version: str = Field(..., description="Package version")
    numpy_version: str = Field("", description="numpy version used")
    started_at: Optional[datetime] = None
    wall_time_s: float = Field(..., ge=0.0)
    workers: int = Field(..., ge=1)
    rows: int = Field(..., ge=0)
    failed_rows: int = Field(0, ge=0)


class SweepResult(BaseModel):
    """All rows of a sweep, in grid order"""
    grid: Optional[SweepGrid] = None
    rows: List[ProtocolOutcome] = Field(default_factory=list)
    metadata: Optional[SweepMetadata] = None

    @model_validator(mode="after")
    def check_row_count(self):
        if self.grid is not None and len(self.rows) != self.grid.cardinality:
            raise ValueError(
                f"{len(self.rows)} rows for a grid of {self.grid.cardinality} points"
            )
        return self

    @property
    def axis_names(self) -> List[str]:
        if self.grid is not None:
            return self.grid.names
        return list(self.rows[0].swept_values) if self.rows else []
