"""
Pydantic schemas for run documents

Physical rates carry their unit in the field name and are normalized to GHz
by ``DeviceProfile.to_system``.
"""
import hashlib
import json
from enum import Enum
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from rebsim.config import settings
from rebsim.exceptions import ConfigError
from rebsim.schemas.channel_params import (
    DetectorKind,
    PhotonSource,
    ReflectionVariant,
    SpinChannelParams,
)
from rebsim.schemas.sweep import SweepGrid
from rebsim.schemas.system import CavityParams, CoupledSystem, EmitterParams


class DeviceProfile(BaseModel):
    """Emitter-cavity device with unit-suffixed rates"""
    model_config = ConfigDict(extra="forbid")

    omega_a_thz: float = Field(406.706, gt=0, description="Emitter resonance frequency")
    gamma_r_mhz: float = Field(13.1, ge=0, description="ZPL radiative decay rate")
    gamma_mhz: float = Field(..., ge=0, description="Total emitter decay rate")
    gamma_star_mhz: float = Field(30.5, ge=0, description="Pure dephasing rate")
    sigma_omega_mhz: float = Field(0.0, ge=0, description="Spectral diffusion (stored only)")
    delta_01_ghz: float = Field(1.0, description="Bright/dark optical transition splitting")
    dw: float = Field(0.7, ge=0, le=1, description="Debye-Waller factor")
    qe: float = Field(0.2, ge=0, le=1, description="Quantum efficiency")
    g_ghz: float = Field(..., ge=0, description="Emitter-cavity coupling")
    kappa_r_ghz: float = Field(..., ge=0, description="Cavity decay into the reflection port")
    kappa_t_ghz: float = Field(0.0, ge=0, description="Cavity decay into the transmission port")
    kappa_l_ghz: float = Field(0.0, ge=0, description="Cavity decay into the loss port")
    delta_ac_ghz: float = Field(0.0, description="Emitter-cavity detuning omega_a - omega_c")

    def to_system(self) -> CoupledSystem:
        """Normalize to GHz and build the coupled system"""
        omega_a = self.omega_a_thz * 1e3
        emitter = EmitterParams(
            omega_a=omega_a,
            gamma_r=self.gamma_r_mhz * 1e-3,
            gamma=self.gamma_mhz * 1e-3,
            gamma_star=self.gamma_star_mhz * 1e-3,
            sigma_omega=self.sigma_omega_mhz * 1e-3,
            DW=self.dw,
            QE=self.qe,
            delta_01=self.delta_01_ghz,
        )
        cavity = CavityParams(
            omega_c=omega_a - self.delta_ac_ghz,
            kappa_r=self.kappa_r_ghz,
            kappa_t=self.kappa_t_ghz,
            kappa_l=self.kappa_l_ghz,
        )
        return CoupledSystem(emitter=emitter, cavity=cavity, g=self.g_ghz)


def projector_profile() -> DeviceProfile:
    """Critically coupled device used for amplitude reflection"""
    return DeviceProfile(gamma_mhz=92.5, g_ghz=8.38, kappa_r_ghz=10.9, kappa_t_ghz=10.9)


def emission_profile() -> DeviceProfile:
    """Over-coupled device used for spontaneous emission"""
    return DeviceProfile(gamma_mhz=100.0, g_ghz=6.81, kappa_r_ghz=240.0, kappa_l_ghz=89.0)


class DeviceProfiles(BaseModel):
    model_config = ConfigDict(extra="forbid")

    projector: DeviceProfile = Field(default_factory=projector_profile)
    emission: DeviceProfile = Field(default_factory=emission_profile)


class LossConvention(str, Enum):
    LOST = "lost"
    TRANSMITTED = "transmitted"


class LossConfig(BaseModel):
    """Per-arm losses; the convention says whether the numbers are lost or kept"""
    model_config = ConfigDict(extra="forbid")

    link: float = Field(0.9, ge=0, le=1, description="Link loss per traveling photon")
    insertion: float = Field(0.5, ge=0, le=1, description="Device insertion loss per node")
    convention: LossConvention = Field(LossConvention.LOST)

    def loss_fraction(self, value: float) -> float:
        return value if self.convention == LossConvention.LOST else 1.0 - value


class ProtocolKind(str, Enum):
    A = "A"
    B = "B"
    C = "C"


class ProtocolConfig(BaseModel):
    """Protocol selection and fixed parameters (overridden by swept axes)"""
    model_config = ConfigDict(extra="forbid")

    kind: ProtocolKind = Field(..., description="A (emission), B (sender-receiver), C (midpoint)")
    device: Optional[str] = Field(None, description="Device profile; defaults by protocol kind")
    input_source: PhotonSource = Field(PhotonSource.SINGLE_PHOTON)
    detector: DetectorKind = Field(DetectorKind.CLICK)
    reflection: ReflectionVariant = Field(ReflectionVariant.AMPLITUDE)
    alpha: float = Field(0.1, ge=0, le=1, description="Protocol A bright-state population")
    wcs_alpha: float = Field(0.1, ge=0, description="Weak coherent amplitude (Protocol C)")
    delta_la_ghz: float = Field(0.0, description="Laser-emitter detuning nu - omega_a")
    spin: SpinChannelParams = Field(default_factory=SpinChannelParams)

    @field_validator("device")
    @classmethod
    def known_device(cls, value):
        if value is not None and value not in ("projector", "emission"):
            raise ValueError(f"unknown device profile '{value}'")
        return value

    @property
    def device_name(self) -> str:
        if self.device:
            return self.device
        return "emission" if self.kind == ProtocolKind.A else "projector"


class NumericsConfig(BaseModel):
    """Truncation and tolerance overrides"""
    model_config = ConfigDict(extra="forbid")

    fock_dim: int = Field(default_factory=lambda: settings.FOCK_DIM, ge=2)
    wcs_fock_dim: int = Field(default_factory=lambda: settings.WCS_FOCK_DIM, ge=4)
    incoherent_fock_dim: int = Field(default_factory=lambda: settings.INCOHERENT_FOCK_DIM, ge=2)
    leakage_threshold: float = Field(default_factory=lambda: settings.LEAKAGE_THRESHOLD, gt=0)
    coefficient_tol: float = Field(default_factory=lambda: settings.COEFFICIENT_TOL, gt=0)

    def apply(self) -> None:
        """Push the overrides into the process settings"""
        settings.LEAKAGE_THRESHOLD = self.leakage_threshold
        settings.COEFFICIENT_TOL = self.coefficient_tol


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    path: Optional[str] = Field(None, description="Result file; stdout when omitted")
    format: OutputFormat = Field(OutputFormat.CSV)


SWEEPABLE = ("alpha", "wcs_alpha", "delta_la", "delta_ac", "g", "kappa", "link_loss", "insertion_loss")


class Config(BaseModel):
    """One run document"""
    model_config = ConfigDict(extra="forbid")

    system: DeviceProfiles = Field(default_factory=DeviceProfiles)
    protocol: ProtocolConfig
    losses: LossConfig = Field(default_factory=LossConfig)
    sweep: SweepGrid = Field(default_factory=SweepGrid)
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @field_validator("sweep")
    @classmethod
    def known_axes(cls, grid: SweepGrid):
        unknown = [n for n in grid.names if n not in SWEEPABLE]
        if unknown:
            raise ValueError(f"unknown sweep parameters {unknown}; choose from {list(SWEEPABLE)}")
        return grid

    @property
    def device(self) -> DeviceProfile:
        return getattr(self.system, self.protocol.device_name)

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    @classmethod
    def parse(cls, document: Union[dict, str]) -> "Config":
        """
        Validate a run document

        Args:
            document: parsed JSON object or JSON text

        Returns:
            Config

        Raises:
            ConfigError: with the dotted field path of every problem
        """
        try:
            if isinstance(document, str):
                return cls.model_validate_json(document)
            return cls.model_validate(document)
        except ValidationError as exc:
            problems: List[str] = []
            for error in exc.errors():
                path = ".".join(str(part) for part in error["loc"]) or "<root>"
                problems.append(f"{path}: {error['msg']}")
            raise ConfigError("invalid config:\n  " + "\n  ".join(problems)) from exc

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Config":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config '{path}': {exc}") from exc
        return cls.parse(text)
