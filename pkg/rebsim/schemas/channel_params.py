"""
Pydantic schemas for channel parameters
"""
from enum import Enum
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from rebsim.config import settings


class DetectorKind(str, Enum):
    """Threshold detector or number-resolving single-photon projector"""
    CLICK = "click"
    SINGLE_PHOTON = "single_photon"


class ReflectionVariant(str, Enum):
    """Two-port phase reflection or three-port amplitude reflection"""
    PHASE = "phase"
    AMPLITUDE = "amplitude"


class PhotonSource(str, Enum):
    SINGLE_PHOTON = "single_photon"
    WCS = "wcs"


def _as_complex(value) -> complex:
    if isinstance(value, dict):
        return complex(value.get("re", 0.0), value.get("im", 0.0))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(value[0], value[1])
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


class SpinChannelParams(BaseModel):
    """Spin preparation and gate fidelities"""
    model_config = ConfigDict(frozen=True)

    F_state: float = Field(1.0, ge=0.0, le=1.0, description="State preparation fidelity")
    F1: float = Field(1.0, ge=0.0, le=1.0, description="Single-qubit gate fidelity")
    F2: float = Field(1.0, ge=0.0, le=1.0, description="Two-qubit gate fidelity")


class EmissionChannelParams(BaseModel):
    """Branch probabilities of the bright-state optical π-pulse emission"""
    model_config = ConfigDict(frozen=True)

    p_coh: float = Field(..., ge=0.0, description="Coherent photon into the collected mode")
    p_incoh: float = Field(0.0, ge=0.0, description="Dephased photon into the incoherent mode")
    p_2ph: float = Field(0.0, ge=0.0, description="Two-photon emission")
    p_loss: float = Field(0.0, ge=0.0, description="Photon lost")

    @model_validator(mode="after")
    def check_normalized(self):
        total = self.p_coh + self.p_incoh + self.p_2ph + self.p_loss
        if abs(total - 1.0) > settings.COEFFICIENT_TOL:
            raise ValueError(f"emission probabilities sum to {total}, expected 1")
        return self

    @classmethod
    def from_coherent(cls, p_coh: float, p_incoh: float = 0.0) -> "EmissionChannelParams":
        """Loss takes the remainder"""
        return cls(p_coh=p_coh, p_incoh=p_incoh, p_loss=max(0.0, 1.0 - p_coh - p_incoh))


class ScatterChannelParams(BaseModel):
    """Coherent scattering amplitudes"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    alpha: complex = Field(0j, description="Collected coherent amplitude")
    alpha_L: complex = Field(0j, description="Amplitude scattered into the loss mode")
    beta_sq: float = Field(0.0, ge=0.0, description="Mean incoherent photon number")

    @field_validator("alpha", "alpha_L", mode="before")
    @classmethod
    def coerce_complex(cls, value):
        return _as_complex(value)


class ReflectionCoefficients(BaseModel):
    """Per-spin-state reflect/transmit/loss amplitudes, index 0 = dark, 1 = bright"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    r: Tuple[complex, complex] = Field(..., description="Reflection amplitudes (r_0, r_1)")
    t: Tuple[complex, complex] = Field((0j, 0j), description="Transmission amplitudes (t_0, t_1)")
    l: Tuple[complex, complex] = Field((0j, 0j), description="Loss amplitudes (l_0, l_1)")

    @field_validator("r", "t", "l", mode="before")
    @classmethod
    def coerce_pair(cls, value):
        return tuple(_as_complex(v) for v in value)

    @model_validator(mode="after")
    def check_unit_magnitude(self):
        for k in (0, 1):
            total = abs(self.r[k]) ** 2 + abs(self.t[k]) ** 2 + abs(self.l[k]) ** 2
            if abs(total - 1.0) > settings.COEFFICIENT_TOL:
                raise ValueError(
                    f"|r|^2 + |t|^2 + |l|^2 = {total} for spin state {k}, expected 1"
                )
        return self

    @classmethod
    def phase_only(cls, r0: complex, r1: complex) -> "ReflectionCoefficients":
        """No transmission; loss amplitudes complete each state's magnitude"""
        l0 = np.sqrt(max(0.0, 1.0 - abs(r0) ** 2))
        l1 = np.sqrt(max(0.0, 1.0 - abs(r1) ** 2))
        return cls(r=(r0, r1), l=(l0, l1))

    def state(self, k: int) -> Tuple[complex, complex, complex]:
        return self.r[k], self.t[k], self.l[k]

    def cache_key(self) -> Tuple[complex, ...]:
        return tuple(self.r) + tuple(self.t) + tuple(self.l)
