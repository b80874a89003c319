"""
Pydantic schemas for the emitter-cavity system

All frequencies and rates are in GHz (ordinary, not angular) once parsed.
"""
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class EmitterParams(BaseModel):
    """Optical transition of the spin-photon interface"""
    model_config = ConfigDict(frozen=True)

    omega_a: float = Field(..., description="Bright-state transition frequency")
    gamma_r: float = Field(..., ge=0.0, description="Radiative rate into the zero-phonon line")
    gamma: float = Field(..., ge=0.0, description="Total decay rate")
    gamma_star: float = Field(0.0, ge=0.0, description="Pure dephasing rate")
    sigma_omega: float = Field(0.0, ge=0.0, description="Spectral diffusion std (stored, not averaged)")
    DW: float = Field(1.0, ge=0.0, le=1.0, description="Debye-Waller factor")
    QE: float = Field(1.0, ge=0.0, le=1.0, description="Quantum efficiency")
    delta_01: float = Field(..., description="Dark-state transition offset from omega_a")

    @model_validator(mode="after")
    def check_rates(self):
        if self.gamma < self.gamma_r:
            raise ValueError(f"gamma ({self.gamma}) must be >= gamma_r ({self.gamma_r})")
        return self

    @property
    def Gamma(self) -> float:
        """Total homogeneous linewidth γ + γ*"""
        return self.gamma + self.gamma_star


class CavityParams(BaseModel):
    """Cavity mode with its three decay ports"""
    model_config = ConfigDict(frozen=True)

    omega_c: float = Field(..., description="Cavity resonance frequency")
    kappa_r: float = Field(..., ge=0.0, description="Decay into the reflection port")
    kappa_t: float = Field(0.0, ge=0.0, description="Decay into the transmission port")
    kappa_l: float = Field(0.0, ge=0.0, description="Decay into the loss port")

    @property
    def kappa(self) -> float:
        return self.kappa_r + self.kappa_t + self.kappa_l

    @property
    def Q(self) -> float:
        return self.omega_c / self.kappa


class CoupledSystem(BaseModel):
    """Emitter coupled to a cavity with vacuum Rabi frequency g"""
    model_config = ConfigDict(frozen=True)

    emitter: EmitterParams
    cavity: CavityParams
    g: float = Field(..., ge=0.0, description="Coupling rate")

    @property
    def delta_ac(self) -> float:
        return self.emitter.omega_a - self.cavity.omega_c

    def with_cavity_detuning(self, delta_ac: float) -> "CoupledSystem":
        """Move the cavity so that ω_a − ω_c = delta_ac"""
        cavity = self.cavity.model_copy(update={"omega_c": self.emitter.omega_a - delta_ac})
        return self.model_copy(update={"cavity": cavity})

    def scaled(self, g: Optional[float] = None, kappa: Optional[float] = None) -> "CoupledSystem":
        """
        Replace g and/or the total κ; the port ratios are kept

        Args:
            g: new coupling rate
            kappa: new total cavity decay rate

        Returns:
            Modified copy
        """
        update = {}
        if g is not None:
            update["g"] = g
        if kappa is not None:
            factor = kappa / self.cavity.kappa
            update["cavity"] = self.cavity.model_copy(
                update={
                    "kappa_r": self.cavity.kappa_r * factor,
                    "kappa_t": self.cavity.kappa_t * factor,
                    "kappa_l": self.cavity.kappa_l * factor,
                }
            )
        return self.model_copy(update=update)


class OperatingPoint(BaseModel):
    """Laser frequency ν"""
    model_config = ConfigDict(frozen=True)

    nu: float = Field(..., description="Laser frequency")

    @classmethod
    def from_laser_detuning(cls, system: CoupledSystem, delta_la: float) -> "OperatingPoint":
        """Δ_la = ν − ω_a"""
        return cls(nu=system.emitter.omega_a + delta_la)

    def delta_la(self, system: CoupledSystem) -> float:
        return self.nu - system.emitter.omega_a

    def delta_lc(self, system: CoupledSystem) -> float:
        return self.nu - system.cavity.omega_c
