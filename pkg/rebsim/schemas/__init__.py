"""
Pydantic schemas for parameters, run documents and results
"""
from rebsim.schemas.channel_params import (
    DetectorKind,
    EmissionChannelParams,
    PhotonSource,
    ReflectionCoefficients,
    ReflectionVariant,
    ScatterChannelParams,
    SpinChannelParams,
)
from rebsim.schemas.config import Config, DeviceProfile, ProtocolKind
from rebsim.schemas.sweep import ProtocolOutcome, SweepAxis, SweepGrid, SweepResult
from rebsim.schemas.system import CavityParams, CoupledSystem, EmitterParams, OperatingPoint

__all__ = [
    "DetectorKind",
    "EmissionChannelParams",
    "PhotonSource",
    "ReflectionCoefficients",
    "ReflectionVariant",
    "ScatterChannelParams",
    "SpinChannelParams",
    "Config",
    "DeviceProfile",
    "ProtocolKind",
    "ProtocolOutcome",
    "SweepAxis",
    "SweepGrid",
    "SweepResult",
    "CavityParams",
    "CoupledSystem",
    "EmitterParams",
    "OperatingPoint",
]
