"""
Derived device quantities for the ``params`` command
"""
import cmath
from typing import Dict, List, Tuple

from rebsim.exceptions import ParameterError
from rebsim.schemas.config import Config
from rebsim.schemas.system import CoupledSystem, OperatingPoint
from rebsim.services.cavity import (
    LinewidthMode,
    cavity_modified_linewidth,
    collection_efficiency,
    cooperativity,
    emission_channel_probabilities,
    modified_debye_waller,
    modified_quantum_efficiency,
    outcoupling_efficiency_strong,
    purcell_factor,
    quality_factor,
    response_coefficients,
    total_linewidth,
)


def _complex(value: complex) -> Dict[str, float]:
    return {
        "re": value.real,
        "im": value.imag,
        "abs": abs(value),
        "phase": cmath.phase(value),
    }


def _guarded(func, system: CoupledSystem):
    try:
        return func(system)
    except ParameterError:
        return float("nan")


def device_report(system: CoupledSystem, delta_la: float) -> Dict[str, object]:
    """
    Figures of merit and per-spin response of one device

    Args:
        system: coupled emitter-cavity system (GHz)
        delta_la: laser detuning ν − ω_a of the operating point (GHz)

    Returns:
        Nested dict of floats; quantities undefined for the device are NaN
    """
    report: Dict[str, object] = {
        "g_ghz": system.g,
        "kappa_ghz": system.cavity.kappa,
        "delta_ac_ghz": system.delta_ac,
        "Q": _guarded(quality_factor, system),
        "C_bare": _guarded(lambda s: cooperativity(s, LinewidthMode.BARE), system),
        "C_dephased": _guarded(lambda s: cooperativity(s, LinewidthMode.DEPHASED), system),
        "F_p": _guarded(purcell_factor, system),
        "eta_out": _guarded(outcoupling_efficiency_strong, system),
        "eta": _guarded(collection_efficiency, system),
        "Gamma_ghz": total_linewidth(system),
        "Gamma_prime_ghz": _guarded(cavity_modified_linewidth, system),
        "DW_prime": _guarded(modified_debye_waller, system),
        "QE_prime": _guarded(modified_quantum_efficiency, system),
    }
    try:
        emission = emission_channel_probabilities(system)
        report["emission"] = {
            "p_coh": emission.p_coh,
            "p_incoh": emission.p_incoh,
            "p_loss": emission.p_loss,
        }
    except ParameterError:
        report["emission"] = None

    op_point = OperatingPoint.from_laser_detuning(system, delta_la)
    response = {}
    for k, label in ((0, "dark"), (1, "bright")):
        try:
            r, t, l = response_coefficients(system, op_point, k)
            response[label] = {"r": _complex(r), "t": _complex(t), "l": _complex(l)}
        except ParameterError:
            response[label] = None
    report["delta_la_ghz"] = delta_la
    report["response"] = response
    return report


def derived_parameters(config: Config) -> Dict[str, Dict[str, object]]:
    """Report for both device profiles at the configured operating point"""
    delta_la = config.protocol.delta_la_ghz
    return {
        "projector": device_report(config.system.projector.to_system(), delta_la),
        "emission": device_report(config.system.emission.to_system(), delta_la),
    }


def flatten(report: Dict[str, object], prefix: str = "") -> List[Tuple[str, object]]:
    """Dotted (key, value) pairs for tabular output"""
    items: List[Tuple[str, object]] = []
    for key, value in report.items():
        name = f"{prefix}.{key}" if prefix else str(key)
        if isinstance(value, dict):
            items += flatten(value, name)
        else:
            items.append((name, value))
    return items
