"""
Cavity-QED figures of merit, spin-conditioned response coefficients and the
channel parameters derived from them
"""
import math
from enum import Enum
from typing import Tuple

import numpy as np

from rebsim.config import settings
from rebsim.exceptions import ParameterError
from rebsim.schemas.channel_params import (
    EmissionChannelParams,
    ReflectionCoefficients,
    ScatterChannelParams,
)
from rebsim.schemas.system import CoupledSystem, OperatingPoint


class LinewidthMode(str, Enum):
    """Emitter linewidth used in the cooperativity"""
    BARE = "bare"
    DEPHASED = "dephased"


def total_linewidth(sys: CoupledSystem) -> float:
    """Γ = γ + γ*"""
    return sys.emitter.Gamma


def quality_factor(sys: CoupledSystem) -> float:
    if sys.cavity.kappa <= 0.0:
        raise ParameterError("quality factor needs kappa > 0")
    return sys.cavity.Q


def cooperativity(sys: CoupledSystem, linewidth_mode: LinewidthMode = LinewidthMode.BARE) -> float:
    """
    C = 4g²/(κγ), or 4g²/(κ(γ+γ*)) in dephased mode

    Args:
        sys: coupled emitter-cavity system
        linewidth_mode: bare or dephased emitter linewidth

    Returns:
        Cooperativity
    """
    kappa = sys.cavity.kappa
    width = sys.emitter.gamma
    if LinewidthMode(linewidth_mode) == LinewidthMode.DEPHASED:
        width = sys.emitter.Gamma
    if kappa <= 0.0 or width <= 0.0:
        raise ParameterError("cooperativity needs kappa > 0 and gamma > 0")
    return 4.0 * sys.g ** 2 / (kappa * width)


def purcell_factor(sys: CoupledSystem) -> float:
    """F_p = 4g²/(κγ_r)"""
    kappa = sys.cavity.kappa
    if kappa <= 0.0 or sys.emitter.gamma_r <= 0.0:
        raise ParameterError("Purcell factor needs kappa > 0 and gamma_r > 0")
    return 4.0 * sys.g ** 2 / (kappa * sys.emitter.gamma_r)


def purcell_from_qv(Q: float, V: float, n: float) -> float:
    """
    F_p = (3/4π²)(Q/V)(λ/n)³ with V already in units of λ³

    Args:
        Q: quality factor
        V: mode volume in cubic wavelengths
        n: refractive index

    Returns:
        Purcell factor
    """
    if V <= 0.0 or n <= 0.0:
        raise ParameterError("mode volume and refractive index must be positive")
    return 3.0 / (4.0 * math.pi ** 2) * (Q / V) / n ** 3


def mode_volume_for(sys: CoupledSystem, n: float) -> float:
    """Mode volume (in λ³) that gives the system's Purcell factor at its Q"""
    fp = purcell_factor(sys)
    if fp <= 0.0:
        raise ParameterError("no finite mode volume for a zero Purcell factor")
    return 3.0 / (4.0 * math.pi ** 2) * quality_factor(sys) / (fp * n ** 3)


def outcoupling_efficiency_strong(sys: CoupledSystem) -> float:
    """(κ_r/κ)·(κ/(κ+γ)); stated for a cavity without transmission port"""
    kappa = sys.cavity.kappa
    if kappa <= 0.0:
        raise ParameterError("outcoupling efficiency needs kappa > 0")
    return (sys.cavity.kappa_r / kappa) * (kappa / (kappa + sys.emitter.gamma))


def cavity_modified_linewidth(sys: CoupledSystem) -> float:
    """Γ′ = Γ + F_p γ_r"""
    return sys.emitter.Gamma + purcell_factor(sys) * sys.emitter.gamma_r


def modified_debye_waller(sys: CoupledSystem) -> float:
    """DW′ = (F_p+1)DW / (F_p·DW + 1)"""
    fp = purcell_factor(sys)
    dw = sys.emitter.DW
    return (fp + 1.0) * dw / (fp * dw + 1.0)


def modified_quantum_efficiency(sys: CoupledSystem) -> float:
    """QE′ = QE(F_p·DW + 1) / (1 + F_p·QE·DW)"""
    fp = purcell_factor(sys)
    qe, dw = sys.emitter.QE, sys.emitter.DW
    return qe * (fp * dw + 1.0) / (1.0 + fp * qe * dw)


def collection_efficiency(sys: CoupledSystem) -> float:
    """η = (κ_r/κ)·F_p/(F_p+1)"""
    fp = purcell_factor(sys)
    return (sys.cavity.kappa_r / sys.cavity.kappa) * fp / (fp + 1.0)


def transition_frequency(sys: CoupledSystem, spin_state: int) -> float:
    """Bright state (1) couples at ω_a, dark state (0) at ω_a + δ₀₁"""
    if spin_state not in (0, 1):
        raise ParameterError(f"spin state must be 0 or 1, got {spin_state}")
    return sys.emitter.omega_a + (sys.emitter.delta_01 if spin_state == 0 else 0.0)


def _denominator(sys: CoupledSystem, op_point: OperatingPoint, spin_state: int) -> complex:
    nu = op_point.nu
    cavity = sys.cavity
    if cavity.kappa <= 0.0:
        raise ParameterError("response coefficients need kappa > 0")
    d = 1j * (cavity.omega_c - nu) + cavity.kappa / 2.0
    if sys.g > 0.0:
        emitter = sys.emitter
        chi = 1j * (transition_frequency(sys, spin_state) - nu) + emitter.gamma / 2.0 + emitter.gamma_star
        if chi == 0:
            raise ParameterError("emitter susceptibility diverges (zero linewidth on resonance)")
        d += sys.g ** 2 / chi
    return d


def response_coefficients(
    sys: CoupledSystem,
    op_point: OperatingPoint,
    spin_state: int,
) -> Tuple[complex, complex, complex]:
    """
    Steady-state reflection, transmission and loss amplitudes

    r = 1 − κ_r/D, t = √(κ_r κ_t)/D with
    D = i(ω_c − ν) + κ/2 + g²/(i(ω_k − ν) + γ/2 + γ*).
    |l| completes the magnitude; its phase follows the loss-port term 1/D.

    Args:
        sys: coupled system
        op_point: laser frequency
        spin_state: 0 (dark) or 1 (bright)

    Returns:
        (r, t, l)
    """
    d = _denominator(sys, op_point, spin_state)
    cavity = sys.cavity
    r = 1.0 - cavity.kappa_r / d
    t = math.sqrt(cavity.kappa_r * cavity.kappa_t) / d
    remainder = 1.0 - abs(r) ** 2 - abs(t) ** 2
    if remainder < -settings.COEFFICIENT_TOL:
        raise ParameterError(f"|r|^2 + |t|^2 = {1.0 - remainder} exceeds 1")
    l_mag = math.sqrt(max(remainder, 0.0))
    l = l_mag * np.exp(-1j * np.angle(d))
    return complex(r), complex(t), complex(l)


def reflection_coefficients(sys: CoupledSystem, op_point: OperatingPoint) -> ReflectionCoefficients:
    """Both spin states bundled for the reflection channel"""
    dark = response_coefficients(sys, op_point, 0)
    bright = response_coefficients(sys, op_point, 1)
    return ReflectionCoefficients(
        r=(dark[0], bright[0]),
        t=(dark[1], bright[1]),
        l=(dark[2], bright[2]),
    )


def empty_cavity_reflection(sys: CoupledSystem, op_point: OperatingPoint) -> complex:
    """Bare-cavity Lorentzian ((κ_t + κ_l − κ_r)/2 + iΔ) / (κ/2 + iΔ), Δ = ω_c − ν"""
    cavity = sys.cavity
    delta = cavity.omega_c - op_point.nu
    numerator = (cavity.kappa_t + cavity.kappa_l - cavity.kappa_r) / 2.0 + 1j * delta
    return complex(numerator / (cavity.kappa / 2.0 + 1j * delta))


def emission_channel_probabilities(sys: CoupledSystem) -> EmissionChannelParams:
    """
    Bright-state branch probabilities of the optical π-pulse emission

    The dark-state branch (no photon, weight 1) is built into the channel, so
    the returned numbers do not depend on the spin state.

    Returns:
        EmissionChannelParams with p_2ph = 0 and p_loss the remainder
    """
    emitter = sys.emitter
    c = cooperativity(sys, LinewidthMode.DEPHASED)
    fp = purcell_factor(sys)
    enhanced = fp * emitter.gamma_r
    common = (sys.cavity.kappa_r / sys.cavity.kappa) * (c / (c + 1.0))
    denominator = emitter.Gamma + enhanced
    p_coh = common * enhanced / denominator
    p_incoh = common * (emitter.gamma_star + emitter.sigma_omega) / denominator
    remainder = 1.0 - p_coh - p_incoh
    if remainder < -settings.COEFFICIENT_TOL:
        raise ParameterError(f"emission probabilities exceed 1 (remainder {remainder})")
    return EmissionChannelParams.from_coherent(p_coh, p_incoh)


def scattering_channel_amplitudes(sys: CoupledSystem, alpha_in: complex) -> ScatterChannelParams:
    """
    Coherent-scattering amplitudes for a total scattered amplitude ``alpha_in``

    α = η·α_tot, α_L = ((1−η)/η)·α and
    |β|² = [γ*/(Γ′−γ*) + (1 − QE′DW′)/(QE′DW′)]·|α_tot|².
    """
    eta = collection_efficiency(sys)
    if eta <= 0.0:
        if alpha_in != 0:
            raise ParameterError("collection efficiency is zero for a nonzero scattered amplitude")
        return ScatterChannelParams(alpha=0j, alpha_L=0j, beta_sq=0.0)
    alpha = eta * alpha_in
    alpha_l = (1.0 - eta) / eta * alpha
    gamma_star = sys.emitter.gamma_star
    efficiency = modified_quantum_efficiency(sys) * modified_debye_waller(sys)
    if efficiency <= 0.0:
        raise ParameterError("QE'·DW' must be positive")
    beta_sq = (
        gamma_star / (cavity_modified_linewidth(sys) - gamma_star)
        + (1.0 - efficiency) / efficiency
    ) * abs(alpha_in) ** 2
    return ScatterChannelParams(alpha=alpha, alpha_L=alpha_l, beta_sq=max(beta_sq, 0.0))
