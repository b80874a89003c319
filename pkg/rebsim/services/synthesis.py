"""
Beamsplitter decomposition of the reflect/transmit/loss response

A photon entering the reflect port is routed by BS1 (reflect ↔ loss) and BS2
(reflect ↔ transmit), then each output picks up its phase. Port order of the
resulting Fock-space unitaries is (reflect, transmit, loss) for the
three-port form and (reflect, loss) for the two-port form.
"""
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Tuple

import numpy as np
from scipy.linalg import expm

from rebsim.config import settings
from rebsim.exceptions import ParameterError
from rebsim.models.operators import beamsplitter, create, destroy, phase_shift


@lru_cache(maxsize=None)
def _ladder(dim: int, position: int, modes: int) -> Tuple[np.ndarray, np.ndarray]:
    """(a, a†) for mode ``position`` of ``modes`` equal-dimension modes"""
    factors_a = [np.eye(dim)] * modes
    factors_c = [np.eye(dim)] * modes
    factors_a[position] = destroy(dim)
    factors_c[position] = create(dim)
    a, c = factors_a[0], factors_c[0]
    for fa, fc in zip(factors_a[1:], factors_c[1:]):
        a = np.kron(a, fa)
        c = np.kron(c, fc)
    return a, c


def _mixer(theta: float, i: int, j: int, dim: int, modes: int) -> np.ndarray:
    """exp[θ(a_i a_j† − a_i† a_j)] on ``modes`` modes"""
    a_i, c_i = _ladder(dim, i, modes)
    a_j, c_j = _ladder(dim, j, modes)
    return expm(theta * (a_i @ c_j - c_i @ a_j))


def _phases(phis: Tuple[float, ...], dim: int) -> np.ndarray:
    return reduce(np.kron, (phase_shift(phi, dim) for phi in phis))


def loss_angle(L: float) -> float:
    """θ with sin²θ = L, written as arctan(√L/√(1−L))"""
    if L < -settings.COEFFICIENT_TOL or L > 1.0 + settings.COEFFICIENT_TOL:
        raise ParameterError(f"loss fraction must be in [0, 1], got {L}")
    L = min(max(L, 0.0), 1.0)
    return float(np.arctan2(np.sqrt(L), np.sqrt(1.0 - L)))


@dataclass(frozen=True)
class TwoPortSynthesis:
    theta1: float
    phi_r: float
    phi_l: float

    def unitary(self, dim: int) -> np.ndarray:
        """Fock-space unitary on (reflect, loss), each truncated to ``dim``"""
        mix = beamsplitter(self.theta1, dim, dim)
        return _phases((self.phi_r, self.phi_l), dim) @ mix

    def single_photon_amplitudes(self) -> Tuple[complex, complex]:
        u = self.unitary(2)
        column = u[:, 2]  # |1_r 0_l⟩
        return complex(column[2]), complex(column[1])


@dataclass(frozen=True)
class ThreePortSynthesis:
    theta1: float
    theta2: float
    phi_r: float
    phi_t: float
    phi_l: float

    def unitary(self, dim: int) -> np.ndarray:
        """Fock-space unitary on (reflect, transmit, loss), each truncated to ``dim``"""
        return _three_port_unitary(self, dim)

    def single_photon_amplitudes(self) -> Tuple[complex, complex, complex]:
        u = self.unitary(2)
        column = u[:, 4]  # |1_r 0_t 0_l⟩
        return complex(column[4]), complex(column[2]), complex(column[1])


@lru_cache(maxsize=1024)
def _three_port_unitary(synthesis: ThreePortSynthesis, dim: int) -> np.ndarray:
    bs1 = _mixer(synthesis.theta1, 0, 2, dim, 3)
    bs2 = _mixer(synthesis.theta2, 0, 1, dim, 3)
    phases = _phases((synthesis.phi_r, synthesis.phi_t, synthesis.phi_l), dim)
    unitary = phases @ bs2 @ bs1
    unitary.setflags(write=False)
    return unitary


def synthesize_two_port(r: complex, l_mag: float, l_phase: float = 0.0) -> TwoPortSynthesis:
    """
    Reflect/loss beamsplitter reproducing amplitude ``r`` and loss |l|

    Args:
        r: complex reflection amplitude
        l_mag: loss amplitude magnitude, L = l_mag²
        l_phase: phase given to the loss output

    Returns:
        TwoPortSynthesis with θ₁ = arctan(√L/√(1−L))
    """
    L = l_mag ** 2
    total = abs(r) ** 2 + L
    if total > 1.0 + settings.COEFFICIENT_TOL:
        raise ParameterError(f"|r|^2 + L = {total} exceeds 1")
    if total < 1.0 - settings.COEFFICIENT_TOL:
        raise ParameterError(
            f"|r|^2 + L = {total} < 1: a transmitted part remains, use the three-port synthesis"
        )
    return TwoPortSynthesis(theta1=loss_angle(L), phi_r=float(np.angle(r)), phi_l=float(l_phase))


def synthesize_three_port(r: complex, t: complex, l: complex) -> ThreePortSynthesis:
    """
    Cascade BS1(θ₁) then BS2(θ₂) plus output phases reproducing (r, t, l)

    θ₂ = arctan(|t′|/|r′|) with r′, t′ the amplitudes renormalized over the
    non-lost part.
    """
    total = abs(r) ** 2 + abs(t) ** 2 + abs(l) ** 2
    if abs(total - 1.0) > settings.COEFFICIENT_TOL:
        raise ParameterError(f"|r|^2 + |t|^2 + |l|^2 = {total}, expected 1")
    kept = np.sqrt(abs(r) ** 2 + abs(t) ** 2)
    if kept > 0.0:
        r_n, t_n = abs(r) / kept, abs(t) / kept
    else:
        r_n, t_n = 1.0, 0.0
    return ThreePortSynthesis(
        theta1=loss_angle(abs(l) ** 2),
        theta2=float(np.arctan2(t_n, r_n)),
        phi_r=float(np.angle(r)),
        phi_t=float(np.angle(t)),
        phi_l=float(np.angle(l)),
    )
