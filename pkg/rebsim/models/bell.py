"""
Bell-state overlaps of the reduced spin state
"""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple

import numpy as np

from rebsim.exceptions import DimensionMismatchError, UndefinedFidelityError
from rebsim.models.named_state import NamedState, partial_trace


class BellState(str, Enum):
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"


_S = 1.0 / np.sqrt(2.0)

BELL_VECTORS: Dict[BellState, np.ndarray] = {
    BellState.PHI_PLUS: np.array([_S, 0, 0, _S], dtype=np.complex128),
    BellState.PHI_MINUS: np.array([_S, 0, 0, -_S], dtype=np.complex128),
    BellState.PSI_PLUS: np.array([0, _S, _S, 0], dtype=np.complex128),
    BellState.PSI_MINUS: np.array([0, _S, -_S, 0], dtype=np.complex128),
}


@dataclass(frozen=True)
class BellFidelities:
    phi_plus: float
    phi_minus: float
    psi_plus: float
    psi_minus: float

    def __getitem__(self, target: BellState) -> float:
        return getattr(self, BellState(target).name.lower())

    def best(self) -> Tuple[BellState, float]:
        return max(((b, self[b]) for b in BellState), key=lambda item: item[1])


def spin_density_matrix(state: NamedState, spins: Tuple[str, str]) -> np.ndarray:
    """Normalized 4x4 density matrix of ``spins`` with every other mode traced out"""
    for name in spins:
        if state.label(name).dim != 2:
            raise DimensionMismatchError(f"mode '{name}' is not a qubit")
    others = [n for n in state.names if n not in spins]
    reduced = partial_trace(state, others).reorder(spins)
    trace = reduced.trace
    if trace <= 0.0:
        raise UndefinedFidelityError("fidelity is undefined for a zero-trace state")
    return reduced.matrix / trace


def bell_fidelity(state: NamedState, spins: Tuple[str, str]) -> BellFidelities:
    """
    Overlap of the normalized spin state with each Bell state

    Args:
        state: state holding both spins and any number of other modes
        spins: (first, second) spin names; the first is the left tensor factor

    Returns:
        BellFidelities with one value per Bell state
    """
    rho = spin_density_matrix(state, spins)
    values = {
        b: float(np.real(np.vdot(vec, rho @ vec))) for b, vec in BELL_VECTORS.items()
    }
    return BellFidelities(
        phi_plus=values[BellState.PHI_PLUS],
        phi_minus=values[BellState.PHI_MINUS],
        psi_plus=values[BellState.PSI_PLUS],
        psi_minus=values[BellState.PSI_MINUS],
    )
