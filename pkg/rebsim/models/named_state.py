"""
Named-mode density matrices and operators

The state is kept non-normalized: its trace is the probability that every
projection applied so far succeeded.
"""
import logging
import math
import warnings
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from rebsim.config import settings
from rebsim.exceptions import (
    CompositionError,
    DimensionMismatchError,
    ParameterError,
    TruncationWarning,
)
from rebsim.models.base import ModeKind, ModeLabel, NamedObject, permute_square

logger = logging.getLogger(__name__)


class NamedOperator(NamedObject):
    """Operator acting on the named modes it carries; unitarity is not assumed"""
    __slots__ = ()

    @classmethod
    def identity(cls, labels: Iterable[ModeLabel]) -> "NamedOperator":
        labels = tuple(labels)
        return cls(np.eye(math.prod(l.dim for l in labels), dtype=complex), labels)

    def dag(self) -> "NamedOperator":
        return NamedOperator(self.matrix.conj().T, self.labels)

    def reorder(self, names: Sequence[str]) -> "NamedOperator":
        matrix, labels = self._reordered_matrix(names)
        return NamedOperator(matrix, labels)

    def expand(self, labels: Sequence[ModeLabel]) -> "NamedOperator":
        """Pad with identities up to ``labels`` and return the operator in that mode order"""
        labels = tuple(labels)
        known = {l.name: l for l in labels}
        for label in self.labels:
            if label.name not in known:
                raise CompositionError(f"mode '{label.name}' missing from target labels")
            if known[label.name].dim != label.dim:
                raise DimensionMismatchError(
                    f"mode '{label.name}' has dim {label.dim}, target expects {known[label.name].dim}"
                )
        extra = [l for l in labels if not self.has_mode(l.name)]
        padded = tensor_product(self, NamedOperator.identity(extra)) if extra else self
        return padded.reorder([l.name for l in labels])

    def __matmul__(self, other: "NamedOperator") -> "NamedOperator":
        labels = list(self.labels) + [l for l in other.labels if not self.has_mode(l.name)]
        left = self.expand(labels)
        right = other.expand(labels)
        return NamedOperator(left.matrix @ right.matrix, labels)

    def is_unitary(self, tol: float = 1e-10) -> bool:
        product = self.matrix.conj().T @ self.matrix
        return bool(np.allclose(product, np.eye(self.size), atol=tol))


class NamedState(NamedObject):
    """Non-normalized density matrix over named modes"""
    __slots__ = ()

    @classmethod
    def vacuum(cls) -> "NamedState":
        """The empty composite (no modes, trace 1)"""
        return cls(np.ones((1, 1), dtype=complex), ())

    @classmethod
    def from_ket(cls, ket, labels: Iterable[ModeLabel]) -> "NamedState":
        ket = np.asarray(ket, dtype=complex).reshape(-1)
        return cls(np.outer(ket, ket.conj()), labels)

    @classmethod
    def basis(cls, labels: Iterable[ModeLabel], occupation: Sequence[int]) -> "NamedState":
        """Pure product state with the given level in each mode"""
        labels = tuple(labels)
        if len(occupation) != len(labels):
            raise ParameterError("one occupation per mode is required")
        ket = np.zeros(math.prod(l.dim for l in labels), dtype=complex)
        ket[np.ravel_multi_index(tuple(occupation), tuple(l.dim for l in labels))] = 1.0
        return cls.from_ket(ket, labels)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def reorder(self, names: Sequence[str]) -> "NamedState":
        matrix, labels = self._reordered_matrix(names)
        return NamedState(matrix, labels)

    def scaled(self, factor: float) -> "NamedState":
        return NamedState(self.matrix * factor, self.labels)

    def normalized(self) -> "NamedState":
        return self.scaled(1.0 / self.trace)

    def __add__(self, other: "NamedState") -> "NamedState":
        if sorted(self.names) != sorted(other.names):
            raise CompositionError(f"cannot add states over {self.names} and {other.names}")
        other = other.reorder(self.names)
        if other.dims != self.dims:
            raise DimensionMismatchError("mode dimensions differ between summed states")
        return NamedState(self.matrix + other.matrix, self.labels)

    def mode_populations(self, name: str) -> np.ndarray:
        """Diagonal of the reduced state of one mode (not normalized)"""
        i = self.index(name)
        diagonal = np.real(np.diag(self.matrix)).reshape(self.dims)
        others = tuple(j for j in range(len(self.dims)) if j != i)
        return diagonal.sum(axis=others) if others else diagonal

    def validate(
        self,
        hermitian_tol: Optional[float] = None,
        eigen_tol: Optional[float] = None,
        trace_tol: Optional[float] = None,
    ) -> None:
        """Check Hermiticity, positivity and 0 <= trace <= 1; raises ParameterError"""
        hermitian_tol = settings.HERMITIAN_TOL if hermitian_tol is None else hermitian_tol
        eigen_tol = settings.EIGEN_TOL if eigen_tol is None else eigen_tol
        trace_tol = settings.TRACE_TOL if trace_tol is None else trace_tol
        deviation = np.max(np.abs(self.matrix - self.matrix.conj().T)) if self.size else 0.0
        if deviation > hermitian_tol:
            raise ParameterError(f"state is not Hermitian (deviation {deviation:.3e})")
        smallest = float(np.min(np.linalg.eigvalsh(self.matrix)))
        if smallest < -eigen_tol:
            raise ParameterError(f"state has negative eigenvalue {smallest:.3e}")
        trace = self.trace
        if trace < -trace_tol or trace > 1.0 + trace_tol:
            raise ParameterError(f"state trace {trace} outside [0, 1]")


Named = Union[NamedState, NamedOperator]


def tensor_product(a: Named, b: Named) -> Named:
    """Kronecker composite; labels are concatenated a-then-b"""
    if type(a) is not type(b):
        raise CompositionError(f"cannot compose {type(a).__name__} with {type(b).__name__}")
    clash = set(a.names) & set(b.names)
    if clash:
        raise CompositionError(f"duplicate mode names {sorted(clash)}")
    return type(a)(np.kron(a.matrix, b.matrix), a.labels + b.labels)


def _target_axes(op: NamedOperator, state: NamedState) -> List[int]:
    axes = []
    for label in op.labels:
        i = state.index(label.name)
        if state.labels[i].dim != label.dim:
            raise DimensionMismatchError(
                f"mode '{label.name}' has dim {state.labels[i].dim} in state, {label.dim} in operator"
            )
        axes.append(i)
    return axes


def _contract(op_tensor: np.ndarray, tensor: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    k = len(axes)
    result = np.tensordot(op_tensor, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(result, list(range(k)), list(axes))


def _sandwich(op: NamedOperator, state: NamedState, axes: List[int]) -> np.ndarray:
    n = len(state.dims)
    if axes == list(range(n)):
        m = op.matrix
        return m @ state.matrix @ m.conj().T
    op_tensor = op.matrix.reshape(op.dims * 2)
    tensor = state.matrix.reshape(state.dims * 2)
    tensor = _contract(op_tensor, tensor, axes)
    tensor = _contract(op_tensor.conj(), tensor, [n + a for a in axes])
    return tensor.reshape(state.matrix.shape)


def apply(op: NamedOperator, state: NamedState) -> NamedState:
    """Return op ρ op†; modes the operator does not name are left untouched"""
    axes = _target_axes(op, state)
    return NamedState(_sandwich(op, state, axes), state.labels)


def apply_kraus(kraus: Sequence[NamedOperator], state: NamedState) -> NamedState:
    """Return Σ_k K_k ρ K_k†"""
    if not kraus:
        raise ParameterError("a channel needs at least one Kraus operator")
    total = None
    for op in kraus:
        term = _sandwich(op, state, _target_axes(op, state))
        total = term if total is None else total + term
    return NamedState(total, state.labels)


def partial_trace(state: NamedState, names: Iterable[str]) -> NamedState:
    """Trace out the named modes; remaining label order is preserved"""
    names = set(names)
    for name in names:
        state.index(name)
    if not names:
        return state
    dims = state.dims
    n = len(dims)
    keep = [i for i, l in enumerate(state.labels) if l.name not in names]
    drop = [i for i, l in enumerate(state.labels) if l.name in names]
    kept = math.prod(dims[i] for i in keep)
    dropped = math.prod(dims[i] for i in drop)
    tensor = state.matrix.reshape(dims * 2)
    tensor = tensor.transpose(keep + drop + [n + i for i in keep] + [n + i for i in drop])
    reduced = np.einsum("iaja->ij", tensor.reshape(kept, dropped, kept, dropped))
    return NamedState(reduced, [state.labels[i] for i in keep])


def success_probability(state: NamedState) -> float:
    return state.trace


def check_truncation(
    state: NamedState,
    threshold: Optional[float] = None,
    skip: Iterable[str] = (),
) -> List[str]:
    """
    Warn about bosonic modes whose top Fock level holds too much population

    Args:
        state: state to inspect (populations are taken relative to its trace)
        threshold: relative population above which a mode is reported
        skip: modes whose truncation already holds every reachable photon number

    Returns:
        Names of the offending modes
    """
    threshold = settings.LEAKAGE_THRESHOLD if threshold is None else threshold
    trace = state.trace
    if trace <= 0.0:
        return []
    skip = set(skip)
    offending = []
    for label in state.labels:
        if label.kind == ModeKind.SPIN or label.name in skip:
            continue
        top = state.mode_populations(label.name)[-1] / trace
        if top > threshold:
            offending.append(label.name)
            message = (
                f"mode '{label.name}' holds {top:.3e} in its top Fock level "
                f"(dim {label.dim}); increase the truncation"
            )
            logger.warning(message)
            warnings.warn(message, TruncationWarning, stacklevel=2)
    return offending


def embed(op: NamedOperator, labels: Sequence[ModeLabel]) -> np.ndarray:
    """Full matrix of ``op`` on ``labels`` (identity elsewhere)"""
    return op.expand(labels).matrix


__all__ = [
    "NamedOperator",
    "NamedState",
    "tensor_product",
    "apply",
    "apply_kraus",
    "partial_trace",
    "success_probability",
    "check_truncation",
    "embed",
    "permute_square",
]
