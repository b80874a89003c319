"""
Channel objects: completely positive, trace-non-increasing maps on NamedState

A channel names the modes it reads (``requires``), the modes it may create
(``declares``) and the modes it removes (``consumes``), so a pipeline can be
checked for use-before-declaration without running it.
"""
from abc import ABC, abstractmethod
from typing import Callable, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from rebsim.config import settings
from rebsim.exceptions import DimensionMismatchError, ParameterError
from rebsim.models.base import ModeLabel
from rebsim.models.named_state import (
    NamedOperator,
    NamedState,
    apply_kraus,
    partial_trace,
    tensor_product,
)


KrausFactory = Callable[[Tuple[ModeLabel, ...]], Sequence[NamedOperator]]


class Channel(ABC):
    """Base channel"""

    name: str = "channel"
    # sources are followed by a truncation check
    is_source: bool = False
    # declared modes whose truncation holds every reachable photon number
    exact_modes: FrozenSet[str] = frozenset()

    @property
    def requires(self) -> FrozenSet[str]:
        return frozenset()

    @property
    def declares(self) -> FrozenSet[str]:
        return frozenset()

    @property
    def consumes(self) -> FrozenSet[str]:
        return frozenset()

    @abstractmethod
    def apply(self, state: NamedState) -> NamedState:
        ...

    def __call__(self, state: NamedState) -> NamedState:
        return self.apply(state)

    def then(self, other: "Channel") -> "ChannelSequence":
        """This channel followed by ``other``"""
        left = self.channels if isinstance(self, ChannelSequence) else [self]
        right = other.channels if isinstance(other, ChannelSequence) else [other]
        return ChannelSequence(left + right)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class ChannelSequence(Channel):
    """Ordered composition; the first channel acts first"""

    def __init__(self, channels: Iterable[Channel], name: str = "sequence"):
        self.channels: List[Channel] = list(channels)
        self.name = name

    @property
    def requires(self) -> FrozenSet[str]:
        needed, available = set(), set()
        for channel in self.channels:
            needed |= set(channel.requires) - available
            available |= channel.declares
            available -= channel.consumes
        return frozenset(needed)

    @property
    def declares(self) -> FrozenSet[str]:
        return frozenset().union(*(c.declares for c in self.channels))

    @property
    def consumes(self) -> FrozenSet[str]:
        return frozenset().union(*(c.consumes for c in self.channels))

    @property
    def exact_modes(self) -> FrozenSet[str]:  # type: ignore[override]
        return frozenset().union(*(c.exact_modes for c in self.channels))

    def apply(self, state: NamedState) -> NamedState:
        for channel in self.channels:
            state = channel.apply(state)
        return state


def attach_vacuum(
    state: NamedState,
    labels: Iterable[ModeLabel],
    require_vacuum: bool = False,
) -> NamedState:
    """
    Append |0⟩⟨0| for every label the state does not hold yet

    Args:
        state: input state
        labels: modes that must be present afterwards
        require_vacuum: if True, modes that already exist must be empty

    Returns:
        State containing all ``labels``
    """
    for label in labels:
        if state.has_mode(label.name):
            existing = state.label(label.name)
            if existing.dim != label.dim:
                raise DimensionMismatchError(
                    f"mode '{label.name}' exists with dim {existing.dim}, expected {label.dim}"
                )
            if require_vacuum:
                populations = state.mode_populations(label.name)
                if populations[1:].sum() > settings.TRACE_TOL * max(state.trace, 1.0):
                    raise ParameterError(f"mode '{label.name}' must be in vacuum")
            continue
        vacuum = np.zeros((label.dim, label.dim), dtype=np.complex128)
        vacuum[0, 0] = 1.0
        state = tensor_product(state, NamedState(vacuum, (label,)))
    return state


class KrausChannel(Channel):
    """
    ρ → Σ_k K_k ρ K_k† with optional vacuum attachment before and tracing after

    Kraus operators may be given directly or produced by a factory from the
    current labels of ``targets``; the factory form lets channels adapt to
    whatever truncation the state carries.
    """

    def __init__(
        self,
        name: str,
        kraus: Union[Sequence[NamedOperator], KrausFactory],
        targets: Sequence[str] = (),
        attach: Sequence[ModeLabel] = (),
        vacuum_only: bool = False,
        trace_out: Sequence[str] = (),
    ):
        self.name = name
        self.kraus = kraus
        self.targets = tuple(targets)
        self.attach = tuple(attach)
        self.vacuum_only = vacuum_only
        self.trace_out = tuple(trace_out)
        if not callable(kraus) and not kraus:
            raise ParameterError(f"channel '{name}' has no Kraus operators")

    @property
    def requires(self) -> FrozenSet[str]:
        attached = {l.name for l in self.attach}
        named = set(self.targets)
        if not callable(self.kraus):
            for op in self.kraus:
                named |= set(op.names)
        return frozenset(named - attached)

    @property
    def declares(self) -> FrozenSet[str]:
        return frozenset(l.name for l in self.attach)

    @property
    def consumes(self) -> FrozenSet[str]:
        return frozenset(self.trace_out)

    def operators(self, state: NamedState) -> Sequence[NamedOperator]:
        if callable(self.kraus):
            return self.kraus(tuple(state.label(n) for n in self.targets))
        return self.kraus

    def apply(self, state: NamedState) -> NamedState:
        state = attach_vacuum(state, self.attach, require_vacuum=self.vacuum_only)
        state = apply_kraus(self.operators(state), state)
        if self.trace_out:
            state = partial_trace(state, self.trace_out)
        return state


class PreparationChannel(Channel):
    """Discards whatever the named modes held and replaces them with ``rho``"""

    def __init__(self, name: str, rho: np.ndarray, labels: Sequence[ModeLabel]):
        self.name = name
        self.prepared = NamedState(rho, labels)

    @property
    def declares(self) -> FrozenSet[str]:
        return frozenset(self.prepared.names)

    def apply(self, state: NamedState) -> NamedState:
        present = [n for n in self.prepared.names if state.has_mode(n)]
        if present:
            state = partial_trace(state, present)
        return tensor_product(state, self.prepared)


class DeclareModes(Channel):
    """Adds vacuum modes to the state"""

    def __init__(self, labels: Sequence[ModeLabel], name: Optional[str] = None):
        self.labels = tuple(labels)
        self.name = name or "declare(" + ",".join(l.name for l in self.labels) + ")"

    @property
    def declares(self) -> FrozenSet[str]:
        return frozenset(l.name for l in self.labels)

    def apply(self, state: NamedState) -> NamedState:
        return attach_vacuum(state, self.labels)


def kraus_completeness(operators: Sequence[NamedOperator]) -> np.ndarray:
    """Σ K†K over the union of the operators' modes"""
    labels: List[ModeLabel] = []
    for op in operators:
        labels += [l for l in op.labels if l.name not in {x.name for x in labels}]
    total = None
    for op in operators:
        m = op.expand(labels).matrix
        term = m.conj().T @ m
        total = term if total is None else total + term
    return total
