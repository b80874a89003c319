"""
Models package - named-mode states, operators and channels
"""
from .base import ModeKind, ModeLabel, NamedObject
from .named_state import (
    NamedOperator,
    NamedState,
    apply,
    apply_kraus,
    partial_trace,
    success_probability,
    tensor_product,
)
from .bell import BellFidelities, BellState, bell_fidelity
from .channel import (
    Channel,
    ChannelSequence,
    DeclareModes,
    KrausChannel,
    PreparationChannel,
    attach_vacuum,
)

__all__ = [
    "ModeKind",
    "ModeLabel",
    "NamedObject",
    "NamedOperator",
    "NamedState",
    "apply",
    "apply_kraus",
    "partial_trace",
    "success_probability",
    "tensor_product",
    "BellFidelities",
    "BellState",
    "bell_fidelity",
    "Channel",
    "ChannelSequence",
    "DeclareModes",
    "KrausChannel",
    "PreparationChannel",
    "attach_vacuum",
]
