"""
Base named object: a dense matrix whose tensor factors are addressed by name
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Tuple

import numpy as np

from rebsim.exceptions import CompositionError, DimensionMismatchError, ModeNotFoundError


class ModeKind(str, Enum):
    """What a tensor factor physically represents"""
    SPIN = "spin"
    PHOTON = "photon"
    INCOHERENT = "incoherent-photon"
    LOSS = "loss"


@dataclass(frozen=True)
class ModeLabel:
    """Name, dimension and kind of one subsystem"""
    name: str
    dim: int
    kind: ModeKind = ModeKind.PHOTON

    def __post_init__(self):
        if not self.name:
            raise CompositionError("mode name must be a non-empty string")
        if int(self.dim) < 2:
            raise DimensionMismatchError(f"mode '{self.name}' needs dim >= 2, got {self.dim}")

    @classmethod
    def spin(cls, name: str) -> "ModeLabel":
        return cls(name, 2, ModeKind.SPIN)

    @classmethod
    def photon(cls, name: str, dim: int) -> "ModeLabel":
        return cls(name, dim, ModeKind.PHOTON)

    @classmethod
    def incoherent(cls, name: str, dim: int) -> "ModeLabel":
        return cls(name, dim, ModeKind.INCOHERENT)

    @classmethod
    def loss(cls, name: str, dim: int) -> "ModeLabel":
        return cls(name, dim, ModeKind.LOSS)


def permute_square(matrix: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of a square matrix; ``order[i]`` is the old position of new factor i"""
    n = len(dims)
    if list(order) == list(range(n)):
        return matrix
    tensor = matrix.reshape(tuple(dims) * 2)
    axes = list(order) + [n + i for i in order]
    return tensor.transpose(axes).reshape(matrix.shape)


class NamedObject:
    """
    Dense square matrix over an ordered list of named modes

    Instances are treated as immutable values: operations return new objects
    and never write into ``matrix``.
    """
    __slots__ = ("matrix", "labels")

    def __init__(self, matrix, labels: Iterable[ModeLabel]):
        labels = tuple(labels)
        names = [label.name for label in labels]
        if len(set(names)) != len(names):
            raise CompositionError(f"duplicate mode names in {names}")
        matrix = np.asarray(matrix, dtype=complex)
        size = math.prod(label.dim for label in labels)
        if matrix.shape != (size, size):
            raise DimensionMismatchError(
                f"matrix shape {matrix.shape} does not match mode dims {[l.dim for l in labels]}"
            )
        self.matrix = matrix
        self.labels: Tuple[ModeLabel, ...] = labels

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(label.name for label in self.labels)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(label.dim for label in self.labels)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def has_mode(self, name: str) -> bool:
        return any(label.name == name for label in self.labels)

    def index(self, name: str) -> int:
        for i, label in enumerate(self.labels):
            if label.name == name:
                return i
        raise ModeNotFoundError(f"mode '{name}' not found in {list(self.names)}")

    def label(self, name: str) -> ModeLabel:
        return self.labels[self.index(name)]

    def _reordered_matrix(self, names: Sequence[str]) -> Tuple[np.ndarray, Tuple[ModeLabel, ...]]:
        names = list(names)
        if sorted(names) != sorted(self.names):
            raise ModeNotFoundError(f"reorder needs exactly the modes {list(self.names)}, got {names}")
        order = [self.index(name) for name in names]
        labels = tuple(self.labels[i] for i in order)
        return permute_square(self.matrix, self.dims, order), labels

    def __repr__(self) -> str:
        modes = ", ".join(f"{l.name}:{l.dim}" for l in self.labels)
        return f"<{type(self).__name__}([{modes}], size={self.size})>"
