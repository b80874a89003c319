"""
Matrix building blocks: Pauli set, ladder operators, beamsplitters and
truncated Fock-space amplitudes
"""
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from rebsim.exceptions import DimensionMismatchError, ParameterError


I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
Y = np.array([[0.0, -1j], [1j, 0.0]], dtype=np.complex128)
Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)

PAULIS: Dict[str, np.ndarray] = {"I": I2, "X": X, "Y": Y, "Z": Z}
SPIN_GATES: Dict[str, np.ndarray] = {"I": I2, "X": X, "Y": Y, "Z": Z, "H": H}


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix.setflags(write=False)
    return matrix


@lru_cache(maxsize=None)
def destroy(dim: int) -> np.ndarray:
    """Annihilation operator truncated to ``dim`` Fock levels"""
    if dim < 2:
        raise DimensionMismatchError(f"Fock dimension must be >= 2, got {dim}")
    return _frozen(np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(np.complex128))


@lru_cache(maxsize=None)
def create(dim: int) -> np.ndarray:
    return _frozen(destroy(dim).conj().T.copy())


@lru_cache(maxsize=None)
def number(dim: int) -> np.ndarray:
    return _frozen(np.diag(np.arange(dim, dtype=float)).astype(np.complex128))


def projector(dim: int, level: int) -> np.ndarray:
    """|level⟩⟨level| in a ``dim``-level space"""
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[level, level] = 1.0
    return out


@lru_cache(maxsize=4096)
def beamsplitter(theta: float, dim_a: int, dim_b: int) -> np.ndarray:
    """
    exp[θ(â b̂† − â† b̂)] on the ordered pair (a, b)

    A photon in ``a`` goes to cosθ|1_a⟩ + sinθ|1_b⟩.
    """
    generator = np.kron(destroy(dim_a), create(dim_b)) - np.kron(create(dim_a), destroy(dim_b))
    return _frozen(expm(theta * generator))


def phase_shift(phi: float, dim: int) -> np.ndarray:
    """exp(iφ n̂)"""
    return np.diag(np.exp(1j * phi * np.arange(dim))).astype(np.complex128)


def displacement(alpha: complex, dim: int, pad: int = 12) -> np.ndarray:
    """
    D(α) cropped to ``dim`` levels

    The exponential is taken in a padded space so the low-level block is
    accurate; the result is not exactly unitary on the truncated space.
    """
    big = dim + pad
    generator = alpha * create(big) - np.conj(alpha) * destroy(big)
    return expm(generator)[:dim, :dim]


def coherent_amplitudes(alpha: complex, dim: int) -> Tuple[np.ndarray, float]:
    """
    Fock amplitudes of |α⟩ up to ``dim`` levels and the probability mass beyond

    Returns:
        (amplitudes, leakage)
    """
    n = np.arange(dim)
    magnitude = abs(alpha)
    if magnitude == 0.0:
        amplitudes = np.zeros(dim, dtype=np.complex128)
        amplitudes[0] = 1.0
        return amplitudes, 0.0
    log_mag = -0.5 * magnitude ** 2 + n * np.log(magnitude) - 0.5 * gammaln(n + 1)
    amplitudes = np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))
    leakage = max(0.0, 1.0 - float(np.sum(np.abs(amplitudes) ** 2)))
    return amplitudes.astype(np.complex128), leakage


def poisson_weights(mean: float, dim: int) -> Tuple[np.ndarray, float]:
    """P(k) = e^{-m} m^k / k! for k < dim, plus the tail mass"""
    if mean < 0:
        raise ParameterError(f"Poisson mean must be >= 0, got {mean}")
    k = np.arange(dim)
    if mean == 0.0:
        weights = np.zeros(dim)
        weights[0] = 1.0
        return weights, 0.0
    weights = np.exp(-mean + k * np.log(mean) - gammaln(k + 1))
    return weights, max(0.0, 1.0 - float(weights.sum()))


def two_mode_squeezed_amplitudes(r: float, phi: float, dim: int) -> Tuple[np.ndarray, float]:
    """
    Amplitudes c_n of Σ c_n |n, n⟩ for a two-mode squeezed vacuum

    c_n = (e^{iφ} tanh r)^n / cosh r.
    """
    n = np.arange(dim)
    amplitudes = (np.exp(1j * phi) * np.tanh(r)) ** n / np.cosh(r)
    leakage = max(0.0, 1.0 - float(np.sum(np.abs(amplitudes) ** 2)))
    return amplitudes.astype(np.complex128), leakage


def dilation_kraus(unitary: np.ndarray, dim_system: int, dim_env: int):
    """
    Kraus operators of a system-environment unitary with the environment
    starting (and being traced) in its Fock basis

    K_j = ⟨j_env| U |0_env⟩
    """
    if unitary.shape != (dim_system * dim_env, dim_system * dim_env):
        raise DimensionMismatchError("unitary does not match system and environment dims")
    u4 = unitary.reshape(dim_system, dim_env, dim_system, dim_env)
    return [np.ascontiguousarray(u4[:, j, :, 0]) for j in range(dim_env)]


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix"""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
