"""
Physical building blocks as quantum channels

Every factory returns a Channel acting on named modes. Bosonic channels read
the truncation from the state they are applied to, so the same channel
object works for any Fock dimension.
"""
import itertools
import math
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag

from rebsim.config import settings
from rebsim.exceptions import DimensionMismatchError, ParameterError, TruncationError
from rebsim.models.base import ModeLabel
from rebsim.models.channel import (
    Channel,
    KrausChannel,
    PreparationChannel,
)
from rebsim.models.named_state import NamedOperator
from rebsim.models.operators import (
    PAULIS,
    SPIN_GATES,
    beamsplitter,
    coherent_amplitudes,
    create,
    dilation_kraus,
    displacement,
    poisson_weights,
    projector,
    two_mode_squeezed_amplitudes,
)
from rebsim.schemas.channel_params import (
    DetectorKind,
    EmissionChannelParams,
    PhotonSource,
    ReflectionVariant,
    ReflectionCoefficients,
    ScatterChannelParams,
)
from rebsim.services.synthesis import synthesize_three_port, synthesize_two_port


def _check_fidelity(name: str, value: float) -> float:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} must be in [0, 1], got {value}")
    return float(value)


def _check_leakage(what: str, leakage: float) -> None:
    if leakage > settings.LEAKAGE_THRESHOLD:
        raise TruncationError(
            f"{what} leaks {leakage:.3e} beyond the Fock truncation "
            f"(threshold {settings.LEAKAGE_THRESHOLD:g})"
        )


# Spin channels

def prepare_state(spin: str, psi: Sequence[complex], F_state: float = 1.0) -> Channel:
    """
    Prepare ``spin`` in F|ψ⟩⟨ψ| + (1−F)|ψ⊥⟩⟨ψ⊥|

    Args:
        spin: spin mode name (created, or reset if present)
        psi: normalized qubit amplitudes (c0, c1)
        F_state: preparation fidelity

    Returns:
        Preparation channel
    """
    F = _check_fidelity("F_state", F_state)
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if psi.shape != (2,) or abs(np.vdot(psi, psi) - 1.0) > settings.COEFFICIENT_TOL:
        raise ParameterError("psi must be a normalized qubit state")
    perp = np.array([-np.conj(psi[1]), np.conj(psi[0])])
    rho = F * np.outer(psi, psi.conj()) + (1.0 - F) * np.outer(perp, perp.conj())
    return PreparationChannel(f"prepare({spin})", rho, (ModeLabel.spin(spin),))


def depolarize_one(spin: str, F1: float) -> Channel:
    """Fρ + (1−F)/3 Σ σρσ over X, Y, Z"""
    F = _check_fidelity("F1", F1)
    label = (ModeLabel.spin(spin),)
    weight = math.sqrt((1.0 - F) / 3.0)
    kraus = [NamedOperator(math.sqrt(F) * PAULIS["I"], label)]
    if F < 1.0:
        kraus += [NamedOperator(weight * PAULIS[p], label) for p in "XYZ"]
    return KrausChannel(f"depolarize({spin})", kraus)


def depolarize_two(spin_a: str, spin_b: str, F2: float) -> Channel:
    """Fρ + (1−F)/15 Σ over the 15 non-identity Pauli pairs"""
    F = _check_fidelity("F2", F2)
    labels = (ModeLabel.spin(spin_a), ModeLabel.spin(spin_b))
    weight = math.sqrt((1.0 - F) / 15.0)
    kraus = [NamedOperator(math.sqrt(F) * np.eye(4), labels)]
    if F < 1.0:
        for p, q in itertools.product("IXYZ", repeat=2):
            if p == q == "I":
                continue
            kraus.append(NamedOperator(weight * np.kron(PAULIS[p], PAULIS[q]), labels))
    return KrausChannel(f"depolarize({spin_a},{spin_b})", kraus)


def rotate_spin(spin: str, gate: str, F1: float = 1.0) -> Channel:
    """Ideal gate X, Y, Z, H or I, followed by depolarization when F1 < 1"""
    if gate not in SPIN_GATES:
        raise ParameterError(f"unknown spin gate '{gate}'")
    unitary = KrausChannel(f"{gate}({spin})", [NamedOperator(SPIN_GATES[gate], (ModeLabel.spin(spin),))])
    if F1 >= 1.0:
        return unitary
    return unitary.then(depolarize_one(spin, F1))


# Photonic channels

def photonic_loss(mode: str, L: float) -> Channel:
    """
    Route a fraction L of the photons in ``mode`` into a traced-out vacuum mode

    θ_L = arcsin√L; the loss ancilla has the same truncation as ``mode``.
    """
    if not 0.0 <= L <= 1.0:
        raise ParameterError(f"loss must be in [0, 1], got {L}")
    theta = math.asin(math.sqrt(L))

    def kraus(labels: Tuple[ModeLabel, ...]):
        (label,) = labels
        d = label.dim
        if L == 0.0:
            return [NamedOperator(np.eye(d), labels)]
        return [NamedOperator(k, labels) for k in dilation_kraus(beamsplitter(theta, d, d), d, d)]

    return KrausChannel(f"loss({mode},{L:g})", kraus, targets=(mode,))


def mode_mix(a: str, b: str, theta: float = math.pi / 4) -> Channel:
    """exp[θ(â b̂† − â† b̂)] on two modes of equal truncation"""

    def kraus(labels: Tuple[ModeLabel, ...]):
        la, lb = labels
        if la.dim != lb.dim:
            raise DimensionMismatchError(
                f"mode_mix needs equal truncation, got {la.name}:{la.dim} and {lb.name}:{lb.dim}"
            )
        return [NamedOperator(beamsplitter(float(theta), la.dim, lb.dim), labels)]

    return KrausChannel(f"mix({a},{b})", kraus, targets=(a, b))


def _port_projector(dims: Sequence[int], kind: DetectorKind, clicked: bool) -> np.ndarray:
    occupations = np.array(list(itertools.product(*(range(d) for d in dims))))
    total = occupations.sum(axis=1)
    if not clicked:
        diagonal = total == 0
    elif kind == DetectorKind.CLICK:
        diagonal = total > 0
    else:
        diagonal = total == 1
    return np.diag(diagonal.astype(np.complex128))


def detect(
    port: Sequence[str],
    kind: DetectorKind = DetectorKind.CLICK,
    clicked: bool = True,
) -> Channel:
    """
    Project a detector port on an outcome, then trace the port out

    A port may hold several distinguishable modes (coherent plus incoherent);
    a threshold detector clicks when any of them is occupied. For the
    number-resolving kind a click means exactly one photon in total.

    Args:
        port: mode name or names seen by the detector
        kind: click or single_photon
        clicked: outcome to project on; False projects on the all-vacuum state

    Returns:
        Trace-non-increasing channel whose trace ratio is the outcome probability
    """
    port = (port,) if isinstance(port, str) else tuple(port)
    kind = DetectorKind(kind)

    def kraus(labels: Tuple[ModeLabel, ...]):
        return [NamedOperator(_port_projector([l.dim for l in labels], kind, clicked), labels)]

    outcome = "click" if clicked else "none"
    return KrausChannel(f"detect({','.join(port)}={outcome})", kraus, targets=port, trace_out=port)


def spdc_pair(
    zeta: complex,
    modes: Tuple[str, str, str, str] = ("a_H", "a_V", "b_H", "b_V"),
    dim: Optional[int] = None,
) -> Channel:
    """
    Polarization-entangled pair from two two-mode squeezers on (a_H, b_V) and (a_V, b_H)

    The output is renormalized within the truncation after the leakage guard.
    """
    dim = dim or settings.FOCK_DIM
    a_h, a_v, b_h, b_v = modes
    amplitudes, _ = two_mode_squeezed_amplitudes(abs(zeta), float(np.angle(zeta)), dim)
    weight = float(np.sum(np.abs(amplitudes) ** 2))
    _check_leakage("SPDC pair state", 1.0 - weight ** 2)
    ket = np.zeros((dim, dim, dim, dim), dtype=np.complex128)
    for n, m in itertools.product(range(dim), repeat=2):
        # a_H and b_V share n pairs, a_V and b_H share m pairs
        ket[n, m, m, n] = amplitudes[n] * amplitudes[m]
    ket = ket.ravel()
    ket /= np.linalg.norm(ket)
    labels = tuple(ModeLabel.photon(name, dim) for name in modes)
    channel = PreparationChannel(f"spdc({zeta:g})", np.outer(ket, ket.conj()), labels)
    channel.is_source = True
    return channel


def prepare_photon(
    modes: Tuple[str, str],
    source: PhotonSource = PhotonSource.SINGLE_PHOTON,
    alpha: float = 0.0,
    dim: Optional[int] = None,
) -> Channel:
    """
    Time-bin photon source on (early, late)

    single_photon gives (|1,0⟩ + |0,1⟩)/√2; wcs gives |α/√2⟩|α/√2⟩ truncated
    and renormalized.
    """
    source = PhotonSource(source)
    early, late = modes
    if source == PhotonSource.SINGLE_PHOTON:
        dim = dim or settings.FOCK_DIM
        ket = np.zeros((dim, dim), dtype=np.complex128)
        ket[1, 0] = ket[0, 1] = 1.0 / math.sqrt(2.0)
    else:
        dim = dim or settings.WCS_FOCK_DIM
        if dim < 4:
            raise DimensionMismatchError(f"weak coherent input needs Fock dim >= 4, got {dim}")
        half, leakage = coherent_amplitudes(alpha / math.sqrt(2.0), dim)
        _check_leakage("weak coherent input", 1.0 - (1.0 - leakage) ** 2)
        ket = np.outer(half, half)
        ket /= np.linalg.norm(ket)
    ket = ket.ravel()
    labels = (ModeLabel.photon(early, dim), ModeLabel.photon(late, dim))
    channel = PreparationChannel(f"{source.value}({early},{late})", np.outer(ket, ket.conj()), labels)
    channel.is_source = True
    return channel


# Spin-photon interfaces

def emit_spontaneous(
    spin: str,
    photon_mode: str,
    incoh_mode: str,
    params: EmissionChannelParams,
    photon_dim: Optional[int] = None,
    incoh_dim: Optional[int] = None,
) -> Channel:
    """
    Optical π-pulse emission conditioned on the bright spin state

    Kraus set on (spin, photon, incoherent), both photonic modes starting in
    vacuum:
        A0 = |0⟩⟨0|⊗I + √p_coh |1⟩⟨1|⊗a†
        A1 = √p_loss |1⟩⟨1|
        A2 = √p_incoh |1⟩⟨1|⊗a_incoh†
        A3 = √p_2ph |1⟩⟨1|⊗a†a†/√2
    """
    photon_dim = photon_dim or settings.FOCK_DIM
    incoh_dim = incoh_dim or settings.INCOHERENT_FOCK_DIM
    if params.p_2ph > 0.0 and photon_dim < 3:
        raise DimensionMismatchError("two-photon emission needs photon dim >= 3")
    labels = (
        ModeLabel.spin(spin),
        ModeLabel.photon(photon_mode, photon_dim),
        ModeLabel.incoherent(incoh_mode, incoh_dim),
    )
    dark, bright = projector(2, 0), projector(2, 1)
    i_p, i_n = np.eye(photon_dim), np.eye(incoh_dim)
    a_dag = create(photon_dim)

    def op(spin_part, photon_part, incoh_part):
        return np.kron(np.kron(spin_part, photon_part), incoh_part)

    kraus = [
        NamedOperator(op(dark, i_p, i_n) + math.sqrt(params.p_coh) * op(bright, a_dag, i_n), labels)
    ]
    if params.p_loss > 0.0:
        kraus.append(NamedOperator(math.sqrt(params.p_loss) * op(bright, i_p, i_n), labels))
    if params.p_incoh > 0.0:
        kraus.append(NamedOperator(math.sqrt(params.p_incoh) * op(bright, i_p, create(incoh_dim)), labels))
    if params.p_2ph > 0.0:
        kraus.append(
            NamedOperator(math.sqrt(params.p_2ph) * op(bright, a_dag @ a_dag / math.sqrt(2.0), i_n), labels)
        )
    channel = KrausChannel(
        f"emit({spin})",
        kraus,
        targets=(spin, photon_mode, incoh_mode),
        attach=labels[1:],
        vacuum_only=True,
    )
    channel.is_source = True
    # at most one incoherent photon per emitter
    channel.exact_modes = frozenset({incoh_mode})
    return channel


def scatter_coherent(
    spin: str,
    photon_mode: str,
    loss_mode: str,
    incoh_mode: str,
    params: ScatterChannelParams,
    photon_dim: Optional[int] = None,
    incoh_dim: Optional[int] = None,
) -> Channel:
    """
    Weak coherent scattering conditioned on the bright spin state

    The bright state displaces the photon mode by α and the loss mode by α_L,
    and adds k incoherent photons with Poisson weight P_β(k). Tracing the
    displaced loss mode leaves the overlap ⟨0|α_L⟩ on the spin coherence, so
    the loss mode only appears through two Kraus branches. Assumes the
    incoherent light is fully filtered into its own mode.
    """
    photon_dim = photon_dim or settings.FOCK_DIM
    incoh_dim = incoh_dim or settings.INCOHERENT_FOCK_DIM
    _, leakage = coherent_amplitudes(params.alpha, photon_dim)
    _check_leakage(f"coherent state in '{photon_mode}'", leakage)
    weights, tail = poisson_weights(params.beta_sq, incoh_dim)
    _check_leakage(f"incoherent photons in '{incoh_mode}'", tail)
    weights = weights / weights.sum()

    labels = (
        ModeLabel.spin(spin),
        ModeLabel.photon(photon_mode, photon_dim),
        ModeLabel.incoherent(incoh_mode, incoh_dim),
    )
    dark, bright = projector(2, 0), projector(2, 1)
    i_p, i_n = np.eye(photon_dim), np.eye(incoh_dim)
    shift = displacement(params.alpha, photon_dim)
    overlap = math.exp(-abs(params.alpha_L) ** 2 / 2.0)
    loss_branches = [
        np.kron(np.kron(dark, i_p), i_n) + overlap * np.kron(np.kron(bright, shift), i_n),
        math.sqrt(max(0.0, 1.0 - overlap ** 2)) * np.kron(np.kron(bright, shift), i_n),
    ]
    if overlap == 1.0:
        loss_branches = loss_branches[:1]

    kraus = []
    a_dag = create(incoh_dim)
    for k, weight in enumerate(weights):
        if weight == 0.0:
            continue
        added = np.linalg.matrix_power(a_dag, k) / math.sqrt(math.factorial(k))
        incoh = np.kron(np.kron(dark, i_p), i_n) + np.kron(np.kron(bright, i_p), added)
        for branch in loss_branches:
            kraus.append(NamedOperator(math.sqrt(weight) * incoh @ branch, labels))
    channel = KrausChannel(
        f"scatter({spin},{loss_mode})",
        kraus,
        targets=(spin, photon_mode, incoh_mode),
        attach=labels[1:],
        vacuum_only=True,
    )
    channel.is_source = True
    return channel


@lru_cache(maxsize=512)
def _reflection_blocks(
    variant: ReflectionVariant,
    key: Tuple[complex, ...],
    dim: int,
    retain_transmit: bool,
) -> Tuple[np.ndarray, ...]:
    r, t, l = key[0:2], key[2:4], key[4:6]
    per_spin = []
    for k in (0, 1):
        if variant == ReflectionVariant.PHASE:
            loss = 1.0 - abs(r[k]) ** 2
            unitary = synthesize_two_port(r[k], math.sqrt(max(loss, 0.0)), float(np.angle(l[k]))).unitary(dim)
            per_spin.append(dilation_kraus(unitary, dim, dim))
            continue
        unitary = synthesize_three_port(r[k], t[k], l[k]).unitary(dim)
        u = unitary.reshape((dim,) * 6)
        if retain_transmit:
            ops = [u[:, :, j, :, :, 0].reshape(dim * dim, dim * dim) for j in range(dim)]
        else:
            ops = [u[:, m, j, :, 0, 0] for m in range(dim) for j in range(dim)]
        per_spin.append(ops)
    blocks = tuple(block_diag(k0, k1) for k0, k1 in zip(*per_spin))
    for block in blocks:
        block.setflags(write=False)
    return blocks


def reflect_conditional(
    spin: str,
    photon_mode: str,
    coeffs: ReflectionCoefficients,
    variant: ReflectionVariant = ReflectionVariant.PHASE,
    transmit_mode: Optional[str] = None,
    retain_transmit: bool = False,
) -> Channel:
    """
    Spin-conditioned reflection of the photon in ``photon_mode``

    phase: each spin state k reflects with phase ∠r_k and loses L_k = 1 − |r_k|²
    into a traced ancilla. amplitude: three-port routing per spin state onto
    (reflect, transmit, loss); the loss port is always traced and the transmit
    port too unless ``retain_transmit``.

    Args:
        spin: spin mode
        photon_mode: reflected mode
        coeffs: per-spin (r, t, l)
        variant: phase or amplitude
        transmit_mode: name of the transmit mode (amplitude variant only)
        retain_transmit: keep the transmitted light as a named mode

    Returns:
        Trace-preserving channel
    """
    variant = ReflectionVariant(variant)
    if variant == ReflectionVariant.AMPLITUDE and not transmit_mode:
        raise ParameterError("amplitude reflection needs a transmit mode")
    key = coeffs.cache_key()
    retain = bool(retain_transmit and variant == ReflectionVariant.AMPLITUDE)

    if retain:
        return _RetainedReflection(spin, photon_mode, transmit_mode, variant, key)

    def kraus(labels: Tuple[ModeLabel, ...]):
        dim = labels[1].dim
        blocks = _reflection_blocks(variant, key, dim, False)
        return [NamedOperator(b, labels) for b in blocks]

    return KrausChannel(f"reflect({spin},{photon_mode})", kraus, targets=(spin, photon_mode))


class _RetainedReflection(Channel):
    """Amplitude reflection that keeps the transmitted light in its own mode"""

    def __init__(self, spin: str, photon_mode: str, transmit_mode: str, variant, key):
        self.name = f"reflect({spin},{photon_mode}->{transmit_mode})"
        self.spin, self.photon_mode, self.transmit_mode = spin, photon_mode, transmit_mode
        self.variant, self.key = variant, key

    @property
    def requires(self):
        return frozenset({self.spin, self.photon_mode})

    @property
    def declares(self):
        return frozenset({self.transmit_mode})

    def apply(self, state):
        dim = state.label(self.photon_mode).dim
        labels = (
            state.label(self.spin),
            state.label(self.photon_mode),
            ModeLabel.photon(self.transmit_mode, dim),
        )
        blocks = _reflection_blocks(self.variant, self.key, dim, True)
        inner = KrausChannel(self.name, [NamedOperator(b, labels) for b in blocks], attach=labels[2:])
        return inner.apply(state)
