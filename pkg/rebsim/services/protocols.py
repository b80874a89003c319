"""
Protocol composition, heralding and Pareto reduction
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from rebsim.config import settings
from rebsim.exceptions import CompositionError, HeraldError, ParameterError
from rebsim.models.base import ModeLabel
from rebsim.models.bell import BellState, bell_fidelity
from rebsim.models.channel import Channel, DeclareModes
from rebsim.models.named_state import (
    NamedOperator,
    NamedState,
    apply,
    check_truncation,
    partial_trace,
)
from rebsim.models.operators import PAULIS
from rebsim.schemas.channel_params import (
    EmissionChannelParams,
    ReflectionCoefficients,
    SpinChannelParams,
)
from rebsim.schemas.sweep import ProtocolOutcome
from rebsim.services.channels import (
    DetectorKind,
    PhotonSource,
    ReflectionVariant,
    detect,
    emit_spontaneous,
    mode_mix,
    photonic_loss,
    prepare_photon,
    prepare_state,
    reflect_conditional,
    rotate_spin,
)

logger = logging.getLogger(__name__)

Pattern = Tuple[bool, ...]


class Topology(str, Enum):
    DETECTION_IN_MIDPOINT = "detection_in_midpoint"
    SENDER_RECEIVER = "sender_receiver"


class Encoding(str, Enum):
    FOCK = "fock"
    TIME_BIN = "time_bin"


@dataclass(frozen=True)
class Detector:
    """A detector and the (possibly several) modes it sees"""
    name: str
    port: Tuple[str, ...]
    kind: DetectorKind = DetectorKind.CLICK


@dataclass(frozen=True)
class HeraldRule:
    """
    Accepted click patterns and the Pauli correction applied to each

    A correction such as "ZI" applies Z to the first spin and nothing to the
    second, bringing every accepted branch onto the common target.
    """
    accept: Dict[Pattern, str]

    def __post_init__(self):
        if not self.accept:
            raise CompositionError("a herald rule needs at least one accepting pattern")
        lengths = {len(p) for p in self.accept}
        if len(lengths) != 1:
            raise CompositionError("all herald patterns must cover the same detectors")
        for correction in self.accept.values():
            if len(correction) != 2 or any(c not in PAULIS for c in correction):
                raise CompositionError(f"invalid Pauli correction '{correction}'")

    @property
    def size(self) -> int:
        return len(next(iter(self.accept)))

    def label(self) -> str:
        return "|".join(pattern_label(p) for p in self.accept)


def pattern_label(pattern: Pattern) -> str:
    return "".join("T" if clicked else "F" for clicked in pattern)


@dataclass
class ProtocolSpec:
    """Ordered channel pipeline with detectors, herald rule and target Bell state"""
    name: str
    topology: Topology
    encoding: Encoding
    steps: List[Channel]
    detectors: List[Detector]
    herald: HeraldRule
    target: BellState
    spins: Tuple[str, str] = ("spin_A", "spin_B")
    input_source: PhotonSource = PhotonSource.SINGLE_PHOTON
    parameters: Dict[str, float] = field(default_factory=dict)

    def validate(self) -> None:
        """Every mode is declared before use and the herald only reads detected modes"""
        available = set()
        for step in self.steps:
            missing = set(step.requires) - available
            if missing:
                raise CompositionError(f"step '{step.name}' uses undeclared modes {sorted(missing)}")
            available |= step.declares
            available -= step.consumes
        detected = [mode for d in self.detectors for mode in d.port]
        if len(set(detected)) != len(detected):
            raise CompositionError("a mode is seen by more than one detector")
        missing = set(detected) - available
        if missing:
            raise CompositionError(f"detectors read undeclared modes {sorted(missing)}")
        if self.herald.size != len(self.detectors):
            raise CompositionError(
                f"herald patterns cover {self.herald.size} detectors, protocol has {len(self.detectors)}"
            )
        missing = set(self.spins) - available
        if missing:
            raise CompositionError(f"spins {sorted(missing)} are not present at the herald")


def _spin_correction(spec: ProtocolSpec, correction: str) -> NamedOperator:
    labels = tuple(ModeLabel.spin(s) for s in spec.spins)
    return NamedOperator(np.kron(PAULIS[correction[0]], PAULIS[correction[1]]), labels)


class ProtocolEngine:
    """Runs protocol specs on the named-state engine"""

    def prepare(self, spec: ProtocolSpec) -> NamedState:
        """
        Execute all steps before the herald measurement

        Args:
            spec: validated protocol

        Returns:
            Pre-measurement state
        """
        state = NamedState.vacuum()
        exact: Set[str] = set()
        for step in spec.steps:
            state = step(state)
            exact |= step.exact_modes
            if step.is_source:
                check_truncation(state, skip=exact)
        return state

    def project(self, spec: ProtocolSpec, state: NamedState, pattern: Pattern) -> NamedState:
        """Apply the detector outcomes of ``pattern`` and keep only the spins"""
        for detector, clicked in zip(spec.detectors, pattern):
            state = detect(detector.port, detector.kind, clicked)(state)
        others = [n for n in state.names if n not in spec.spins]
        return partial_trace(state, others).reorder(spec.spins)

    def herald_pattern_probabilities(
        self,
        spec: ProtocolSpec,
        state: Optional[NamedState] = None,
    ) -> Dict[str, float]:
        """
        Probability of every click pattern, accepted or not

        For threshold detectors the values sum to the pre-measurement trace.
        """
        if state is None:
            state = self.prepare(spec)
        probabilities = {}
        for pattern in itertools.product((True, False), repeat=len(spec.detectors)):
            probabilities[pattern_label(pattern)] = self.project(spec, state, pattern).trace
        return probabilities

    def run(self, spec: ProtocolSpec, swept_values: Optional[Dict[str, float]] = None) -> ProtocolOutcome:
        """
        Run the protocol and herald on all accepting patterns

        Each accepted branch is projected, reduced to the spins and corrected
        with its Pauli frame; the branches are then summed, so the reported
        fidelity is the trace-weighted average over patterns.

        Args:
            spec: protocol to execute
            swept_values: grid coordinates reported with the outcome

        Returns:
            ProtocolOutcome
        """
        spec.validate()
        state = self.prepare(spec)
        total = None
        for pattern, correction in spec.herald.accept.items():
            branch = self.project(spec, state, pattern)
            branch = apply(_spin_correction(spec, correction), branch)
            total = branch if total is None else total + branch
        success = total.trace
        if success <= settings.HERALD_FLOOR:
            raise HeraldError(
                f"accepting patterns of '{spec.name}' have total probability {success:.3e}"
            )
        fidelity = bell_fidelity(total, spec.spins)[spec.target]
        fidelity = min(max(fidelity, 0.0), 1.0)
        logger.debug("protocol %s: success %.6e, fidelity %.9f", spec.name, success, fidelity)
        return ProtocolOutcome(
            success_probability=min(max(success, 0.0), 1.0),
            fidelity=fidelity,
            infidelity=1.0 - fidelity,
            herald_pattern=spec.herald.label(),
            swept_values=dict(spec.parameters if swept_values is None else swept_values),
        )


def run(spec: ProtocolSpec, swept_values: Optional[Dict[str, float]] = None) -> ProtocolOutcome:
    return ProtocolEngine().run(spec, swept_values)


@dataclass(frozen=True)
class ArmLosses:
    """Loss fractions applied to every traveling photon"""
    link: float = 0.0
    insertion: float = 0.0

    def __post_init__(self):
        for name in ("link", "insertion"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} loss must be in [0, 1], got {value}")


def _losses(modes: Iterable[str], L: float) -> List[Channel]:
    if L == 0.0:
        return []
    return [photonic_loss(mode, L) for mode in modes]


def protocol_a(
    alpha: float,
    emission: EmissionChannelParams,
    losses: ArmLosses = ArmLosses(),
    detector_kind: DetectorKind = DetectorKind.CLICK,
    spin_params: SpinChannelParams = SpinChannelParams(),
    photon_dim: Optional[int] = None,
    incoh_dim: Optional[int] = None,
) -> ProtocolSpec:
    """
    Emission-based single-click protocol (Fock encoding, detection in the midpoint)

    Both spins start in √(1−α)|0⟩ + √α|1⟩ and emit into their own coherent
    and incoherent modes. The coherent modes interfere at the midpoint; each
    incoherent photon reaches either detector with probability 1/2.

    Args:
        alpha: bright-state population
        emission: emission branch probabilities
        losses: per-arm insertion and link loss
        detector_kind: threshold or number-resolving detectors
        spin_params: preparation fidelity
        photon_dim: truncation of the coherent modes
        incoh_dim: truncation of the incoherent modes

    Returns:
        ProtocolSpec heralding Ψ+ on a single click
    """
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must be in [0, 1], got {alpha}")
    incoh_dim = incoh_dim or settings.INCOHERENT_FOCK_DIM
    psi = (math.sqrt(1.0 - alpha), math.sqrt(alpha))
    steps: List[Channel] = []
    for node in ("A", "B"):
        spin, photon, incoh = f"spin_{node}", f"photon_{node}", f"incoh_{node}"
        steps.append(prepare_state(spin, psi, spin_params.F_state))
        steps.append(emit_spontaneous(spin, photon, incoh, emission, photon_dim, incoh_dim))
        steps += _losses((photon, incoh), losses.insertion)
        steps += _losses((photon, incoh), losses.link)
    steps.append(mode_mix("photon_A", "photon_B"))
    steps.append(
        DeclareModes((ModeLabel.incoherent("incoh_A_2", incoh_dim), ModeLabel.incoherent("incoh_B_2", incoh_dim)))
    )
    steps.append(mode_mix("incoh_A", "incoh_A_2"))
    steps.append(mode_mix("incoh_B", "incoh_B_2"))
    detectors = [
        Detector("D1", ("photon_A", "incoh_A", "incoh_B_2"), detector_kind),
        Detector("D2", ("photon_B", "incoh_B", "incoh_A_2"), detector_kind),
    ]
    herald = HeraldRule({(True, False): "ZI", (False, True): "II"})
    return ProtocolSpec(
        name="A",
        topology=Topology.DETECTION_IN_MIDPOINT,
        encoding=Encoding.FOCK,
        steps=steps,
        detectors=detectors,
        herald=herald,
        target=BellState.PSI_PLUS,
        parameters={"alpha": alpha},
    )


# Pauli frame per accepted click pattern, keyed by reflection variant
B_CORRECTIONS: Dict[ReflectionVariant, Dict[Pattern, str]] = {
    ReflectionVariant.AMPLITUDE: {(True, False): "ZI", (False, True): "II"},
    ReflectionVariant.PHASE: {(True, False): "ZI", (False, True): "XI"},
}

C_CORRECTIONS: Dict[ReflectionVariant, Dict[Pattern, str]] = {
    ReflectionVariant.AMPLITUDE: {
        (True, False, True, False): "II",
        (True, False, False, True): "ZI",
        (False, True, True, False): "ZI",
        (False, True, False, True): "II",
    },
    ReflectionVariant.PHASE: {
        (True, False, True, False): "XI",
        (True, False, False, True): "ZI",
        (False, True, True, False): "ZI",
        (False, True, False, True): "XI",
    },
}


def _node_sequence(
    spin: str,
    early: str,
    late: str,
    coeffs: ReflectionCoefficients,
    variant: ReflectionVariant,
    spin_params: SpinChannelParams,
    insertion: float,
) -> List[Channel]:
    """Reflect the early bin, flip the spin, reflect the late bin"""
    transmit = f"transmit_{spin}"
    steps = [
        reflect_conditional(spin, early, coeffs, variant, transmit),
        rotate_spin(spin, "X", spin_params.F1),
        reflect_conditional(spin, late, coeffs, variant, transmit),
    ]
    return steps + _losses((early, late), insertion)


def protocol_b(
    coeffs: ReflectionCoefficients,
    losses: ArmLosses = ArmLosses(),
    variant: ReflectionVariant = ReflectionVariant.AMPLITUDE,
    detector_kind: DetectorKind = DetectorKind.CLICK,
    spin_params: SpinChannelParams = SpinChannelParams(),
    photon_dim: Optional[int] = None,
) -> ProtocolSpec:
    """
    Sender-receiver projector protocol with a time-bin photon

    One photon reflects at node A, travels the link, reflects at node B and
    is measured in the time-bin X basis.

    Args:
        coeffs: per-spin reflection coefficients at the operating point
        losses: insertion loss per node, link loss between them
        variant: amplitude (three-port) or phase (two-port) reflection
        detector_kind: threshold or number-resolving detectors
        spin_params: preparation and gate fidelities
        photon_dim: time-bin mode truncation

    Returns:
        ProtocolSpec heralding Φ+ on a single click

    With phase reflection the spin-dependent phases ∠r_1 − ∠r_0 = π/2
    make the early click herald Φ− and the late click Ψ+, so the late
    branch takes an X correction instead.
    """
    variant = ReflectionVariant(variant)
    plus = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))
    steps: List[Channel] = [
        prepare_state("spin_A", plus, spin_params.F_state),
        prepare_state("spin_B", plus, spin_params.F_state),
        prepare_photon(("early", "late"), PhotonSource.SINGLE_PHOTON, dim=photon_dim),
    ]
    steps += _node_sequence("spin_A", "early", "late", coeffs, variant, spin_params, losses.insertion)
    steps += _losses(("early", "late"), losses.link)
    steps += _node_sequence("spin_B", "early", "late", coeffs, variant, spin_params, losses.insertion)
    steps.append(mode_mix("early", "late"))
    detectors = [
        Detector("D_early", ("early",), detector_kind),
        Detector("D_late", ("late",), detector_kind),
    ]
    herald = HeraldRule(dict(B_CORRECTIONS[variant]))
    return ProtocolSpec(
        name="B",
        topology=Topology.SENDER_RECEIVER,
        encoding=Encoding.TIME_BIN,
        steps=steps,
        detectors=detectors,
        herald=herald,
        target=BellState.PHI_PLUS,
    )


def protocol_c(
    coeffs: ReflectionCoefficients,
    losses: ArmLosses = ArmLosses(),
    input_source: PhotonSource = PhotonSource.SINGLE_PHOTON,
    wcs_alpha: float = 0.0,
    variant: ReflectionVariant = ReflectionVariant.AMPLITUDE,
    detector_kind: DetectorKind = DetectorKind.CLICK,
    spin_params: SpinChannelParams = SpinChannelParams(),
    photon_dim: Optional[int] = None,
) -> ProtocolSpec:
    """
    Detection-in-midpoint projector protocol

    Each node reflects its own time-bin photon; the photons meet at a
    time-bin Bell measurement that resolves the Ψ± class.

    Args:
        coeffs: per-spin reflection coefficients at the operating point
        losses: insertion loss per node, link loss to the midpoint
        input_source: single photon or weak coherent state
        wcs_alpha: coherent amplitude for the weak coherent input
        variant: amplitude (three-port) or phase (two-port) reflection
        detector_kind: threshold or number-resolving detectors
        spin_params: preparation and gate fidelities
        photon_dim: time-bin mode truncation

    Returns:
        ProtocolSpec heralding Ψ+ on the four two-click patterns

    With phase reflection (∠r_1 − ∠r_0 = π/2) the same-detector patterns
    herald Φ+ and take an X correction.
    """
    input_source = PhotonSource(input_source)
    variant = ReflectionVariant(variant)
    plus = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))
    steps: List[Channel] = []
    for node in ("A", "B"):
        spin, early, late = f"spin_{node}", f"early_{node}", f"late_{node}"
        steps.append(prepare_state(spin, plus, spin_params.F_state))
        steps.append(prepare_photon((early, late), input_source, alpha=wcs_alpha, dim=photon_dim))
        steps += _node_sequence(spin, early, late, coeffs, variant, spin_params, losses.insertion)
        steps += _losses((early, late), losses.link)
    steps.append(mode_mix("early_A", "early_B"))
    steps.append(mode_mix("late_A", "late_B"))
    detectors = [
        Detector("D_early_A", ("early_A",), detector_kind),
        Detector("D_early_B", ("early_B",), detector_kind),
        Detector("D_late_A", ("late_A",), detector_kind),
        Detector("D_late_B", ("late_B",), detector_kind),
    ]
    herald = HeraldRule(dict(C_CORRECTIONS[variant]))
    parameters = {"wcs_alpha": wcs_alpha} if input_source == PhotonSource.WCS else {}
    return ProtocolSpec(
        name="C",
        topology=Topology.DETECTION_IN_MIDPOINT,
        encoding=Encoding.TIME_BIN,
        steps=steps,
        detectors=detectors,
        herald=herald,
        target=BellState.PSI_PLUS,
        input_source=input_source,
        parameters=parameters,
    )


def _swept_key(outcome: ProtocolOutcome) -> Tuple:
    return tuple(sorted(outcome.swept_values.items()))


def pareto(outcomes: Sequence[ProtocolOutcome]) -> List[ProtocolOutcome]:
    """
    Non-dominated outcomes (maximize success, minimize infidelity)

    Error rows are skipped. Among identical (success, infidelity) pairs the
    row with the smallest swept values is kept.

    Returns:
        Frontier sorted by increasing success probability
    """
    valid = [
        o for o in outcomes
        if o.ok and math.isfinite(o.success_probability) and math.isfinite(o.infidelity)
    ]
    ordered = sorted(valid, key=lambda o: (-o.success_probability, o.infidelity, _swept_key(o)))
    frontier = []
    best = math.inf
    for outcome in ordered:
        if outcome.infidelity < best:
            frontier.append(outcome)
            best = outcome.infidelity
    frontier.reverse()
    return frontier
