"""
Config-driven protocol construction

Maps a run document plus the swept values of one grid point onto a
ProtocolSpec. Swept names override the matching fixed config values.
Builders and evaluators hold only the parsed config, so they pickle
cleanly into sweep workers.
"""
import logging
from typing import Dict, Mapping, Optional

from rebsim.exceptions import ParameterError, RebsimError
from rebsim.schemas.channel_params import PhotonSource, ReflectionCoefficients
from rebsim.schemas.config import SWEEPABLE, Config, ProtocolKind
from rebsim.schemas.sweep import ProtocolOutcome
from rebsim.schemas.system import CoupledSystem, OperatingPoint
from rebsim.services.cavity import emission_channel_probabilities, reflection_coefficients
from rebsim.services.protocols import (
    ArmLosses,
    ProtocolEngine,
    ProtocolSpec,
    protocol_a,
    protocol_b,
    protocol_c,
)

logger = logging.getLogger(__name__)


class ProtocolBuilder:
    """Builds protocol instances from a run document"""

    def __init__(self, config: Config):
        self.config = config

    def resolve(self, values: Optional[Mapping[str, float]] = None) -> Dict[str, float]:
        """
        Effective scalar parameters at one grid point

        Args:
            values: swept values keyed by sweepable name

        Returns:
            Every sweepable name that has a value, swept or fixed

        Raises:
            ParameterError: for names that cannot be swept
        """
        values = dict(values or {})
        unknown = [name for name in values if name not in SWEEPABLE]
        if unknown:
            raise ParameterError(f"cannot sweep {unknown}; choose from {list(SWEEPABLE)}")
        protocol = self.config.protocol
        device = self.config.device
        resolved = {
            "alpha": protocol.alpha,
            "wcs_alpha": protocol.wcs_alpha,
            "delta_la": protocol.delta_la_ghz,
            "delta_ac": device.delta_ac_ghz,
            "link_loss": self.config.losses.link,
            "insertion_loss": self.config.losses.insertion,
        }
        resolved.update(values)
        return resolved

    def system(self, values: Optional[Mapping[str, float]] = None) -> CoupledSystem:
        """Device of the configured protocol with swept detuning, coupling and decay applied"""
        values = values or {}
        system = self.config.device.to_system()
        if "delta_ac" in values:
            system = system.with_cavity_detuning(values["delta_ac"])
        if "g" in values or "kappa" in values:
            system = system.scaled(g=values.get("g"), kappa=values.get("kappa"))
        return system

    def losses(self, values: Optional[Mapping[str, float]] = None) -> ArmLosses:
        resolved = self.resolve(values)
        convention = self.config.losses
        return ArmLosses(
            link=convention.loss_fraction(resolved["link_loss"]),
            insertion=convention.loss_fraction(resolved["insertion_loss"]),
        )

    def coefficients(self, values: Optional[Mapping[str, float]] = None) -> ReflectionCoefficients:
        """Per-spin (r, t, l) at the resolved laser detuning"""
        system = self.system(values)
        delta_la = self.resolve(values)["delta_la"]
        return reflection_coefficients(system, OperatingPoint.from_laser_detuning(system, delta_la))

    def build(self, values: Optional[Mapping[str, float]] = None) -> ProtocolSpec:
        """
        Protocol instance for one grid point

        Args:
            values: swept values; missing names take their config value

        Returns:
            ProtocolSpec whose ``parameters`` are the swept values
        """
        values = dict(values or {})
        protocol = self.config.protocol
        numerics = self.config.numerics
        resolved = self.resolve(values)
        losses = self.losses(values)

        if protocol.kind == ProtocolKind.A:
            spec = protocol_a(
                alpha=resolved["alpha"],
                emission=emission_channel_probabilities(self.system(values)),
                losses=losses,
                detector_kind=protocol.detector,
                spin_params=protocol.spin,
                photon_dim=numerics.fock_dim,
                incoh_dim=numerics.incoherent_fock_dim,
            )
        elif protocol.kind == ProtocolKind.B:
            spec = protocol_b(
                coeffs=self.coefficients(values),
                losses=losses,
                variant=protocol.reflection,
                detector_kind=protocol.detector,
                spin_params=protocol.spin,
                photon_dim=numerics.fock_dim,
            )
        else:
            wcs = protocol.input_source == PhotonSource.WCS
            spec = protocol_c(
                coeffs=self.coefficients(values),
                losses=losses,
                input_source=protocol.input_source,
                wcs_alpha=resolved["wcs_alpha"],
                variant=protocol.reflection,
                detector_kind=protocol.detector,
                spin_params=protocol.spin,
                photon_dim=numerics.wcs_fock_dim if wcs else numerics.fock_dim,
            )
        spec.parameters = values
        return spec

    def protocol_a(self, alpha: float) -> ProtocolSpec:
        """Protocol A on the emission device at bright population ``alpha``"""
        return self._with_kind(ProtocolKind.A).build({"alpha": alpha})

    def protocol_b(self, delta_la: float, delta_ac: float) -> ProtocolSpec:
        """Protocol B on the projector device at the given detunings (GHz)"""
        return self._with_kind(ProtocolKind.B).build({"delta_la": delta_la, "delta_ac": delta_ac})

    def protocol_c(
        self,
        delta_la: float,
        delta_ac: float,
        input_source: PhotonSource = PhotonSource.SINGLE_PHOTON,
    ) -> ProtocolSpec:
        """Protocol C on the projector device at the given detunings (GHz)"""
        builder = self._with_kind(ProtocolKind.C, input_source=PhotonSource(input_source))
        return builder.build({"delta_la": delta_la, "delta_ac": delta_ac})

    def _with_kind(self, kind: ProtocolKind, **update) -> "ProtocolBuilder":
        if self.config.protocol.kind == kind and not update:
            return self
        protocol = self.config.protocol.model_copy(update={"kind": kind, "device": None, **update})
        return ProtocolBuilder(self.config.model_copy(update={"protocol": protocol}))


class ProtocolEvaluator:
    """
    One grid point in, one outcome row out

    Library failures become error rows; anything else propagates.
    """

    def __init__(self, config: Config):
        self.config = config
        self.builder = ProtocolBuilder(config)
        self.engine = ProtocolEngine()

    def __call__(self, values: Optional[Mapping[str, float]] = None) -> ProtocolOutcome:
        values = dict(values or {})
        # workers start from fresh process settings
        self.config.numerics.apply()
        try:
            spec = self.builder.build(values)
            return self.engine.run(spec, values)
        except RebsimError as exc:
            logger.debug("point %s failed: %s", values, exc)
            return ProtocolOutcome.failed(values, f"{type(exc).__name__}: {exc}")
