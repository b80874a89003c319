"""
Tests for the channel library
"""
import itertools
import math

import numpy as np
import pytest

from rebsim.config import settings
from rebsim.exceptions import (
    CompositionError,
    DimensionMismatchError,
    ParameterError,
    TruncationError,
)
from rebsim.models import ModeLabel, NamedState, partial_trace, tensor_product
from rebsim.models.channel import DeclareModes, kraus_completeness
from rebsim.models.operators import beamsplitter, phase_shift, poisson_weights
from rebsim.schemas.channel_params import (
    DetectorKind,
    EmissionChannelParams,
    PhotonSource,
    ReflectionCoefficients,
    ReflectionVariant,
    ScatterChannelParams,
)
from rebsim.services.channels import (
    depolarize_one,
    depolarize_two,
    detect,
    emit_spontaneous,
    mode_mix,
    photonic_loss,
    prepare_photon,
    prepare_state,
    reflect_conditional,
    rotate_spin,
    scatter_coherent,
    spdc_pair,
)
from rebsim.services.synthesis import loss_angle


def _fock_superposition(name="a", dim=3):
    ket = np.ones(dim) / np.sqrt(dim)
    return NamedState.from_ket(ket, (ModeLabel.photon(name, dim),))


def _photon(name, dim=3, n=1):
    return NamedState.basis((ModeLabel.photon(name, dim),), (n,))


class TestPhotonicLoss:
    @pytest.mark.parametrize("l1,l2", [(0.1, 0.2), (0.5, 0.5), (0.9, 0.3), (0.0, 0.7)])
    def test_losses_compose_multiplicatively(self, l1, l2):
        state = _fock_superposition()
        twice = photonic_loss("a", l2)(photonic_loss("a", l1)(state))
        once = photonic_loss("a", 1 - (1 - l1) * (1 - l2))(state)
        np.testing.assert_allclose(twice.matrix, once.matrix, atol=1e-12)

    def test_single_photon_survival(self):
        out = photonic_loss("a", 0.3)(_photon("a"))
        np.testing.assert_allclose(out.mode_populations("a"), [0.3, 0.7, 0.0], atol=1e-12)

    def test_total_loss_leaves_vacuum(self):
        out = photonic_loss("a", 1.0)(_photon("a", n=2))
        assert out.mode_populations("a")[0] == pytest.approx(1.0, abs=1e-12)

    def test_out_of_range(self):
        with pytest.raises(ParameterError):
            photonic_loss("a", 1.5)

    @pytest.mark.parametrize("L", np.round(np.arange(0.01, 1.0, 0.01), 2))
    def test_loss_angle_identity(self, L):
        assert loss_angle(L) == pytest.approx(math.asin(math.sqrt(L)), abs=1e-12)

    def test_kraus_completeness(self):
        channel = photonic_loss("a", 0.37)
        ops = channel.operators(_photon("a", dim=4))
        np.testing.assert_allclose(kraus_completeness(ops), np.eye(4), atol=1e-9)


class TestDepolarizing:
    def test_single_qubit_fixed_point(self, plus_state):
        out = depolarize_one("q", 0.25)(plus_state)
        np.testing.assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-12)

    def test_two_qubit_fixed_point(self):
        labels = (ModeLabel.spin("a"), ModeLabel.spin("b"))
        state = NamedState.basis(labels, (0, 1))
        out = depolarize_two("a", "b", 1 / 16)(state)
        np.testing.assert_allclose(out.matrix, np.eye(4) / 4, atol=1e-12)

    def test_unit_fidelity_is_identity(self, plus_state):
        out = depolarize_one("q", 1.0)(plus_state)
        np.testing.assert_allclose(out.matrix, plus_state.matrix)

    def test_fidelity_out_of_range(self):
        with pytest.raises(ParameterError):
            depolarize_one("q", 1.2)


class TestSpinGates:
    def test_prepare_with_imperfect_fidelity(self):
        state = prepare_state("q", (1, 0), F_state=0.9)(NamedState.vacuum())
        np.testing.assert_allclose(np.diag(state.matrix).real, [0.9, 0.1], atol=1e-12)

    def test_prepare_replaces_existing_spin(self):
        state = prepare_state("q", (0, 1))(NamedState.basis((ModeLabel.spin("q"),), (0,)))
        np.testing.assert_allclose(state.mode_populations("q"), [0, 1], atol=1e-12)

    def test_x_gate_flips(self):
        state = NamedState.basis((ModeLabel.spin("q"),), (0,))
        out = rotate_spin("q", "X")(state)
        np.testing.assert_allclose(out.mode_populations("q"), [0, 1], atol=1e-12)

    def test_noisy_gate_composes_depolarizing(self):
        channel = rotate_spin("q", "H", F1=0.25)
        out = channel(NamedState.basis((ModeLabel.spin("q"),), (0,)))
        np.testing.assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-12)

    def test_unknown_gate(self):
        with pytest.raises(ParameterError):
            rotate_spin("q", "T")


class TestModeMix:
    def test_hong_ou_mandel_dip(self):
        state = tensor_product(_photon("a"), _photon("b"))
        out = mode_mix("a", "b")(state)
        populations = np.real(np.diag(out.matrix)).reshape(3, 3)
        assert populations[1, 1] == pytest.approx(0.0, abs=1e-12)
        assert populations[2, 0] == pytest.approx(0.5, abs=1e-12)
        assert populations[0, 2] == pytest.approx(0.5, abs=1e-12)

    def test_sign_convention(self):
        state = tensor_product(_photon("a", dim=2), _photon("b", dim=2, n=0))
        out = mode_mix("a", "b", theta=0.3)(state)
        assert out.mode_populations("a")[1] == pytest.approx(math.cos(0.3) ** 2)
        assert out.mode_populations("b")[1] == pytest.approx(math.sin(0.3) ** 2)

    def test_two_balanced_mixes_swap_up_to_phases(self):
        dim = 3
        twice = np.linalg.matrix_power(beamsplitter(math.pi / 4, dim, dim), 2)
        swap = np.zeros((dim * dim, dim * dim))
        for n, m in itertools.product(range(dim), repeat=2):
            swap[m * dim + n, n * dim + m] = 1.0
        expected = swap @ np.kron(np.eye(dim), phase_shift(math.pi, dim))
        # exact below the truncation edge
        kept = [n * dim + m for n, m in itertools.product(range(dim), repeat=2) if n + m < dim]
        np.testing.assert_allclose(twice[:, kept], expected[:, kept], atol=1e-10)

    def test_two_balanced_mixes_move_the_photon(self):
        state = tensor_product(_photon("a"), _photon("b", n=0))
        out = mode_mix("a", "b")(mode_mix("a", "b")(state))
        np.testing.assert_allclose(out.mode_populations("b"), [0, 1, 0], atol=1e-12)
        np.testing.assert_allclose(out.mode_populations("a"), [1, 0, 0], atol=1e-12)

    def test_unequal_truncation(self):
        state = tensor_product(_photon("a", dim=2), _photon("b", dim=3))
        with pytest.raises(DimensionMismatchError):
            mode_mix("a", "b")(state)


class TestDetection:
    def test_vacuum_never_clicks(self):
        out = detect("a")(_photon("a", n=0))
        assert out.trace == pytest.approx(0.0, abs=1e-15)
        assert not out.has_mode("a")

    def test_single_photon_always_clicks(self):
        assert detect("a")(_photon("a")).trace == pytest.approx(1.0)

    def test_no_click_outcome(self):
        assert detect("a", clicked=False)(_photon("a", n=0)).trace == pytest.approx(1.0)

    def test_number_resolving_rejects_two_photons(self):
        state = _photon("a", n=2)
        assert detect("a", DetectorKind.CLICK)(state).trace == pytest.approx(1.0)
        assert detect("a", DetectorKind.SINGLE_PHOTON)(state).trace == pytest.approx(0.0)

    def test_port_of_several_modes(self):
        state = tensor_product(_photon("a", dim=2, n=0), _photon("b", dim=2))
        assert detect(("a", "b"))(state).trace == pytest.approx(1.0)
        assert detect(("a", "b"), clicked=False)(state).trace == pytest.approx(0.0)

    def test_click_probabilities_sum_to_trace(self):
        state = photonic_loss("a", 0.4)(_fock_superposition())
        total = detect("a")(state).trace + detect("a", clicked=False)(state).trace
        assert total == pytest.approx(state.trace, abs=1e-12)


class TestSources:
    def test_time_bin_single_photon(self):
        state = prepare_photon(("E", "L"))(NamedState.vacuum())
        assert state.trace == pytest.approx(1.0)
        np.testing.assert_allclose(state.mode_populations("E"), [0.5, 0.5, 0.0], atol=1e-12)

    def test_weak_coherent_needs_four_levels(self):
        with pytest.raises(DimensionMismatchError):
            prepare_photon(("E", "L"), PhotonSource.WCS, alpha=0.1, dim=3)

    def test_weak_coherent_leakage_guard(self):
        with pytest.raises(TruncationError):
            prepare_photon(("E", "L"), PhotonSource.WCS, alpha=2.0, dim=4)

    def test_weak_coherent_populations(self):
        alpha = 0.2
        state = prepare_photon(("E", "L"), PhotonSource.WCS, alpha=alpha, dim=4)(NamedState.vacuum())
        mean = alpha ** 2 / 2
        assert state.mode_populations("E")[1] == pytest.approx(mean * math.exp(-mean), rel=1e-3)

    def test_spdc_pair_is_normalized(self):
        state = spdc_pair(0.05)(NamedState.vacuum())
        assert state.trace == pytest.approx(1.0)
        np.testing.assert_allclose(state.mode_populations("a_H"), state.mode_populations("b_V"), atol=1e-12)

    def test_spdc_pair_amplitude_and_heralded_pair(self):
        dim = 3
        zeta = 0.05 * np.exp(0.4j)
        state = spdc_pair(zeta, dim=dim)(NamedState.vacuum()).reorder(["a_H", "a_V", "b_H", "b_V"])
        rho = state.matrix

        def index(*occupation):
            return int(np.ravel_multi_index(occupation, (dim,) * 4))

        vacuum = index(0, 0, 0, 0)
        ratio = rho[index(1, 0, 0, 1), vacuum] / rho[vacuum, vacuum]
        assert ratio == pytest.approx(np.tanh(0.05) * np.exp(0.4j), abs=1e-12)
        assert abs(ratio - zeta) < 1e-4

        one_each = [
            index(*o) for o in itertools.product(range(dim), repeat=4) if o[0] + o[1] == 1 and o[2] + o[3] == 1
        ]
        target = np.zeros(dim ** 4)
        target[[index(1, 0, 0, 1), index(0, 1, 1, 0)]] = 1 / math.sqrt(2)
        heralded = sum(rho[i, i] for i in one_each).real
        assert (target @ rho @ target).real / heralded == pytest.approx(1.0, abs=1e-12)

    def test_spdc_pair_leakage_guard(self):
        with pytest.raises(TruncationError):
            spdc_pair(1.5)


class TestEmission:
    def _spin(self, c0, c1):
        return NamedState.from_ket([c0, c1], (ModeLabel.spin("q"),))

    def test_bright_state_emits(self):
        params = EmissionChannelParams(p_coh=0.6, p_incoh=0.1, p_loss=0.3)
        out = emit_spontaneous("q", "p", "n", params)(self._spin(0, 1))
        assert out.trace == pytest.approx(1.0)
        assert out.mode_populations("p")[1] == pytest.approx(0.6)
        assert out.mode_populations("n")[1] == pytest.approx(0.1)

    def test_dark_state_is_silent(self):
        params = EmissionChannelParams(p_coh=1.0)
        out = emit_spontaneous("q", "p", "n", params)(self._spin(1, 0))
        assert out.mode_populations("p")[0] == pytest.approx(1.0)

    def test_coherent_emission_entangles(self):
        s = 1 / math.sqrt(2)
        out = emit_spontaneous("q", "p", "n", EmissionChannelParams(p_coh=1.0))(self._spin(s, s))
        reduced = partial_trace(out, ["n"]).reorder(["q", "p"])
        ket = np.zeros(6)
        ket[0] = ket[4] = s  # |0,0⟩ and |1,1⟩
        np.testing.assert_allclose(reduced.matrix, np.outer(ket, ket), atol=1e-12)

    def test_occupied_output_mode_rejected(self):
        state = tensor_product(self._spin(0, 1), _photon("p"))
        with pytest.raises(ParameterError):
            emit_spontaneous("q", "p", "n", EmissionChannelParams(p_coh=1.0))(state)

    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(ValueError):
            EmissionChannelParams(p_coh=0.7, p_incoh=0.7)


class TestScattering:
    def test_loss_overlap_dephases_spin(self, plus_state):
        params = ScatterChannelParams(alpha=0, alpha_L=1.0, beta_sq=0.0)
        out = scatter_coherent("q", "p", "loss", "n", params)(plus_state)
        spin = partial_trace(out, ["p", "n"])
        assert spin.matrix[0, 1].real == pytest.approx(0.5 * math.exp(-0.5), abs=1e-12)
        assert spin.trace == pytest.approx(1.0, abs=1e-12)

    def test_incoherent_photons_are_poissonian(self):
        settings.LEAKAGE_THRESHOLD = 1e-3
        params = ScatterChannelParams(alpha=0, alpha_L=0, beta_sq=0.2)
        state = NamedState.basis((ModeLabel.spin("q"),), (1,))
        out = scatter_coherent("q", "p", "loss", "n", params, incoh_dim=6)(state)
        expected, _ = poisson_weights(0.2, 6)
        np.testing.assert_allclose(out.mode_populations("n"), expected / expected.sum(), atol=1e-12)

    def test_coherent_amplitude_displaces_bright_state(self):
        params = ScatterChannelParams(alpha=0.1, alpha_L=0, beta_sq=0.0)
        state = NamedState.basis((ModeLabel.spin("q"),), (1,))
        out = scatter_coherent("q", "p", "loss", "n", params, photon_dim=4)(state)
        assert out.mode_populations("p")[1] == pytest.approx(0.01 * math.exp(-0.01), rel=1e-6)


class TestReflection:
    def _spin_photon(self, dim=3):
        s = 1 / math.sqrt(2)
        spin = NamedState.from_ket([s, s], (ModeLabel.spin("q"),))
        return tensor_product(spin, _photon("a", dim))

    def test_phase_flip_rotates_spin(self):
        coeffs = ReflectionCoefficients.phase_only(1, -1)
        out = reflect_conditional("q", "a", coeffs, ReflectionVariant.PHASE)(self._spin_photon())
        spin = partial_trace(out, ["a"])
        s = 1 / math.sqrt(2)
        minus = np.array([s, -s])
        np.testing.assert_allclose(spin.matrix, np.outer(minus, minus), atol=1e-12)

    def test_amplitude_routing(self, ideal_coefficients):
        channel = reflect_conditional("q", "a", ideal_coefficients, ReflectionVariant.AMPLITUDE, "t")
        out = channel(self._spin_photon())
        assert out.trace == pytest.approx(1.0, abs=1e-12)
        assert out.mode_populations("a")[1] == pytest.approx(0.5, abs=1e-12)

    def test_retained_transmission(self):
        coeffs = ReflectionCoefficients(r=(0, 1), t=(1, 0), l=(0, 0))
        channel = reflect_conditional(
            "q", "a", coeffs, ReflectionVariant.AMPLITUDE, "t", retain_transmit=True
        )
        assert "t" in channel.declares
        out = channel(self._spin_photon())
        assert out.mode_populations("t")[1] == pytest.approx(0.5, abs=1e-12)
        assert out.mode_populations("a")[1] == pytest.approx(0.5, abs=1e-12)

    def test_amplitude_needs_transmit_mode(self, ideal_coefficients):
        with pytest.raises(ParameterError):
            reflect_conditional("q", "a", ideal_coefficients, ReflectionVariant.AMPLITUDE)

    def test_reflection_is_trace_preserving(self):
        r0, r1 = 0.6 * np.exp(0.3j), 0.8 * np.exp(-1.1j)
        t0, t1 = 0.5j, 0.2
        l0 = math.sqrt(1 - abs(r0) ** 2 - abs(t0) ** 2)
        l1 = math.sqrt(1 - abs(r1) ** 2 - abs(t1) ** 2)
        coeffs = ReflectionCoefficients(r=(r0, r1), t=(t0, t1), l=(l0, l1))
        channel = reflect_conditional("q", "a", coeffs, ReflectionVariant.AMPLITUDE, "t")
        state = self._spin_photon()
        np.testing.assert_allclose(
            kraus_completeness(channel.operators(state)), np.eye(6), atol=1e-9
        )


class TestComposition:
    def test_sequence_requirements(self):
        pipeline = mode_mix("a", "b").then(detect("a")).then(detect("b"))
        assert pipeline.requires == frozenset({"a", "b"})
        assert pipeline.consumes == frozenset({"a", "b"})

    def test_declared_modes_satisfy_later_steps(self):
        pipeline = DeclareModes((ModeLabel.photon("b", 3),)).then(mode_mix("a", "b"))
        assert pipeline.requires == frozenset({"a"})

    def test_emission_declares_its_outputs(self):
        channel = emit_spontaneous("q", "p", "n", EmissionChannelParams(p_coh=1.0))
        assert channel.requires == frozenset({"q"})
        assert channel.declares == frozenset({"p", "n"})

    def test_only_emission_truncation_is_exact(self):
        emission = emit_spontaneous("q", "p", "n", EmissionChannelParams(p_coh=1.0))
        scattering = scatter_coherent("q", "p", "loss", "n", ScatterChannelParams(alpha=0.1))
        assert emission.exact_modes == frozenset({"n"})
        assert scattering.exact_modes == frozenset()
        assert emission.then(scattering).exact_modes == frozenset({"n"})

    def test_missing_mode_at_runtime(self):
        with pytest.raises(KeyError):
            mode_mix("a", "b")(_photon("a"))

    def test_duplicate_source_modes(self):
        state = prepare_photon(("E", "L"))(NamedState.vacuum())
        with pytest.raises(CompositionError):
            tensor_product(state, state)
