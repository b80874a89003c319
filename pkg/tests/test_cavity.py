"""
Tests for the cavity-QED model and the beamsplitter synthesis
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from rebsim.exceptions import ParameterError
from rebsim.schemas.config import DeviceProfile
from rebsim.schemas.system import OperatingPoint
from rebsim.services.cavity import (
    LinewidthMode,
    collection_efficiency,
    cooperativity,
    emission_channel_probabilities,
    empty_cavity_reflection,
    mode_volume_for,
    modified_debye_waller,
    modified_quantum_efficiency,
    outcoupling_efficiency_strong,
    purcell_factor,
    purcell_from_qv,
    quality_factor,
    reflection_coefficients,
    response_coefficients,
    scattering_channel_amplitudes,
)
from rebsim.services.synthesis import synthesize_three_port, synthesize_two_port


def _empty_cavity(kappa_r, kappa_t=0.0, kappa_l=0.0):
    return DeviceProfile(
        gamma_mhz=92.5, g_ghz=0.0, kappa_r_ghz=kappa_r, kappa_t_ghz=kappa_t, kappa_l_ghz=kappa_l
    ).to_system()


class TestDeviceProfiles:
    def test_projector_cooperativity(self, projector_system):
        assert cooperativity(projector_system, LinewidthMode.DEPHASED) == pytest.approx(105, abs=1)

    def test_emission_cooperativity(self, emission_system):
        assert cooperativity(emission_system, LinewidthMode.DEPHASED) == pytest.approx(4.3, abs=0.1)

    def test_bare_cooperativity_exceeds_dephased(self, projector_system):
        bare = cooperativity(projector_system, LinewidthMode.BARE)
        assert bare > cooperativity(projector_system, LinewidthMode.DEPHASED)

    def test_emission_purcell_factor(self, emission_system):
        assert purcell_factor(emission_system) == pytest.approx(43.04, rel=1e-3)

    def test_outcoupling_efficiency(self, emission_system):
        assert outcoupling_efficiency_strong(emission_system) == pytest.approx(0.729, abs=1e-3)

    def test_quality_factors(self, projector_system, emission_system):
        assert quality_factor(projector_system) == pytest.approx(18656, rel=1e-3)
        assert quality_factor(emission_system) == pytest.approx(1236, rel=1e-3)

    def test_emission_probabilities(self, emission_system):
        params = emission_channel_probabilities(emission_system)
        assert params.p_coh == pytest.approx(0.481, abs=2e-3)
        assert params.p_incoh == pytest.approx(0.026, abs=1e-3)
        assert params.p_coh + params.p_incoh + params.p_loss == pytest.approx(1.0)

    def test_zero_coupling(self, projector_system):
        uncoupled = projector_system.scaled(g=0.0)
        assert cooperativity(uncoupled) == 0.0
        assert purcell_factor(uncoupled) == 0.0

    @pytest.mark.parametrize("s", [0.3, 2.0, 7.5])
    def test_figures_of_merit_depend_on_g_squared_over_kappa(self, emission_system, s):
        scaled = emission_system.scaled(g=s * emission_system.g, kappa=s ** 2 * emission_system.cavity.kappa)
        for mode in LinewidthMode:
            assert cooperativity(scaled, mode) == pytest.approx(cooperativity(emission_system, mode), rel=1e-12)
        assert purcell_factor(scaled) == pytest.approx(purcell_factor(emission_system), rel=1e-12)
        before, after = emission_channel_probabilities(emission_system), emission_channel_probabilities(scaled)
        assert after.p_coh == pytest.approx(before.p_coh, rel=1e-12)
        assert after.p_incoh == pytest.approx(before.p_incoh, rel=1e-12)

    def test_no_decay_rejected(self):
        system = DeviceProfile(gamma_mhz=92.5, g_ghz=1.0, kappa_r_ghz=0.0).to_system()
        with pytest.raises(ParameterError):
            cooperativity(system)

    def test_unit_normalization(self, projector_system):
        assert projector_system.emitter.omega_a == pytest.approx(406706.0)
        assert projector_system.emitter.gamma == pytest.approx(0.0925)
        assert projector_system.cavity.kappa == pytest.approx(21.8)


class TestDerivedQuantities:
    def test_mode_volume_inverts_purcell(self, projector_system):
        n = 2.4
        volume = mode_volume_for(projector_system, n)
        Q = quality_factor(projector_system)
        assert purcell_from_qv(Q, volume, n) == pytest.approx(purcell_factor(projector_system))

    def test_modified_factors_bounded(self, emission_system):
        assert 0.0 < modified_debye_waller(emission_system) <= 1.0
        assert 0.0 < modified_quantum_efficiency(emission_system) <= 1.0
        assert modified_debye_waller(emission_system) > emission_system.emitter.DW

    def test_scattering_amplitudes(self, emission_system):
        params = scattering_channel_amplitudes(emission_system, 0.2)
        eta = collection_efficiency(emission_system)
        assert params.alpha == pytest.approx(eta * 0.2)
        assert params.alpha_L == pytest.approx((1 - eta) * 0.2)
        assert params.beta_sq > 0.0


class TestReflectionLimits:
    def test_critically_coupled_empty_cavity_on_resonance(self):
        system = _empty_cavity(10.9, kappa_t=10.9)
        op = OperatingPoint(nu=system.cavity.omega_c)
        r, t, l = response_coefficients(system, op, 1)
        assert abs(r) == pytest.approx(0.0, abs=1e-9)
        assert abs(t) == pytest.approx(1.0, abs=1e-9)
        assert abs(empty_cavity_reflection(system, op)) == pytest.approx(0.0, abs=1e-9)

    def test_lossless_single_sided_cavity_on_resonance(self):
        system = _empty_cavity(21.8)
        op = OperatingPoint(nu=system.cavity.omega_c)
        r, _, _ = response_coefficients(system, op, 0)
        assert r == pytest.approx(-1.0, abs=1e-9)
        assert empty_cavity_reflection(system, op) == pytest.approx(-1.0, abs=1e-9)

    def test_far_detuned_reflection(self, projector_system):
        op = OperatingPoint(nu=projector_system.cavity.omega_c + 1e12)
        for k in (0, 1):
            r, _, _ = response_coefficients(projector_system, op, k)
            assert r == pytest.approx(1.0, abs=1e-9)

    def test_strong_coupling_separates_spin_states(self, projector_system):
        op = OperatingPoint.from_laser_detuning(projector_system, 0.0)
        coeffs = reflection_coefficients(projector_system, op)
        assert abs(coeffs.r[1]) > 0.9
        assert abs(coeffs.r[1]) > abs(coeffs.r[0])

    def test_invalid_spin_state(self, projector_system):
        op = OperatingPoint.from_laser_detuning(projector_system, 0.0)
        with pytest.raises(ParameterError):
            response_coefficients(projector_system, op, 2)


@hyp_settings(max_examples=60, deadline=None)
@given(
    g=st.floats(0.0, 20.0),
    kappa_r=st.floats(0.5, 300.0),
    kappa_t=st.floats(0.0, 50.0),
    kappa_l=st.floats(0.0, 100.0),
    delta_ac=st.floats(-120.0, 120.0),
    delta_la=st.floats(-30.0, 30.0),
)
def test_response_is_passive(g, kappa_r, kappa_t, kappa_l, delta_ac, delta_la):
    system = DeviceProfile(
        gamma_mhz=92.5,
        g_ghz=g,
        kappa_r_ghz=kappa_r,
        kappa_t_ghz=kappa_t,
        kappa_l_ghz=kappa_l,
        delta_ac_ghz=delta_ac,
    ).to_system()
    op = OperatingPoint.from_laser_detuning(system, delta_la)
    for k in (0, 1):
        r, t, l = response_coefficients(system, op, k)
        assert abs(r) ** 2 + abs(t) ** 2 + abs(l) ** 2 == pytest.approx(1.0, abs=1e-9)


def _random_triple(rng):
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return complex(v[0]), complex(v[1]), complex(v[2])


class TestSynthesis:
    def test_three_port_oracle(self, rng):
        for _ in range(1000):
            r, t, l = _random_triple(rng)
            synthesis = synthesize_three_port(r, t, l)
            u = synthesis.unitary(2)
            assert np.max(np.abs(u.conj().T @ u - np.eye(8))) < 1e-10
            out = synthesis.single_photon_amplitudes()
            assert np.max(np.abs(np.array(out) - np.array([r, t, l]))) < 1e-10

    @pytest.mark.parametrize("dim", [3, 4])
    def test_three_port_unitary_in_larger_truncation(self, rng, dim):
        synthesis = synthesize_three_port(*_random_triple(rng))
        u = synthesis.unitary(dim)
        assert np.max(np.abs(u.conj().T @ u - np.eye(dim ** 3))) < 1e-10

    def test_two_port_amplitudes(self):
        r = 0.6 * np.exp(0.7j)
        synthesis = synthesize_two_port(r, 0.8, l_phase=-0.2)
        out_r, out_l = synthesis.single_photon_amplitudes()
        assert out_r == pytest.approx(r, abs=1e-12)
        assert out_l == pytest.approx(0.8 * np.exp(-0.2j), abs=1e-12)

    def test_two_port_rejects_transmission(self):
        with pytest.raises(ParameterError):
            synthesize_two_port(0.5, 0.5)

    def test_three_port_rejects_unnormalized(self):
        with pytest.raises(ParameterError):
            synthesize_three_port(0.5, 0.5, 0.5)

    def test_all_loss(self):
        synthesis = synthesize_three_port(0, 0, 1)
        assert synthesis.theta1 == pytest.approx(math.pi / 2)
