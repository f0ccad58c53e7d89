"""Photon-exchange rates of junction-coupled modes, dc and driven."""

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcrlab import (DeviceConfig, DriveState, JunctionParams, ModeParams,
                    RatePair, SpectralDensity, effective_temperature,
                    fock_matrix_sq, gamma_dc, gamma_rf, occupation_prob,
                    on_off_ratio, optimal_bias, rf_transition_rates,
                    steady_p1, tabulate_spectrum, transition_rates)
from qcrlab.errors import (GridError, NonpositiveTemperatureError,
                           TruncationError, UndefinedSteadyStateError)
from qcrlab.units import E_CHARGE, HBAR, K_B, R_K, ghz_to_omega

EPS = 1e-9  # quadrature tolerance for the cheaper checks


class TestOccupationProb:
    def test_poisson_value(self):
        d = DriveState(mean_n=2.0, distribution="coherent")
        assert occupation_prob(2, d) == pytest.approx(2.0 * math.exp(-2.0),
                                                      rel=1e-13)

    def test_geometric_value(self):
        d = DriveState(mean_n=1.0, distribution="thermal")
        assert occupation_prob(0, d) == pytest.approx(0.5, rel=1e-13)

    def test_normalized(self):
        for dist in ("coherent", "thermal"):
            d = DriveState(mean_n=3.0, distribution=dist)
            total = sum(occupation_prob(k, d) for k in range(200))
            assert total == pytest.approx(1.0, abs=1e-10)

    def test_zero_drive_is_vacuum(self):
        d = DriveState(mean_n=0.0)
        assert occupation_prob(0, d) == 1.0
        assert occupation_prob(5, d) == 0.0


class TestFockMatrix:
    def test_identity_at_zero_displacement(self):
        assert fock_matrix_sq(3, 3, 0.0) == 1.0
        assert fock_matrix_sq(3, 4, 0.0) == 0.0

    def test_vacuum_values(self):
        rho = 0.37
        x = rho * rho
        assert fock_matrix_sq(0, 0, rho) == pytest.approx(math.exp(-x),
                                                          rel=1e-13)
        assert fock_matrix_sq(0, 1, rho) == pytest.approx(x * math.exp(-x),
                                                          rel=1e-13)

    def test_symmetric(self):
        for k, l in ((0, 4), (2, 7), (5, 5), (10, 3)):
            assert fock_matrix_sq(k, l, 0.6) == pytest.approx(
                fock_matrix_sq(l, k, 0.6), rel=1e-12)

    def test_row_sum_rule(self):
        total = sum(fock_matrix_sq(3, l, 0.7) for l in range(200))
        assert total == pytest.approx(1.0, abs=1e-10)

    @given(st.integers(0, 12), st.integers(0, 12), st.floats(0.0, 1.5))
    def test_bounded_probability(self, k, l, rho):
        val = fock_matrix_sq(k, l, rho)
        assert 0.0 <= val <= 1.0 + 1e-12


class TestTransitionRates:
    def test_zero_bias_detailed_balance(self, junction_50ghz, device,
                                        mode_10ghz):
        r = transition_rates(0.0, mode_10ghz, junction_50ghz, device,
                             epsrel=1e-11)
        boltz = math.exp(-HBAR * mode_10ghz.omega
                         / (K_B * junction_50ghz.temp_n))
        assert r.up / r.down == pytest.approx(boltz, rel=1e-6)

    def test_even_in_bias(self, junction_50ghz, device, mode_10ghz):
        for x in (0.3, 0.8, 1.2):
            v = x * 2.0 * junction_50ghz.delta / E_CHARGE
            ra = transition_rates(v, mode_10ghz, junction_50ghz, device,
                                  epsrel=EPS)
            rb = transition_rates(-v, mode_10ghz, junction_50ghz, device,
                                  epsrel=EPS)
            assert ra.up == pytest.approx(rb.up, rel=1e-12)
            assert ra.down == pytest.approx(rb.down, rel=1e-12)

    def test_down_exceeds_up(self, junction_50ghz, device, mode_10ghz):
        scale = 2.0 * junction_50ghz.delta / E_CHARGE
        for x in np.linspace(0.0, 1.6, 9):
            r = transition_rates(x * scale, mode_10ghz, junction_50ghz,
                                 device, epsrel=EPS)
            assert r.down > r.up >= 0.0

    def test_single_junction_halves_prefactor(self, junction_50ghz,
                                              mode_10ghz):
        # at zero bias both junctions see the same energetics, so the
        # two-junction device doubles the single-junction rates
        one = transition_rates(0.0, mode_10ghz, junction_50ghz,
                               DeviceConfig(junctions=1), epsrel=EPS)
        two = transition_rates(0.0, mode_10ghz, junction_50ghz,
                               DeviceConfig(junctions=2), epsrel=EPS)
        assert two.down == pytest.approx(2.0 * one.down, rel=1e-12)
        assert two.up == pytest.approx(2.0 * one.up, rel=1e-12)

    def test_rates_scale_inversely_with_resistance(self, junction_50ghz,
                                                   device, mode_10ghz):
        from dataclasses import replace
        stiff = replace(junction_50ghz, r_t=2.0 * junction_50ghz.r_t)
        v = 0.9 * junction_50ghz.delta / E_CHARGE
        soft_r = transition_rates(v, mode_10ghz, junction_50ghz, device,
                                  epsrel=EPS)
        stiff_r = transition_rates(v, mode_10ghz, stiff, device,
                                   epsrel=EPS)
        assert soft_r.down == pytest.approx(2.0 * stiff_r.down, rel=1e-12)
        assert soft_r.up == pytest.approx(2.0 * stiff_r.up, rel=1e-12)

    def test_gamma_dc_kinds(self, junction_50ghz, device, mode_10ghz):
        v = 1.2 * junction_50ghz.delta / E_CHARGE
        r = transition_rates(v, mode_10ghz, junction_50ghz, device,
                             epsrel=EPS)
        assert gamma_dc(v, mode_10ghz, junction_50ghz, device,
                        kind="net", epsrel=EPS) == pytest.approx(r.net)
        assert gamma_dc(v, mode_10ghz, junction_50ghz, device,
                        kind="absorption", epsrel=EPS) == pytest.approx(
            r.down)
        assert gamma_dc(v, mode_10ghz, junction_50ghz, device,
                        kind="emission", epsrel=EPS) == pytest.approx(r.up)
        with pytest.raises(ValueError):
            gamma_dc(v, mode_10ghz, junction_50ghz, device, kind="sideways")


class TestSteadyState:
    def test_p1_and_temperature_at_zero_bias(self, junction_50ghz, device,
                                             mode_10ghz):
        r = transition_rates(0.0, mode_10ghz, junction_50ghz, device,
                             epsrel=1e-11)
        t_eff = effective_temperature(r, mode_10ghz.omega)
        assert t_eff == pytest.approx(junction_50ghz.temp_n, rel=1e-6)
        hw = HBAR * mode_10ghz.omega
        expected_p1 = 1.0 / (1.0 + math.exp(hw / (K_B * t_eff)))
        assert steady_p1(r) == pytest.approx(expected_p1, rel=1e-9)

    def test_temperature_requires_net_damping(self):
        with pytest.raises(NonpositiveTemperatureError):
            effective_temperature(RatePair(up=2.0, down=1.0), 1e10)
        with pytest.raises(NonpositiveTemperatureError):
            effective_temperature(RatePair(up=0.0, down=1.0), 1e10)

    def test_p1_undefined_when_rates_vanish(self):
        with pytest.raises(UndefinedSteadyStateError):
            steady_p1(RatePair(up=0.0, down=0.0))


class TestOptimalBias:
    def test_matches_dense_grid_argmin(self, junction_50ghz, device,
                                       mode_10ghz):
        best = optimal_bias(mode_10ghz, junction_50ghz, device, epsrel=EPS)
        span = device.junctions * 2.0 * junction_50ghz.delta / E_CHARGE
        vs = np.linspace(0.0, span, 501)
        temps = []
        for v in vs:
            r = transition_rates(v, mode_10ghz, junction_50ghz, device,
                                 epsrel=EPS)
            try:
                temps.append(effective_temperature(r, mode_10ghz.omega))
            except NonpositiveTemperatureError:
                temps.append(math.inf)
        i = int(np.argmin(temps))
        assert abs(best.voltage - vs[i]) <= vs[1] - vs[0]
        assert best.t_eff <= temps[i] + 1e-12

    def test_on_off_ratio_positive_and_large(self, junction_50ghz, device,
                                             mode_10ghz):
        ratio = on_off_ratio(mode_10ghz, junction_50ghz, device, points=81,
                             epsrel=EPS)
        assert ratio > 1e3


class TestDrivenRates:
    def test_zero_displacement_reduces_to_dc(self, junction_cold, device):
        wp = ghz_to_omega(8.8)
        mode_p = ModeParams(omega=wp, impedance=35.0, alpha=0.5)
        mode_s = ModeParams(omega=2 * wp, impedance=35.0, alpha=0.5,
                            rho=0.0)
        d = DriveState(mean_n=0.0)
        rf = rf_transition_rates(0.0, mode_p, mode_s, d, junction_cold,
                                 device, epsrel=EPS)
        dc = transition_rates(0.0, mode_p, junction_cold, device,
                              epsrel=EPS)
        assert rf == dc  # bitwise: identical quadratures run

    def test_undriven_support_rescales_by_vacuum_overlap(self,
                                                         junction_cold,
                                                         device):
        wp = ghz_to_omega(8.8)
        mode_p = ModeParams(omega=wp, impedance=35.0, alpha=0.5)
        mode_s = ModeParams(omega=2 * wp, impedance=35.0, alpha=0.5)
        d = DriveState(mean_n=0.0)
        g_rf = gamma_rf(0.0, mode_p, mode_s, d, junction_cold, device,
                        epsrel=EPS)
        g_dc = gamma_dc(0.0, mode_p, junction_cold, device, epsrel=EPS)
        rho2 = mode_s.rho_eff ** 2
        assert g_rf == pytest.approx(math.exp(-rho2) * g_dc, rel=1e-3)

    def test_drive_activates_coupling(self, junction_cold, device):
        wp = ghz_to_omega(8.8)
        mode_p = ModeParams(omega=wp, impedance=35.0, alpha=0.5)
        mode_s = ModeParams(omega=2 * wp, impedance=35.0, alpha=0.5)
        base = gamma_rf(0.0, mode_p, mode_s, DriveState(mean_n=0.0),
                        junction_cold, device, epsrel=EPS)
        driven = gamma_rf(0.0, mode_p, mode_s,
                          DriveState(mean_n=1000.0, fock_cut=1300),
                          junction_cold, device, epsrel=EPS)
        assert driven >= 100.0 * base

    def test_sideband_order_converged(self, junction_cold, device):
        wp = ghz_to_omega(8.8)
        mode_p = ModeParams(omega=wp, impedance=35.0, alpha=0.5)
        mode_s = ModeParams(omega=2 * wp, impedance=35.0, alpha=0.5)
        d5 = DriveState(mean_n=3.0, l_max=5, fock_cut=60)
        d8 = DriveState(mean_n=3.0, l_max=8, fock_cut=60)
        g5 = gamma_rf(0.0, mode_p, mode_s, d5, junction_cold, device,
                      epsrel=EPS)
        g8 = gamma_rf(0.0, mode_p, mode_s, d8, junction_cold, device,
                      epsrel=EPS)
        assert g5 == pytest.approx(g8, rel=1e-6)

    def test_undersized_fock_cut_raises(self, junction_cold, device):
        wp = ghz_to_omega(8.8)
        mode_p = ModeParams(omega=wp, impedance=35.0, alpha=0.5)
        mode_s = ModeParams(omega=2 * wp, impedance=35.0, alpha=0.5)
        with pytest.raises(TruncationError):
            gamma_rf(0.0, mode_p, mode_s,
                     DriveState(mean_n=50.0, fock_cut=40), junction_cold,
                     device, epsrel=EPS)


class TestTabulation:
    def test_values_match_pointwise_rates(self, junction_50ghz, device,
                                          mode_10ghz):
        grid = np.geomspace(mode_10ghz.omega / 5, 5 * mode_10ghz.omega, 7)
        v = 1.0 * junction_50ghz.delta / E_CHARGE
        dens = tabulate_spectrum(v, grid, mode_10ghz, junction_50ghz,
                                 device, epsrel=EPS)
        for w, val in zip(grid, dens.values):
            probe = replace(mode_10ghz, omega=float(w))
            assert val == pytest.approx(
                gamma_dc(v, probe, junction_50ghz, device, epsrel=EPS),
                rel=1e-12)

    def test_rejects_bad_grid(self):
        with pytest.raises(GridError):
            SpectralDensity(np.array([2.0, 1.0]), np.array([0.0, 0.0]))
        with pytest.raises(GridError):
            SpectralDensity(np.array([0.0, 1.0]), np.array([0.0, 0.0]))
        with pytest.raises(ValueError):
            SpectralDensity(np.array([1.0, 2.0]), np.array([1.0, -1.0]))


class TestModeParams:
    def test_rho_default(self):
        m = ModeParams(omega=1e10, impedance=35.0, alpha=0.5)
        assert m.rho_eff == pytest.approx(
            0.5 * math.sqrt(math.pi * 35.0 / R_K), rel=1e-13)
        explicit = ModeParams(omega=1e10, impedance=35.0, alpha=0.5,
                              rho=0.02)
        assert explicit.rho_eff == 0.02

    def test_validation(self):
        with pytest.raises(ValueError):
            ModeParams(omega=0.0, impedance=35.0, alpha=0.5)
        with pytest.raises(ValueError):
            ModeParams(omega=1e10, impedance=-1.0, alpha=0.5)
        with pytest.raises(ValueError):
            ModeParams(omega=1e10, impedance=35.0, alpha=1.5)
