"""Rotated-oscillator route to the eigenfamilies and its cross-checks."""

import cmath
import math

import numpy as np
import pytest

from pdml.altspectral import (
    RotatedOscillator,
    htheta_eigenstate,
    htheta_energy,
    phi_n_alt_array,
    psi_n_alt_array,
    rotated_oscillator,
    y_of_x,
)
from pdml.massmodel import constant_mass, exp_up_mass, gaussian_mass, lorentzian_mass
from pdml.numerics import Grid, SampledFunction, fd_derivative, residual_against, simpson_weights
from pdml.spectrum import auto_grid, eigen_En, phi_n_array, psi_n_array
from pdml.system import SystemParams, apply_H

PARAM_GRID = [(-2.0 + 0j, 1.0 + 0j), (-2.0 + 2j, 1.0 + 0j), (-2.0 + 0j, 1.0 + 2j),
              (-2.0 + 2j, 1.0 + 2j), (-1.0 + 0j, 0.0 + 0j), (-2.0 + 1j, 1.0 + 2j)]


class TestChangeOfVariable:
    def test_real_when_gamma_zero(self):
        sys_ = SystemParams(-2.0, 0.0, gaussian_mass(1.0))
        for x in (-1.0, 0.3, 2.0):
            y = y_of_x(sys_, x)
            assert y.imag == 0.0
            assert y.real == pytest.approx(math.sqrt(math.pi / 2.0) * math.erf(x / math.sqrt(2.0)))

    def test_constant_mass_imaginary_shift(self):
        sys_ = SystemParams(-1.0, 1j, constant_mass(1.0))
        assert y_of_x(sys_, 0.0) == pytest.approx(1j)

    def test_gaussian_limit(self):
        sys_ = SystemParams(-2.0, 1.0, gaussian_mass(1.0))
        assert y_of_x(sys_, 40.0) == pytest.approx(math.sqrt(math.pi / 2.0) + 0.5, rel=1e-12)


class TestRotatedOscillator:
    def test_parameters_from_system(self):
        sys_ = SystemParams(-2.0, 1.0, gaussian_mass(1.0), hbar=0.5)
        rot = rotated_oscillator(sys_)
        assert rot.omega == pytest.approx(4.0)
        assert rot.theta == pytest.approx(0.0)

    def test_lambda_reconstruction(self):
        # -lam = |lam| e^{i theta}
        for lam in (-2.0 + 0j, -2.0 + 2j, 1j, 3.0 - 1j):
            sys_ = SystemParams(lam, 0.0, gaussian_mass(1.0))
            rot = rotated_oscillator(sys_)
            assert -abs(lam) * cmath.exp(1j * rot.theta) == pytest.approx(lam, rel=1e-14)

    def test_ground_state_reduces_to_oscillator(self):
        rot = RotatedOscillator(1.0, 0.0, 1.0)
        for y in (-1.0, 0.0, 0.7):
            expected = math.pi ** -0.25 * math.exp(-y * y / 2.0)
            assert htheta_eigenstate(rot, 0, y) == pytest.approx(expected, rel=1e-13)

    def test_first_state_value(self):
        rot = RotatedOscillator(1.0, 0.0, 1.0)
        expected = math.pi ** -0.25 * math.sqrt(2.0) * math.exp(-0.5)
        assert htheta_eigenstate(rot, 1, 1.0) == pytest.approx(expected, rel=1e-13)

    def test_eigenvalue_equation_on_grid(self):
        # (-hbar^2/2 d^2/dy^2 + e^{2 i theta} Omega^2 y^2 / 2) phi_n
        #   = hbar Omega e^{i theta} (n + 1/2) phi_n
        for omega, theta, hbar in ((1.0, 0.0, 1.0), (2.0, -math.pi / 4.0, 1.0), (1.5, 0.3, 0.8)):
            rot = RotatedOscillator(omega, theta, hbar)
            g = Grid(-8.0, 8.0, 3001)
            ys = g.points
            for n in (0, 1, 4):
                state = SampledFunction(g, htheta_eigenstate(rot, n, ys))
                d2 = fd_derivative(state, 2)
                lhs = (-hbar ** 2 / 2.0 * d2.values
                       + cmath.exp(2j * theta) * omega ** 2 / 2.0 * ys ** 2 * state.values)
                rhs = htheta_energy(rot, n) * state.values
                resid = residual_against(SampledFunction(g, lhs, band=d2.band),
                                         SampledFunction(g, rhs), state)
                assert resid < 1e-6, (omega, theta, n, resid)

    def test_gram_identity_at_theta_zero(self):
        rot = RotatedOscillator(1.0, 0.0, 1.0)
        g = Grid(-10.0, 10.0, 3001)
        w = simpson_weights(g.n_points, g.h)
        states = [htheta_eigenstate(rot, n, g.points) for n in range(5)]
        gram = np.array([[np.sum(w * np.conj(a) * b) for b in states] for a in states])
        assert np.max(np.abs(gram - np.eye(5))) < 1e-8


class TestCrossValidation:
    def _ratio_deviation(self, main_vals, alt_vals):
        mask = np.abs(main_vals) >= 1e-2 * np.max(np.abs(main_vals))
        ratio = alt_vals[mask] / main_vals[mask]
        center = np.median(ratio.real) + 1j * np.median(ratio.imag)
        return float(np.max(np.abs(ratio - center)) / abs(center))

    def test_constant_mass_reduction(self):
        sys_ = SystemParams(-1.0, 0.0, constant_mass(1.0))
        xs = np.linspace(-6, 6, 501)
        for n in range(6):
            dev = self._ratio_deviation(phi_n_array(sys_, n, xs, 1.0),
                                        phi_n_alt_array(sys_, n, xs))
            assert dev < 1e-10

    def test_phi_ratio_constant_across_masses_and_params(self):
        for mass in (gaussian_mass(1.0), lorentzian_mass(1.0), exp_up_mass(1.0)):
            for lam, gam in PARAM_GRID:
                sys_ = SystemParams(lam, gam, mass)
                xs = auto_grid(sys_, "residual").points
                for n in range(6):
                    dev = self._ratio_deviation(phi_n_array(sys_, n, xs, 1.0),
                                                phi_n_alt_array(sys_, n, xs))
                    assert dev < 1e-8, (mass.kind, lam, gam, n, dev)

    def test_psi_ratio_constant(self):
        for mass in (gaussian_mass(1.0), lorentzian_mass(1.0)):
            sys_ = SystemParams(-2.0 + 2j, 1.0 + 1j, mass)
            xs = auto_grid(sys_, "residual").points
            for n in range(4):
                dev = self._ratio_deviation(psi_n_array(sys_, n, xs, 1.0),
                                            psi_n_alt_array(sys_, n, xs))
                assert dev < 1e-8

    def test_alt_states_are_eigenstates(self):
        sys_ = SystemParams(-2.0, 1.0, gaussian_mass(1.0))
        g = auto_grid(sys_, "residual")
        for n in (0, 2, 5):
            state = SampledFunction(g, phi_n_alt_array(sys_, n, g.points))
            lhs = apply_H(sys_, state)
            rhs = SampledFunction(g, eigen_En(sys_, n) * state.values)
            assert residual_against(lhs, rhs, state) < 1e-5

    def test_energy_identity_exact(self):
        for lam, gam in PARAM_GRID:
            sys_ = SystemParams(lam, gam, lorentzian_mass(1.0), hbar=1.2)
            rot = rotated_oscillator(sys_)
            for n in range(6):
                lhs = htheta_energy(rot, n) - sys_.hbar ** 2 * sys_.gamma ** 2 / 2.0
                assert abs(lhs - eigen_En(sys_, n)) <= 1e-12 * max(1.0, abs(eigen_En(sys_, n)))

    def test_index_cap(self):
        rot = RotatedOscillator(1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            htheta_eigenstate(rot, 500, 0.0)
