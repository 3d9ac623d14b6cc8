"""Kinematics tests: closed-form coefficients against the recursion, the
Wronskian-type constant, the unimodular factors, and the independent
continuum-overlap quadrature. Frozen literals are computed inside the
tests from their defining expressions.
"""

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import quad

from jmatrix.basis import ChannelSpec, basis_norm, j_matrix
from jmatrix.errors import UnsupportedChannelError
from jmatrix.kinematics import (
    cosine_coefficients,
    energy_point,
    kinematic_table,
    recursion_residual,
    sine_coefficients,
    sine_overlap_quadrature,
)
from jmatrix.numerics import laguerre_eval


class TestEnergyPoint:
    def test_band_center_angle(self, channel):
        point = energy_point(3.125, channel)
        assert point.k == pytest.approx(2.5, rel=1e-15)
        assert point.theta == pytest.approx(math.pi / 2.0, rel=1e-15)
        assert point.cos_theta == 0.0
        assert point.sin_theta == 1.0

    def test_angle_identity_and_monotonicity(self, channel):
        energies = np.linspace(0.05, 40.0, 120)
        thetas = []
        for e in energies:
            p = energy_point(float(e), channel)
            assert abs(p.cos_theta ** 2 + p.sin_theta ** 2 - 1.0) < 1e-14
            assert p.sin_theta > 0.0
            thetas.append(p.theta)
        assert np.all(np.diff(thetas) < 0.0)  # theta decreases toward 0

    def test_validation(self, channel):
        with pytest.raises(ValueError):
            energy_point(0.0, channel)
        with pytest.raises(UnsupportedChannelError, match="Coulomb"):
            energy_point(1.0, ChannelSpec(lam=5.0, ell=0, charge=1.0))


class TestCoefficients:
    def test_band_center_values(self, channel):
        # s_0 = sqrt(2 / (pi k lam)), s_1 = 0, c_0 = 0, c_1 = +sqrt(1/(pi k lam))
        point = energy_point(3.125, channel)
        s = sine_coefficients(point, 4)
        c = cosine_coefficients(point, 4)
        s0_expected = math.sqrt(2.0 / (math.pi * 2.5 * 5.0))
        assert s[0] == pytest.approx(s0_expected, rel=1e-14)
        assert s[0] == pytest.approx(0.225676, abs=5e-7)
        assert abs(s[1]) < 1e-15
        assert abs(c[0]) < 1e-15
        assert c[1] == pytest.approx(math.sqrt(1.0 / (math.pi * 2.5 * 5.0)),
                                     rel=1e-14)
        assert c[1] == pytest.approx(0.159577, abs=5e-7)

    def test_swave_only(self, channel):
        point = energy_point(1.0, ChannelSpec(lam=5.0, ell=1, charge=0.0))
        with pytest.raises(UnsupportedChannelError, match="s-wave"):
            sine_coefficients(point, 3)
        with pytest.raises(UnsupportedChannelError, match="s-wave"):
            cosine_coefficients(point, 3)

    @pytest.mark.parametrize("lam", [1.0, 5.0])
    def test_row_zero_relations_on_grid(self, lam):
        # J_00 s_0 + J_01 s_1 = 0 and W = 2 s_0 (J_00 c_0 + J_01 c_1) = 2/pi
        channel = ChannelSpec(lam=lam, ell=0, charge=0.0)
        for energy in np.linspace(0.1, 20.0, 200):
            table = kinematic_table(float(energy), channel, 4)
            j = j_matrix(2, channel, float(energy))
            homo = j.diag[0] * table.s[0] + j.off[0] * table.s[1]
            assert abs(homo) < 1e-12 * max(abs(j.diag[0] * table.s[0]), 1e-3)
            assert abs(table.W - 2.0 / math.pi) < 1e-12
            assert np.max(np.abs(np.abs(table.T) - 1.0)) < 1e-12

    def test_kappa_matches_inverse_sine_normalization(self, channel):
        for energy in (0.5, 3.125, 9.0):
            table = kinematic_table(energy, channel, 3)
            assert table.kappa == pytest.approx(1.0 / (math.pi * table.s[0]),
                                                rel=1e-12)


class TestKinematicTable:
    def test_factors_at_band_center(self, channel):
        table = kinematic_table(3.125, channel, 8)
        assert table.T[0] == pytest.approx(-1.0, abs=1e-14)
        assert abs(table.Rplus[1] * table.Rminus[1]) == pytest.approx(0.5, rel=1e-13)

    @pytest.mark.parametrize("energy", [0.3, 2.0, 3.125, 12.0])
    def test_unimodular_factors_and_closed_forms(self, channel, energy):
        count = 24
        table = kinematic_table(energy, channel, count)
        theta = table.point.theta
        n = np.arange(count)
        assert np.max(np.abs(np.abs(table.T) - 1.0)) < 1e-12
        np.testing.assert_allclose(table.T, np.exp(2j * (n + 1) * theta),
                                   atol=1e-12)
        ratio = np.sqrt((n[1:]) / (n[1:] + 1.0))
        np.testing.assert_allclose(table.Rplus[1:], ratio * np.exp(-1j * theta),
                                   atol=1e-13)
        np.testing.assert_allclose(table.Rminus[1:], ratio * np.exp(1j * theta),
                                   atol=1e-13)

    @pytest.mark.parametrize("energy", [0.3, 2.0, 12.0])
    def test_h_identity(self, channel, energy):
        # h_n(+) = -sqrt(2/(pi k lam (n+1))) e^(-i (n+1) theta)
        count = 30
        table = kinematic_table(energy, channel, count)
        n = np.arange(1, count + 1)
        expected = -np.sqrt(2.0 / (math.pi * table.point.k * channel.lam * n)) \
            * np.exp(-1j * n * table.point.theta)
        assert np.max(np.abs(table.hplus - expected)) < 1e-13

    def test_count_validation(self, channel):
        with pytest.raises(ValueError):
            kinematic_table(1.0, channel, 1)


class TestRecursionResidual:
    def test_valid_table_below_gate(self, channel):
        for energy in (0.7, 2.3, 15.0):
            table = kinematic_table(energy, channel, 40)
            j = j_matrix(40, channel, energy)
            assert recursion_residual(table, j) < 1e-12

    def test_sensitive_to_perturbation(self, channel):
        table = kinematic_table(2.3, channel, 12)
        j = j_matrix(12, channel, 2.3)
        s = table.s.copy()
        s[5] += 1e-6
        broken = replace(table, s=s)
        assert recursion_residual(broken, j) > 1e-8

    def test_vacuous_for_two_terms(self, channel):
        table = kinematic_table(2.3, channel, 2)
        j = j_matrix(2, channel, 2.3)
        with pytest.warns(UserWarning, match="vacuous"):
            assert recursion_residual(table, j) == 0.0

    def test_matrix_too_small(self, channel):
        table = kinematic_table(2.3, channel, 12)
        j = j_matrix(5, channel, 2.3)
        with pytest.raises(ValueError):
            recursion_residual(table, j)


class TestContinuumOverlapOracle:
    @pytest.mark.parametrize("energy", [1.0, 3.125, 8.0])
    def test_closed_form_matches_quadrature(self, channel, energy):
        table = kinematic_table(energy, channel, 16)
        for n in range(16):
            overlap = sine_overlap_quadrature(n, energy, channel)
            assert overlap == pytest.approx(table.s[n], abs=1e-9)

    def test_quadrature_matches_scipy_quad(self, channel):
        # Same integral through an unrelated adaptive integrator.
        energy, n = 2.0, 3
        k = math.sqrt(2.0 * energy)
        lam = channel.lam
        norm = basis_norm(n, channel)

        def envelope(r):
            return norm * laguerre_eval(n, 1.0, lam * r) * math.exp(-lam * r / 2.0) \
                * math.sqrt(2.0 / (math.pi * k))

        reference, err = quad(envelope, 0.0, 60.0, weight="sin", wvar=k, limit=400)
        assert err < 1e-9  # conservative QAWO estimate
        assert sine_overlap_quadrature(n, energy, channel) == pytest.approx(
            reference, abs=1e-10)
