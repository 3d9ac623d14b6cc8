"""Deformation and transformation-phase tests.

The one-parameter closed form, the printed block formula and the general
numeric matching engine must agree wherever they overlap; the block
formula is in fact algebraically identical to the engine (both reduce to
the ratio conj(L)/L of the deformed row-0 combination through the
Wronskian relation), and the tests pin that agreement at 1e-10.
"""

import math

import numpy as np
import pytest

from jmatrix.basis import j_matrix
from jmatrix.deformation import (
    DeformationSpec,
    build_deformation,
    deformed_factors,
    tau_block_three,
    tau_numeric,
    tau_one_param,
)
from jmatrix.errors import DegeneratePhaseError
from jmatrix.kinematics import kinematic_table
from jmatrix.numerics import unwrap_angle_sequence

WRONSKIAN = 2.0 / math.pi


class TestConstructors:
    def test_one_parameter(self):
        spec = build_deformation("one_parameter", mu=1.0)
        assert spec.entries == ((0, 0, 1.0),)
        assert spec.support == 0
        assert not spec.is_effectively_zero

    def test_one_parameter_zero_is_effectively_empty(self):
        spec = build_deformation("one_parameter", mu=0.0)
        assert spec.is_effectively_zero

    def test_block(self):
        spec = build_deformation("block_three", mu_plus=1.0, mu_minus=0.5,
                                 mu_zero=-0.7)
        assert spec.support == 1
        dense = spec.dense(3)
        np.testing.assert_array_equal(dense, dense.T)
        assert dense[0, 1] == -0.7

    def test_bridge(self):
        spec = build_deformation("bridge_three", mu_plus=1.0, mu_minus=0.5,
                                 mu_zero=-0.7, m=7)
        assert spec.support == 7
        dense = spec.dense(9)
        assert dense[0, 7] == -0.7 and dense[7, 0] == -0.7
        assert dense[7, 7] == 0.5
        assert dense[0, 0] == 1.0

    def test_bridge_index_collision_rejected(self):
        with pytest.raises(ValueError, match=">= 2"):
            build_deformation("bridge_three", mu_plus=1.0, mu_minus=0.5,
                              mu_zero=-0.7, m=1)

    def test_missing_and_extra_parameters(self):
        with pytest.raises(ValueError, match="mu"):
            build_deformation("one_parameter")
        with pytest.raises(ValueError, match="unexpected"):
            build_deformation("one_parameter", mu=1.0, m=3)
        with pytest.raises(ValueError, match="unknown"):
            build_deformation("sevenfold", mu=1.0)

    def test_custom_entries_validated(self):
        spec = build_deformation("custom", entries=[(0, 3, 0.2), (1, 1, -0.1)])
        assert spec.support == 3
        with pytest.raises(ValueError, match="duplicate"):
            DeformationSpec(kind="custom", entries=((0, 0, 1.0), (0, 0, 2.0)))
        with pytest.raises(ValueError):
            DeformationSpec(kind="custom", entries=((2, 1, 1.0),))

    def test_dense_needs_room(self):
        spec = build_deformation("bridge_three", mu_plus=1.0, mu_minus=0.5,
                                 mu_zero=-0.7, m=7)
        with pytest.raises(ValueError):
            spec.dense(7)


class TestOneParameter:
    def test_zero_coupling_gives_exact_zero(self, channel):
        result = tau_one_param(2.0, 0.0, channel)
        assert result.tau == 0.0

    def test_band_center_value(self, channel):
        # c_0 = 0 there, so tau = -arctan(mu s_0 / kappa) with
        # s_0/kappa = pi s_0^2 = 2/(k lam) = 0.16.
        result = tau_one_param(3.125, 1.0, channel)
        assert result.tau == pytest.approx(-math.atan(0.16), abs=1e-13)
        assert result.unimodularity_defect < 1e-12

    @pytest.mark.parametrize("mu", [-2.0, -0.5, 0.5, 1.0, 5.0])
    def test_unimodularity(self, channel, mu):
        for energy in np.linspace(0.3, 15.0, 23):
            result = tau_one_param(float(energy), mu, channel)
            assert result.unimodularity_defect < 1e-12

    def test_small_mu_slope(self, channel):
        # tau ~ -mu s_0 / kappa for small mu
        energy = 2.0
        table = kinematic_table(energy, channel, 3)
        h = 1e-4
        slope = (tau_one_param(energy, h, channel).tau
                 - tau_one_param(energy, -h, channel).tau) / (2.0 * h)
        assert slope == pytest.approx(-table.s[0] / table.kappa, rel=1e-6)


class TestBlockThree:
    @pytest.mark.parametrize("energy", [0.7, 3.125, 9.0])
    def test_reduces_to_one_parameter(self, channel, energy):
        reduced = tau_block_three(energy, 1.3, 0.0, 0.0, channel)
        single = tau_one_param(energy, 1.3, channel)
        assert reduced.tau == pytest.approx(single.tau, abs=1e-13)

    def test_all_zero_couplings(self, channel):
        assert tau_block_three(2.0, 0.0, 0.0, 0.0, channel).tau == \
            pytest.approx(0.0, abs=1e-15)

    def test_agrees_with_numeric_engine(self, channel):
        # The printed expression equals the engine identically; any drift
        # beyond rounding would signal a transcription error.
        spec = build_deformation("block_three", mu_plus=1.0, mu_minus=0.5,
                                 mu_zero=-0.7)
        for energy in np.linspace(0.4, 11.0, 31):
            analytic = tau_block_three(float(energy), 1.0, 0.5, -0.7, channel)
            numeric = tau_numeric(float(energy), spec, channel)
            assert analytic.tau == pytest.approx(numeric.tau, abs=1e-10)
            assert analytic.unimodularity_defect < 1e-10

    def test_vanishing_column_combination_reported(self, channel):
        # mu_zero = -J_01 makes the (0,1) combination vanish.
        j = j_matrix(2, channel, 2.0)
        with pytest.raises(DegeneratePhaseError):
            tau_block_three(2.0, 1.0, 0.5, -float(j.off[0]), channel)


class TestNumericEngine:
    def test_empty_deformation_zero_phase(self, channel):
        spec = build_deformation("one_parameter", mu=0.0)
        result = tau_numeric(4.0, spec, channel)
        assert result.tau == 0.0
        assert result.flux_constant == pytest.approx(WRONSKIAN, abs=1e-15)

    @pytest.mark.parametrize("mu", [-2.0, -0.5, 0.5, 1.0, 5.0])
    def test_matches_closed_form_at_rank_one(self, channel, mu):
        spec = build_deformation("one_parameter", mu=mu)
        for energy in np.linspace(0.4, 12.0, 29):
            analytic = tau_one_param(float(energy), mu, channel)
            numeric = tau_numeric(float(energy), spec, channel)
            assert numeric.tau == pytest.approx(analytic.tau, abs=1e-10)

    def test_flux_constant_for_all_families(self, channel):
        specs = (
            build_deformation("one_parameter", mu=1.0),
            build_deformation("block_three", mu_plus=1.0, mu_minus=0.5,
                              mu_zero=-0.7),
            build_deformation("bridge_three", mu_plus=1.0, mu_minus=0.5,
                              mu_zero=-0.7, m=7),
            build_deformation("custom", entries=[(0, 2, 0.4), (1, 1, -0.3),
                                                 (2, 2, 0.8)]),
        )
        for spec in specs:
            for energy in (0.6, 2.2, 7.7):
                result = tau_numeric(energy, spec, channel)
                assert result.flux_constant == pytest.approx(WRONSKIAN, abs=1e-12)
                assert result.unimodularity_defect < 1e-12

    def test_independent_of_table_size(self, channel):
        spec = build_deformation("bridge_three", mu_plus=1.0, mu_minus=0.5,
                                 mu_zero=-0.7, m=7)
        small = tau_numeric(3.0, spec, channel)
        big_table = kinematic_table(3.0, channel, 40)
        big = tau_numeric(3.0, spec, channel, table=big_table)
        assert small.tau == pytest.approx(big.tau, abs=1e-14)

    def test_table_too_small_rejected(self, channel):
        spec = build_deformation("bridge_three", mu_plus=1.0, mu_minus=0.5,
                                 mu_zero=-0.7, m=7)
        with pytest.raises(ValueError, match="too small"):
            tau_numeric(3.0, spec, channel, table=kinematic_table(3.0, channel, 5))

    def test_singular_interior_reported_with_energy(self, channel):
        # Choosing mu_zero = -J_01(E) zeroes the 1x1 interior system.
        energy = 2.0
        j = j_matrix(3, channel, energy)
        spec = build_deformation("block_three", mu_plus=0.3, mu_minus=0.1,
                                 mu_zero=-float(j.off[0]))
        with pytest.raises(DegeneratePhaseError) as err:
            tau_numeric(energy, spec, channel)
        assert err.value.energy == energy

    def test_golden_bridge_curve(self, channel):
        import csv
        from pathlib import Path
        from jmatrix.scattering import EnergyGrid, phase_scan

        golden = Path(__file__).parent / "data" / "bridge_tau_golden.csv"
        with golden.open() as handle:
            rows = list(csv.DictReader(handle))
        spec = build_deformation("bridge_three", mu_plus=1.0, mu_minus=0.5,
                                 mu_zero=-0.7, m=7)
        computed = phase_scan(channel, spec, EnergyGrid(0.5, 10.0, 191))
        assert len(computed) == len(rows)
        for row, ours in zip(rows, computed):
            assert ours.status == "ok"
            assert ours.energy == pytest.approx(float(row["energy"]), abs=1e-15)
            assert ours.tau_numeric == pytest.approx(float(row["tau"]), abs=1e-12)
        taus = np.array([r.tau_numeric for r in computed])
        assert np.all(np.isfinite(taus))
        assert np.max(np.abs(np.diff(taus))) < 0.2

    def test_rank_one_curve_is_continuous(self, channel):
        spec = build_deformation("one_parameter", mu=1.0)
        energies = np.arange(0.5, 8.0, 0.01)
        taus = [tau_numeric(float(e), spec, channel).tau for e in energies]
        unwrapped = unwrap_angle_sequence(taus, math.pi)
        assert np.max(np.abs(np.diff(unwrapped))) < 0.2


class TestDeformedFactors:
    def test_zero_phase_identity(self, channel):
        table = kinematic_table(2.0, channel, 6)
        out = deformed_factors(table, 0.0)
        np.testing.assert_array_equal(out.T, table.T)
        np.testing.assert_array_equal(out.Rplus, table.Rplus)

    def test_half_turn_flips_sign(self, channel):
        table = kinematic_table(2.0, channel, 6)
        out = deformed_factors(table, math.pi / 2.0)
        np.testing.assert_allclose(out.T, -table.T, atol=1e-15)

    def test_unimodularity_preserved(self, channel):
        table = kinematic_table(2.0, channel, 6)
        out = deformed_factors(table, -0.37)
        np.testing.assert_allclose(np.abs(out.T), 1.0, atol=1e-13)
