"""Scattering assembly tests: potential matrix against the oracle, the
finite Green's function, the two S-matrix routes and their audits, and the
deterministic energy scan.
"""

import math

import numpy as np
import pytest
from scipy.linalg import eigh

from jmatrix.basis import ChannelSpec, h0_matrix, j_matrix, oracle_element, overlap_matrix
from jmatrix.deformation import build_deformation
from jmatrix.errors import NearSingularEnergyError, UnsupportedChannelError
from jmatrix.report import scan_to_csv
from jmatrix.scattering import (
    EnergyGrid,
    PotentialSpec,
    ScatterConfig,
    ScatterEngine,
    energy_scan,
    green_last,
    phase_scan,
    phase_shift,
    potential_matrix,
    s_matrix,
    s_matrix_folded,
)

NO_DEFORMATION = build_deformation("one_parameter", mu=0.0)
RANK_ONE = build_deformation("one_parameter", mu=1.0)
BRIDGE = build_deformation("bridge_three", mu_plus=1.0, mu_minus=0.5,
                           mu_zero=-0.7, m=7)


def make_config(channel, potential, n_basis=20, deformation=NO_DEFORMATION):
    return ScatterConfig(channel=channel, n_basis=n_basis,
                         potential=potential, deformation=deformation)


class TestPotentialSpec:
    def test_evaluates(self):
        pot = PotentialSpec(v0=7.5, power=2, decay=1.0)
        assert pot(2.0) == pytest.approx(7.5 * 4.0 * math.exp(-2.0), rel=1e-15)

    @pytest.mark.parametrize("kwargs", [
        {"v0": math.nan, "power": 2, "decay": 1.0},
        {"v0": 1.0, "power": -1, "decay": 1.0},
        {"v0": 1.0, "power": 2, "decay": 0.0},
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            PotentialSpec(**kwargs)


class TestPotentialMatrix:
    def test_zero_strength_gives_zero_matrix(self, channel):
        mat = potential_matrix(8, PotentialSpec(v0=0.0, power=2, decay=1.0), channel)
        np.testing.assert_array_equal(mat, np.zeros((8, 8)))

    def test_linear_in_strength(self, channel):
        base = potential_matrix(6, PotentialSpec(v0=7.5, power=2, decay=1.0), channel)
        double = potential_matrix(6, PotentialSpec(v0=15.0, power=2, decay=1.0),
                                  channel)
        np.testing.assert_allclose(double, 2.0 * base, rtol=1e-15)

    def test_exactly_symmetric(self, channel, benchmark_potential):
        mat = potential_matrix(12, benchmark_potential, channel)
        np.testing.assert_array_equal(mat, mat.T)

    def test_corner_matches_oracle_at_doubled_order(self, channel,
                                                    benchmark_potential):
        mat = potential_matrix(8, benchmark_potential, channel)
        oracle = oracle_element("potential", 0, 0, channel,
                                potential=benchmark_potential, order=40)
        assert mat[0, 0] == pytest.approx(oracle, rel=1e-12)

    def test_block_matches_oracle(self, channel, benchmark_potential):
        mat = potential_matrix(9, benchmark_potential, channel)
        for n in range(9):
            for m in range(n, 9):
                oracle = oracle_element("potential", n, m, channel,
                                        potential=benchmark_potential)
                assert mat[n, m] == pytest.approx(oracle, rel=1e-10, abs=1e-12)


class TestScatterConfig:
    def test_deformation_must_fit_model_space(self, channel, benchmark_potential):
        with pytest.raises(ValueError, match="support"):
            make_config(channel, benchmark_potential, n_basis=7,
                        deformation=BRIDGE)
        make_config(channel, benchmark_potential, n_basis=8, deformation=BRIDGE)

    def test_charged_channel_rejected(self, benchmark_potential):
        charged = ChannelSpec(lam=5.0, ell=0, charge=1.0)
        with pytest.raises(UnsupportedChannelError):
            make_config(charged, benchmark_potential)


class TestGreenFunction:
    def test_one_dimensional_free(self, channel):
        config = make_config(channel, PotentialSpec(v0=0.0, power=0, decay=1.0),
                             n_basis=1)
        energy = 2.0
        j = j_matrix(1, channel, energy)
        assert green_last(energy, config) == pytest.approx(1.0 / j.diag[0],
                                                           rel=1e-14)

    def test_one_dimensional_deformed(self, channel):
        config = make_config(channel, PotentialSpec(v0=0.0, power=0, decay=1.0),
                             n_basis=1, deformation=RANK_ONE)
        energy = 2.0
        j = j_matrix(1, channel, energy)
        assert green_last(energy, config) == pytest.approx(
            1.0 / (j.diag[0] + 1.0), rel=1e-14)

    def test_real_for_real_inputs(self, channel, benchmark_potential):
        config = make_config(channel, benchmark_potential, n_basis=12)
        engine = ScatterEngine(config)
        for energy in np.linspace(0.5, 9.0, 17):
            assert engine.green_last(float(energy)).imag == 0.0

    def test_pencil_eigenvalue_reported(self, channel, benchmark_potential):
        # Evaluate exactly at a discrete eigenvalue of the truncated pencil.
        n = 3
        h0 = h0_matrix(n, channel).to_dense()
        omega = overlap_matrix(n, channel).to_dense()
        vmat = potential_matrix(n, benchmark_potential, channel)
        eigenvalues = eigh(h0 + vmat, omega, eigvals_only=True)
        positive = [e for e in eigenvalues if e > 0.1]
        config = make_config(channel, benchmark_potential, n_basis=n)
        with pytest.raises(NearSingularEnergyError):
            green_last(float(positive[0]), config)

    def test_scan_nudges_past_singular_point(self, channel, benchmark_potential):
        n = 3
        h0 = h0_matrix(n, channel).to_dense()
        omega = overlap_matrix(n, channel).to_dense()
        vmat = potential_matrix(n, benchmark_potential, channel)
        eigenvalues = eigh(h0 + vmat, omega, eigvals_only=True)
        bad = float([e for e in eigenvalues if e > 0.1][0])
        engine = ScatterEngine(make_config(channel, benchmark_potential, n_basis=n))
        point = engine.point_nudged(bad)
        assert point.status == "nudged"
        assert abs(abs(point.s_full) - 1.0) < 1e-10

    def test_status_column_appears_for_annotated_rows(self, channel,
                                                      benchmark_potential):
        n = 3
        h0 = h0_matrix(n, channel).to_dense()
        omega = overlap_matrix(n, channel).to_dense()
        vmat = potential_matrix(n, benchmark_potential, channel)
        eigenvalues = eigh(h0 + vmat, omega, eigvals_only=True)
        bad = float([e for e in eigenvalues if e > 0.1][0])
        config = make_config(channel, benchmark_potential, n_basis=n)
        table = energy_scan(config, EnergyGrid(bad, bad + 1.0, 2))
        text = scan_to_csv(table)
        header = text.splitlines()[0]
        assert header.endswith(",status")
        assert "nudged" in text
        clean = energy_scan(config, EnergyGrid(bad + 0.05, bad + 1.0, 2))
        assert scan_to_csv(clean).splitlines()[0].endswith(",mode")


class TestSMatrix:
    @pytest.mark.parametrize("n_basis", [1, 2, 5, 20])
    def test_free_identity(self, channel, n_basis):
        config = make_config(channel, PotentialSpec(v0=0.0, power=0, decay=1.0),
                             n_basis=n_basis)
        engine = ScatterEngine(config)
        for energy in np.linspace(0.1, 20.0, 25):
            point = engine.point(float(energy))
            assert abs(point.s_full - 1.0) < 1e-10

    def test_unitarity_and_phase_relation(self, channel, benchmark_potential):
        config = make_config(channel, benchmark_potential, n_basis=20,
                             deformation=RANK_ONE)
        engine = ScatterEngine(config)
        for energy in np.linspace(0.5, 8.0, 31):
            point = engine.point(float(energy))
            assert abs(abs(point.s_full) - 1.0) < 1e-10
            assert abs(point.s_full * np.exp(2j * point.tau)
                       - point.s_truncated) < 1e-13
            assert point.one_minus_s_abs == pytest.approx(
                abs(1.0 - point.s_full), abs=1e-15)

    @pytest.mark.parametrize("deformation", [NO_DEFORMATION, RANK_ONE, BRIDGE])
    def test_folded_route_matches_truncated(self, channel, benchmark_potential,
                                            deformation):
        config = make_config(channel, benchmark_potential, n_basis=14,
                             deformation=deformation)
        engine = ScatterEngine(config)
        for energy in (0.8, 2.9, 6.4):
            folded = s_matrix_folded(energy, config)
            assert abs(folded - engine.point(energy).s_truncated) < 1e-12

    def test_one_shot_matches_engine(self, channel, benchmark_potential):
        config = make_config(channel, benchmark_potential, n_basis=10,
                             deformation=RANK_ONE)
        single = s_matrix(3.0, config)
        engine = ScatterEngine(config).point(3.0)
        assert single == engine

    def test_full_equals_truncated_without_deformation(self, channel,
                                                       benchmark_potential):
        config = make_config(channel, benchmark_potential, n_basis=10)
        point = s_matrix(3.0, config)
        assert point.tau == 0.0
        assert point.s_full == point.s_truncated


class TestPhaseShift:
    def test_unit_s(self):
        assert phase_shift(1.0 + 0.0j) == 0.0

    def test_branch_follows_previous(self):
        assert phase_shift(-1.0 + 0.0j, previous=1.4) == pytest.approx(
            math.pi / 2.0, rel=1e-15)
        assert phase_shift(-1.0 + 0.0j, previous=-1.4) == pytest.approx(
            -math.pi / 2.0, rel=1e-15)

    def test_quarter_turn(self):
        assert phase_shift(1.0j) == pytest.approx(math.pi / 4.0, rel=1e-15)

    def test_non_unimodular_rejected(self):
        with pytest.raises(ValueError, match="unimodular"):
            phase_shift(1.1 + 0.0j)


class TestEnergyScan:
    def test_two_steps_two_rows(self, channel):
        config = make_config(channel, PotentialSpec(v0=0.0, power=0, decay=1.0),
                             n_basis=5)
        table = energy_scan(config, EnergyGrid(0.5, 2.0, 2))
        assert len(table.points) == 2
        for point in table.points:
            assert point.one_minus_s_abs < 1e-10

    def test_deterministic_rerun(self, channel, benchmark_potential):
        config = make_config(channel, benchmark_potential, n_basis=12,
                             deformation=RANK_ONE)
        grid = EnergyGrid(0.5, 8.0, 21, adaptive=True)
        first = scan_to_csv(energy_scan(config, grid, "both"))
        second = scan_to_csv(energy_scan(config, grid, "both"))
        assert first == second

    def test_adaptive_refines_near_resonance(self, channel, benchmark_potential):
        config = make_config(channel, benchmark_potential, n_basis=30)
        plain = energy_scan(config, EnergyGrid(3.0, 4.0, 9))
        refined = energy_scan(config, EnergyGrid(3.0, 4.0, 9, adaptive=True))
        assert len(refined.points) > len(plain.points)
        jumps = np.abs(np.diff([p.one_minus_s_abs for p in refined.points]))
        assert np.max(jumps) <= 0.05 + 1e-12

    def test_rows_sorted_and_rethreaded(self, channel, benchmark_potential):
        config = make_config(channel, benchmark_potential, n_basis=20,
                             deformation=RANK_ONE)
        table = energy_scan(config, EnergyGrid(0.5, 8.0, 61, adaptive=True))
        energies = [p.energy for p in table.points]
        assert energies == sorted(energies)
        taus = [p.tau for p in table.points]
        assert np.max(np.abs(np.diff(taus))) < 0.5 * math.pi

    def test_mode_validation(self, channel, benchmark_potential):
        config = make_config(channel, benchmark_potential)
        with pytest.raises(ValueError):
            energy_scan(config, EnergyGrid(0.5, 2.0, 3), mode="sideways")

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            EnergyGrid(0.0, 2.0, 5)
        with pytest.raises(ValueError):
            EnergyGrid(2.0, 1.0, 5)
        with pytest.raises(ValueError):
            EnergyGrid(0.5, 2.0, 1)


class TestPhaseScan:
    def test_no_deformation_all_zero(self, channel):
        rows = phase_scan(channel, NO_DEFORMATION, EnergyGrid(0.5, 4.0, 7))
        for row in rows:
            assert row.tau_numeric == 0.0
            assert row.tau_analytic == 0.0

    def test_rank_one_has_analytic_column(self, channel):
        rows = phase_scan(channel, RANK_ONE, EnergyGrid(0.5, 4.0, 9))
        for row in rows:
            assert row.tau_analytic == pytest.approx(row.tau_numeric, abs=1e-10)
            assert row.defect < 1e-12

    def test_bridge_has_no_analytic_column(self, channel):
        rows = phase_scan(channel, BRIDGE, EnergyGrid(0.5, 4.0, 9))
        assert all(row.tau_analytic is None for row in rows)
        assert all(math.isfinite(row.tau_numeric) for row in rows)
