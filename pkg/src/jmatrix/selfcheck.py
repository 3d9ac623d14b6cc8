"""Reduced-density invariant suites behind the ``selfcheck`` command.

Each suite re-verifies one module's contract on a thinned grid: quadrature
exactness, recurrence residuals, oracle agreement of every closed-form
matrix element, kinematic identities, the phase consistency triangle and
the scattering audits. The full-density versions live in the test suite;
this module is the fast release gate (well under a minute).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import (ChannelSpec, conjugate_overlap, h0_matrix, j_matrix,
                    oracle_element, overlap_matrix)
from .deformation import build_deformation, tau_block_three, tau_numeric, tau_one_param
from .errors import SingularMatrixError
from .kinematics import kinematic_table, recursion_residual, sine_overlap_quadrature
from .numerics import gauss_laguerre, laguerre_table, solve_linear, unwrap_angle_sequence
from .scattering import (EnergyGrid, PotentialSpec, ScatterConfig, ScatterEngine,
                         potential_matrix, s_matrix_folded)

__all__ = ["SuiteResult", "run_selfcheck", "SUITES"]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _fail(name, t0, detail):
    return SuiteResult(name, False, detail, time.perf_counter() - t0)


def _ok(name, t0, detail="all assertions hold"):
    return SuiteResult(name, True, detail, time.perf_counter() - t0)


def quadrature_suite() -> SuiteResult:
    name = "quadrature-exactness"
    t0 = time.perf_counter()
    for order in (1, 2, 11, 24, 48, 96, 170):
        rule = gauss_laguerre(order)
        if abs(math.fsum(rule.weights) - 1.0) > 1e-14:
            return _fail(name, t0, f"weight sum off at order {order}")
        for p in range(0, min(20, 2 * order - 1) + 1):
            moment = rule.integrate(rule.nodes ** p)
            if abs(moment / math.factorial(p) - 1.0) > 1e-12:
                return _fail(name, t0,
                             f"moment p={p} at order {order}: rel err "
                             f"{abs(moment / math.factorial(p) - 1.0):.2e}")
    return _ok(name, t0, "orders up to 170, moments p <= 20 exact to 1e-12")


def laguerre_suite() -> SuiteResult:
    name = "laguerre-recurrence"
    t0 = time.perf_counter()
    x = np.linspace(0.0, 200.0, 81)
    for alpha in (0.0, 1.0, 3.0, 5.0):
        table = laguerre_table(201, alpha, x)
        for n in range(1, 200):
            lhs = (n + 1.0) * table[n + 1]
            rhs = (2.0 * n + alpha + 1.0 - x) * table[n] - (n + alpha) * table[n - 1]
            scale = np.maximum(np.abs(lhs), np.abs(rhs)) + 1e-300
            worst = np.max(np.abs(lhs - rhs) / scale)
            if worst > 1e-12:
                return _fail(name, t0, f"alpha={alpha} n={n}: residual {worst:.2e}")
    return _ok(name, t0, "n <= 200, x <= 200, residual < 1e-12")


def solver_suite() -> SuiteResult:
    name = "linear-solver"
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    for dim in (3, 17, 60):
        q, _ = np.linalg.qr(rng.standard_normal((dim, dim))
                            + 1j * rng.standard_normal((dim, dim)))
        singular_values = np.logspace(0.0, 3.0, dim)
        a = (q * singular_values) @ q.conj().T
        b = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        x = solve_linear(a, b)
        rel = np.linalg.norm(a @ x - b) / np.linalg.norm(b)
        if rel > 1e-10:
            return _fail(name, t0, f"dim {dim}: residual {rel:.2e}")
    try:
        solve_linear(np.array([[1.0, 1.0], [1.0, 1.0]]), np.ones(2))
        return _fail(name, t0, "singular matrix not reported")
    except SingularMatrixError:
        pass
    return _ok(name, t0, "round-trip < 1e-10, singular systems reported")


def unwrap_suite() -> SuiteResult:
    name = "angle-unwrap"
    t0 = time.perf_counter()
    out = unwrap_angle_sequence([1.5, -1.5], math.pi)
    if abs(out[1] - (-1.5 + math.pi)) > 1e-12:
        return _fail(name, t0, f"branch choice wrong: {out}")
    rng = np.random.default_rng(3)
    walk = np.cumsum(rng.uniform(-1.2, 1.2, size=200))
    for period in (math.pi, 2.0 * math.pi):
        wrapped = np.remainder(walk, period)
        un = unwrap_angle_sequence(wrapped, period)
        if np.max(np.abs(np.diff(un))) > 0.5 * period + 1e-12:
            return _fail(name, t0, f"jump above period/2 for period {period}")
    return _ok(name, t0)


def matrix_oracle_suite(overlap_builder: Callable = overlap_matrix,
                        h0_builder: Callable = h0_matrix,
                        nmax: int = 10) -> SuiteResult:
    """Closed-form matrix entries against the quadrature oracle.

    The builders are injectable so a deliberately corrupted construction
    can be shown to fail (naming the offending entry).
    """
    name = "matrix-oracle"
    t0 = time.perf_counter()
    for lam in (1.0, 5.0):
        for ell in (0, 1, 2):
            channel = ChannelSpec(lam=lam, ell=ell, charge=0.0)
            omega = overlap_builder(nmax + 1, channel)
            h0 = h0_builder(nmax + 1, channel)
            for n in range(nmax + 1):
                pairs = [(n, n)] + ([(n, n + 1)] if n < nmax else [])
                for i, j in pairs:
                    for kind, matrix in (("overlap", omega), ("kinetic", h0)):
                        closed = matrix.element(i, j)
                        oracle = oracle_element(kind, i, j, channel)
                        if abs(closed - oracle) > 1e-10 * max(abs(oracle), 1.0):
                            return _fail(
                                name, t0,
                                f"{kind} (n={i}, m={j}) ell={ell} lam={lam}: "
                                f"closed {closed!r} vs oracle {oracle!r}")
            coulomb = oracle_element("coulomb", 3, 3, channel)
            if abs(coulomb - lam) > 1e-10 * lam:
                return _fail(name, t0,
                             f"coulomb (n=3, m=3) lam={lam}: {coulomb!r}")
            for n, m in ((0, 2), (1, 4), (5, 9)):
                for kind in ("overlap", "kinetic"):
                    far = oracle_element(kind, n, m, channel)
                    if abs(far) > 1e-10:
                        return _fail(name, t0,
                                     f"tridiagonality broken: {kind} "
                                     f"(n={n}, m={m}) = {far!r}")
    channel = ChannelSpec(lam=5.0, ell=0, charge=0.0)
    pot = PotentialSpec(v0=7.5, power=2, decay=1.0)
    vmat = potential_matrix(7, pot, channel)
    for n in range(7):
        for m in range(n, 7):
            oracle = oracle_element("potential", n, m, channel, potential=pot)
            if abs(vmat[n, m] - oracle) > 1e-10 * max(abs(oracle), 1.0):
                return _fail(name, t0,
                             f"potential (n={n}, m={m}): matrix "
                             f"{vmat[n, m]!r} vs oracle {oracle!r}")
    return _ok(name, t0, f"n, m <= {nmax}, ell in 0..2, all entries to 1e-10")


def biorthogonality_suite() -> SuiteResult:
    name = "biorthogonality"
    t0 = time.perf_counter()
    for lam, ell in ((5.0, 0), (10.0, 2)):
        channel = ChannelSpec(lam=lam, ell=ell, charge=0.0)
        for n in range(13):
            for m in range(n, 13):
                value = conjugate_overlap(n, m, channel)
                expect = 1.0 if n == m else 0.0
                if abs(value - expect) > 1e-10:
                    return _fail(name, t0,
                                 f"<phibar_{n}|phi_{m}> = {value!r} "
                                 f"(lam={lam}, ell={ell})")
    return _ok(name, t0, "n, m <= 12 biorthonormal to 1e-10")


def kinematics_suite() -> SuiteResult:
    name = "kinematics-identities"
    t0 = time.perf_counter()
    count = 40
    for lam in (1.0, 5.0):
        channel = ChannelSpec(lam=lam, ell=0, charge=0.0)
        for energy in np.linspace(0.11, 19.9, 48):
            table = kinematic_table(float(energy), channel, count)
            j = j_matrix(count, channel, float(energy))
            res = recursion_residual(table, j)
            if res > 1e-12:
                return _fail(name, t0,
                             f"recursion residual {res:.2e} at E={energy}")
            if np.max(np.abs(np.abs(table.T) - 1.0)) > 1e-12:
                return _fail(name, t0, f"|T| off unity at E={energy}")
            if abs(table.W - 2.0 / math.pi) > 1e-12:
                return _fail(name, t0, f"W = {table.W!r} at E={energy}")
            n = np.arange(1, count + 1)
            href = -np.sqrt(2.0 / (math.pi * table.point.k * lam * n)) \
                * np.exp(-1j * n * table.point.theta)
            if np.max(np.abs(table.hplus - href)) > 1e-13:
                return _fail(name, t0, f"h+ identity off at E={energy}")
    return _ok(name, t0, "residual, |T|, W and h-identity on 96 energies")


def continuum_overlap_suite() -> SuiteResult:
    name = "continuum-overlap"
    t0 = time.perf_counter()
    channel = ChannelSpec(lam=5.0, ell=0, charge=0.0)
    for energy in (1.0, 3.125, 8.0):
        table = kinematic_table(energy, channel, 9)
        for n in range(9):
            quad = sine_overlap_quadrature(n, energy, channel)
            if abs(quad - table.s[n]) > 1e-9:
                return _fail(name, t0,
                             f"s_{n} at E={energy}: closed {table.s[n]!r} "
                             f"vs quadrature {quad!r}")
    return _ok(name, t0, "closed-form s_n matches quadrature to 1e-9")


def phase_triangle_suite() -> SuiteResult:
    name = "phase-triangle"
    t0 = time.perf_counter()
    channel = ChannelSpec(lam=5.0, ell=0, charge=0.0)
    energies = np.linspace(0.4, 12.0, 40)
    for mu in (-2.0, -0.5, 0.5, 1.0, 5.0):
        deformation = build_deformation("one_parameter", mu=mu)
        for energy in energies:
            analytic = tau_one_param(float(energy), mu, channel)
            numeric = tau_numeric(float(energy), deformation, channel)
            if abs(analytic.tau - numeric.tau) > 1e-10:
                return _fail(name, t0,
                             f"mu={mu} E={energy}: analytic {analytic.tau!r} "
                             f"vs numeric {numeric.tau!r}")
            if abs(numeric.flux_constant - 2.0 / math.pi) > 1e-10:
                return _fail(name, t0,
                             f"flux constant off at mu={mu} E={energy}")
    if tau_one_param(2.0, 0.0, channel).tau != 0.0:
        return _fail(name, t0, "tau(mu=0) not exactly zero")
    for energy in (0.7, 3.125, 9.0):
        reduced = tau_block_three(float(energy), 1.3, 0.0, 0.0, channel)
        single = tau_one_param(float(energy), 1.3, channel)
        if abs(reduced.tau - single.tau) > 1e-13:
            return _fail(name, t0, f"block reduction off at E={energy}")
    return _ok(name, t0, "closed forms and numeric engine agree to 1e-10")


def free_scattering_suite() -> SuiteResult:
    name = "free-scattering"
    t0 = time.perf_counter()
    channel = ChannelSpec(lam=5.0, ell=0, charge=0.0)
    free = PotentialSpec(v0=0.0, power=0, decay=1.0)
    for n in (1, 5, 20):
        config = ScatterConfig(channel=channel, n_basis=n, potential=free,
                               deformation=build_deformation("one_parameter", mu=0.0))
        engine = ScatterEngine(config)
        for energy in np.linspace(0.1, 20.0, 25):
            s = engine.point(float(energy)).s_full
            if abs(s - 1.0) > 1e-10:
                return _fail(name, t0, f"N={n} E={energy}: |S-1| = {abs(s-1.0):.2e}")
    return _ok(name, t0, "V=0, mu=0 gives S=1 to 1e-10")


def scattering_audit_suite() -> SuiteResult:
    name = "scattering-audits"
    t0 = time.perf_counter()
    channel = ChannelSpec(lam=5.0, ell=0, charge=0.0)
    config = ScatterConfig(channel=channel, n_basis=20,
                           potential=PotentialSpec(v0=7.5, power=2, decay=1.0),
                           deformation=build_deformation("one_parameter", mu=1.0))
    engine = ScatterEngine(config)
    for energy in np.linspace(0.5, 8.0, 25):
        p = engine.point(float(energy))
        if abs(abs(p.s_full) - 1.0) > 1e-10:
            return _fail(name, t0, f"unitarity off at E={energy}")
        if abs(p.s_full * np.exp(2j * p.tau) - p.s_truncated) > 1e-13:
            return _fail(name, t0, f"phase relation off at E={energy}")
        folded = s_matrix_folded(float(energy), config)
        if abs(folded - p.s_truncated) > 1e-12:
            return _fail(name, t0, f"folded route off at E={energy}")
    return _ok(name, t0, "unitarity, phase relation and folded route agree")


def bridge_continuity_suite() -> SuiteResult:
    name = "bridge-continuity"
    t0 = time.perf_counter()
    channel = ChannelSpec(lam=5.0, ell=0, charge=0.0)
    deformation = build_deformation("bridge_three", mu_plus=1.0, mu_minus=0.5,
                                    mu_zero=-0.7, m=7)
    taus = []
    for energy in EnergyGrid(0.5, 10.0, 40).energies():
        result = tau_numeric(float(energy), deformation, channel)
        if not math.isfinite(result.tau):
            return _fail(name, t0, f"non-finite tau at E={energy}")
        taus.append(result.tau)
    unwrapped = unwrap_angle_sequence(taus, math.pi)
    jump = float(np.max(np.abs(np.diff(unwrapped))))
    if jump > 0.2:
        return _fail(name, t0, f"unwrapped jump {jump:.3f} rad")
    return _ok(name, t0, f"finite continuous curve, max jump {jump:.3f} rad")


SUITES = (
    quadrature_suite,
    laguerre_suite,
    solver_suite,
    unwrap_suite,
    matrix_oracle_suite,
    biorthogonality_suite,
    kinematics_suite,
    continuum_overlap_suite,
    phase_triangle_suite,
    free_scattering_suite,
    scattering_audit_suite,
    bridge_continuity_suite,
)


def run_selfcheck() -> list[SuiteResult]:
    """Run every invariant suite at reduced density."""
    return [suite() for suite in SUITES]
