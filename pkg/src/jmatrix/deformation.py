"""Finite symmetric deformations of the reference Hamiltonian and the
transformation phase tau(mu, E) relating deformed to undeformed solutions.

Three routes to tau are provided:

* ``tau_one_param``   - closed form for the rank-one ground-state coupling,
  computed through two algebraically equivalent expressions that must agree.
* ``tau_block_three`` - printed closed form for the coupled lowest-two-states
  deformation, implemented verbatim; its unimodularity defect is recorded,
  not assumed (the general numeric engine is the arbiter).
* ``tau_numeric``     - matching engine for ANY symmetric finite-support
  deformation: the solution tail is pinned to the outgoing combination
  h_n(+), the deformed interior rows are solved as a small linear system,
  and tau is the argument of the deformed row-0 combination.

Only exp(2 i tau) is physical, so tau is reported modulo pi on the
principal branch (-pi/2, pi/2]; scans unwrap it separately.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .basis import ChannelSpec, j_matrix
from .errors import DegeneratePhaseError, SingularMatrixError
from .kinematics import KinematicTable, kinematic_table
from .numerics import principal_angle, solve_linear

__all__ = [
    "DeformationSpec",
    "PhaseResult",
    "DeformedFactors",
    "build_deformation",
    "tau_one_param",
    "tau_block_three",
    "tau_numeric",
    "deformed_factors",
]

WRONSKIAN_CONSTANT = 2.0 / math.pi


@dataclass(frozen=True)
class DeformationSpec:
    """Symmetric finite-support addition to the reference Hamiltonian matrix.

    ``entries`` stores the upper triangle as (i, j, value) with i <= j; the
    mirrored element is implied. ``support`` is the largest touched index.
    """

    kind: str
    entries: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        seen = set()
        for i, j, value in self.entries:
            if i < 0 or j < i:
                raise ValueError(f"entry ({i}, {j}) must satisfy 0 <= i <= j")
            if (i, j) in seen:
                raise ValueError(f"duplicate entry ({i}, {j})")
            if not math.isfinite(value):
                raise ValueError(f"entry ({i}, {j}) must be finite")
            seen.add((i, j))

    @property
    def support(self) -> int:
        return max((j for _, j, _ in self.entries), default=0)

    @property
    def is_effectively_zero(self) -> bool:
        return all(value == 0.0 for _, _, value in self.entries)

    def row_entries(self, n: int) -> list[tuple[int, float]]:
        """All (column, value) pairs of row ``n`` including mirrored ones."""
        out = []
        for i, j, value in self.entries:
            if i == n:
                out.append((j, value))
            if j == n and i != j:
                out.append((i, value))
        return out

    def entry_value(self, i: int, j: int, default: float = 0.0) -> float:
        """Stored value at (i, j), taking symmetry into account."""
        key = (min(i, j), max(i, j))
        for a, b, value in self.entries:
            if (a, b) == key:
                return value
        return default

    def dense(self, size: int) -> np.ndarray:
        if size <= self.support:
            raise ValueError(
                f"size {size} cannot hold support index {self.support}")
        out = np.zeros((size, size))
        for i, j, value in self.entries:
            out[i, j] += value
            if i != j:
                out[j, i] += value
        return out


def build_deformation(kind: str, **params) -> DeformationSpec:
    """Named constructors for the deformation families.

    * ``one_parameter``: mu at (0, 0).
    * ``block_three``: mu_plus at (0, 0), mu_minus at (1, 1), mu_zero at (0, 1).
    * ``bridge_three``: mu_plus at (0, 0), mu_minus at (m, m), mu_zero at
      (0, m) for a bridge index m >= 2 (smaller m would collide with the
      block family).
    * ``custom``: explicit ``entries`` sequence of (i, j, value).
    """
    def need(*names):
        missing = [name for name in names if name not in params]
        if missing:
            raise ValueError(f"{kind} deformation requires {', '.join(missing)}")
        extra = set(params) - set(names)
        if extra:
            raise ValueError(f"{kind} deformation got unexpected {sorted(extra)}")

    if kind == "one_parameter":
        need("mu")
        return DeformationSpec(kind=kind, entries=((0, 0, float(params["mu"])),))
    if kind == "block_three":
        need("mu_plus", "mu_minus", "mu_zero")
        return DeformationSpec(kind=kind, entries=(
            (0, 0, float(params["mu_plus"])),
            (0, 1, float(params["mu_zero"])),
            (1, 1, float(params["mu_minus"])),
        ))
    if kind == "bridge_three":
        need("mu_plus", "mu_minus", "mu_zero", "m")
        m = int(params["m"])
        if m < 2:
            raise ValueError(f"bridge index must be >= 2, got {m}")
        return DeformationSpec(kind=kind, entries=(
            (0, 0, float(params["mu_plus"])),
            (0, m, float(params["mu_zero"])),
            (m, m, float(params["mu_minus"])),
        ))
    if kind == "custom":
        need("entries")
        entries = tuple((int(i), int(j), float(v)) for i, j, v in params["entries"])
        return DeformationSpec(kind=kind, entries=entries)
    raise ValueError(f"unknown deformation kind {kind!r}")


@dataclass(frozen=True)
class PhaseResult:
    """Transformation phase on the principal branch plus diagnostics.

    ``unimodularity_defect`` is | |exp(2 i tau)| - 1 | of the evaluated
    expression. ``flux_constant`` (numeric route only) is the deformed
    analog of 2 s_0 kappa and must stay at 2/pi.
    """

    tau: float
    unimodularity_defect: float
    method: str
    flux_constant: float | None = None


def tau_one_param(energy: float, mu: float, channel: ChannelSpec,
                  table: KinematicTable | None = None) -> PhaseResult:
    """Closed-form phase for the rank-one ground-state deformation.

    Two equivalent expressions are evaluated: the kinematical-factor form

        exp(2 i tau) = T_0 + (1 - T_0) [1 + mu / (J_00 + J_01 R_1+)]^(-1)

    and the row-0 form exp(2 i tau) = (kappa + mu h_0-) / (kappa + mu h_0+),
    so tau = -arg(kappa + mu h_0+) mod pi. They must agree to 1e-12; the
    reported tau comes from the row-0 form (exactly zero at mu = 0), the
    defect from the kinematical-factor form.
    """
    if table is None:
        table = kinematic_table(energy, channel, 3)
    j = j_matrix(2, channel, energy)
    t0 = table.T[0]
    r1p = table.Rplus[1]
    p = j.diag[0] + j.off[0] * r1p
    e2_factor = t0 + (1.0 - t0) / (1.0 + mu / p)
    w = table.kappa + mu * table.hplus[0]
    if abs(w) < 1e-300:
        raise DegeneratePhaseError(
            f"degenerate row-0 combination at E = {energy}", energy=energy)
    tau_row0 = principal_angle(-cmath.phase(w))
    tau_factor = principal_angle(0.5 * cmath.phase(e2_factor))
    if abs(principal_angle(tau_row0 - tau_factor)) > 1e-12:
        raise ArithmeticError(
            f"phase forms disagree at E = {energy}: {tau_row0} vs {tau_factor}")
    defect = abs(abs(e2_factor) - 1.0)
    return PhaseResult(tau=tau_row0, unimodularity_defect=defect,
                       method="analytic-one-parameter")


def tau_block_three(energy: float, mu_plus: float, mu_minus: float,
                    mu_zero: float, channel: ChannelSpec,
                    table: KinematicTable | None = None) -> PhaseResult:
    """Printed closed form for the coupled lowest-two-states deformation.

    Implemented verbatim, including the squared complex prefactor and the
    squared-modulus factor multiplying T_0. The unimodularity defect is
    recorded but not asserted; compare against ``tau_numeric`` with the
    matching block deformation to judge the expression.
    """
    if table is None:
        table = kinematic_table(energy, channel, 3)
    j = j_matrix(2, channel, energy)
    j00 = j.diag[0]
    j01 = j.off[0]
    t0 = table.T[0]
    r1p = table.Rplus[1]
    b = j01 - mu_minus * r1p
    c = j01 + mu_zero
    if abs(b) < 1e-12 * (abs(j01) + abs(mu_minus)):
        raise DegeneratePhaseError(
            f"vanishing denominator J_01 - mu_minus R_1+ at E = {energy}",
            energy=energy)
    if abs(c) < 1e-300:
        raise DegeneratePhaseError(
            f"vanishing combination J_01 + mu_zero at E = {energy}",
            energy=energy)
    p = j00 + j01 * r1p
    bracket = j00 + mu_plus + r1p * c * c / b
    if abs(bracket) < 1e-300:
        raise DegeneratePhaseError(
            f"vanishing interior bracket at E = {energy}", energy=energy)
    e2 = (c / b) ** 2 * (t0 * abs(b / c) ** 2 + (1.0 - t0) * p / bracket)
    tau = principal_angle(0.5 * cmath.phase(e2))
    return PhaseResult(tau=tau, unimodularity_defect=abs(abs(e2) - 1.0),
                       method="analytic-block")


def tau_numeric(energy: float, deformation: DeformationSpec,
                channel: ChannelSpec,
                table: KinematicTable | None = None) -> PhaseResult:
    """Exact matching engine for any symmetric finite-support deformation.

    With support index M, the tail u_n = h_n(+) for n >= M already solves
    every undeformed row n >= M + 1. The deformed homogeneous rows
    n = 1..M are linear in u_0..u_{M-1} and are solved as a dense system;
    the deformed row-0 combination L = sum_m (J + D)_{0m} u_m then fixes
    tau = -arg(L) mod pi. For M = 0 this reproduces the one-parameter
    closed form exactly.

    Raises
    ------
    DegeneratePhaseError
        If the interior system is singular at this energy (bound-state-like
        degeneracy) or L vanishes.
    """
    if deformation.is_effectively_zero:
        # No deformation: L reduces to the real positive kappa, arg = 0.
        return PhaseResult(tau=0.0, unimodularity_defect=0.0,
                           method="numeric-matching",
                           flux_constant=WRONSKIAN_CONSTANT)
    m_support = deformation.support
    count = m_support + 2
    if table is None:
        table = kinematic_table(energy, channel, count)
    elif table.count < count:
        raise ValueError(
            f"table count {table.count} too small for support {m_support}")
    j = j_matrix(count, channel, energy)
    u = np.zeros(count, dtype=complex)
    u[m_support] = table.hplus[m_support]
    u[m_support + 1] = table.hplus[m_support + 1]
    if m_support >= 1:
        a = np.zeros((m_support, m_support))
        rhs = np.zeros(m_support, dtype=complex)
        for row in range(1, m_support + 1):
            terms = [(row - 1, float(j.off[row - 1])),
                     (row, float(j.diag[row]))]
            if row + 1 < count:
                terms.append((row + 1, float(j.off[row])))
            terms.extend(deformation.row_entries(row))
            for col, coeff in terms:
                if col < m_support:
                    a[row - 1, col] += coeff
                else:
                    rhs[row - 1] -= coeff * u[col]
        try:
            u[:m_support] = solve_linear(a, rhs)
        except SingularMatrixError as exc:
            raise DegeneratePhaseError(
                f"singular interior system at E = {energy}: {exc}",
                energy=energy) from exc
    ell = j.diag[0] * u[0] + j.off[0] * u[1]
    for col, value in deformation.row_entries(0):
        ell += value * u[col]
    if abs(ell) < 1e-300:
        raise DegeneratePhaseError(
            f"vanishing deformed row-0 combination at E = {energy}",
            energy=energy)
    tau = principal_angle(-cmath.phase(ell))
    # Deformed analog of 2 s_0 kappa; equals 2/pi for any symmetric
    # deformation, so it doubles as a flux-consistency diagnostic.
    flux = 2.0 * float((ell.conjugate() * u[0]).imag)
    e2 = ell.conjugate() / ell
    return PhaseResult(tau=tau, unimodularity_defect=abs(abs(e2) - 1.0),
                       method="numeric-matching", flux_constant=flux)


class DeformedFactors(NamedTuple):
    """Kinematical factors after the phase transformation."""

    T: np.ndarray
    Rplus: np.ndarray
    Rminus: np.ndarray


def deformed_factors(table: KinematicTable, tau: float) -> DeformedFactors:
    """Rotate the kinematical factors: T -> exp(-2 i tau) T, R unchanged."""
    phase = cmath.exp(-2.0j * tau)
    return DeformedFactors(T=phase * table.T,
                           Rplus=table.Rplus.copy(),
                           Rminus=table.Rminus.copy())
