"""Model-potential matrix, finite Green's function and the deformed S-matrix.

The scattering matrix of order N for a deformed reference problem is

    S(E) = e^(-2 i tau) T_{N-1} (1 + g J_{N-1,N} R_N-) / (1 + g J_{N-1,N} R_N+)

where g is the (N-1, N-1) element of the inverse of the truncated matrix
B = H0 + D + V - E*Omega (all N x N, phi-basis elements; the conjugate
basis is biorthogonal so the sandwich is a plain matrix inverse). The
"truncated" route drops the e^(-2 i tau) factor, which is exactly the
result of folding the deformation into the potential block and running
the undeformed formula; ``s_matrix_folded`` implements that independent
assembly as a cross-check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .basis import ChannelSpec, basis_norm, h0_matrix, overlap_matrix
from .deformation import DeformationSpec, tau_numeric
from .errors import (DegeneratePhaseError, NearSingularEnergyError,
                     UnsupportedChannelError)
from .kinematics import kinematic_table
from .numerics import (assert_symmetric, gauss_laguerre, laguerre_table,
                       principal_angle, solve_linear)

__all__ = [
    "PotentialSpec",
    "ScatterConfig",
    "EnergyGrid",
    "SMatrixPoint",
    "ScanTable",
    "PhaseRow",
    "potential_matrix",
    "green_last",
    "s_matrix",
    "s_matrix_folded",
    "phase_shift",
    "energy_scan",
    "phase_scan",
    "ScatterEngine",
]

#: Condition limit for the truncated pencil before a point is reported.
GREEN_CONDITION_LIMIT = 1e13

#: Relative energy offset applied when a scan lands on a singular point.
SINGULAR_NUDGE = 1e-9

#: Adaptive refinement threshold on |1 - S| jumps between neighbors.
ADAPTIVE_JUMP = 0.05

#: Maximum number of interval halvings during adaptive refinement.
ADAPTIVE_DEPTH = 12


@dataclass(frozen=True)
class PotentialSpec:
    """Short-range model potential V(r) = v0 * r^power * e^(-decay*r)."""

    v0: float
    power: int
    decay: float

    def __post_init__(self):
        if not math.isfinite(self.v0):
            raise ValueError("v0 must be finite")
        if self.power < 0 or int(self.power) != self.power:
            raise ValueError(f"power must be a nonnegative integer, got {self.power}")
        if not (self.decay > 0.0 and math.isfinite(self.decay)):
            raise ValueError(f"decay must be positive, got {self.decay}")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.v0 * np.power(r, float(self.power)) * np.exp(-self.decay * r)


@dataclass(frozen=True)
class ScatterConfig:
    """Scattering run definition: channel, model space, potential, deformation."""

    channel: ChannelSpec
    n_basis: int
    potential: PotentialSpec
    deformation: DeformationSpec

    def __post_init__(self):
        if self.n_basis < 1:
            raise ValueError(f"n_basis must be >= 1, got {self.n_basis}")
        if self.deformation.support >= self.n_basis:
            raise ValueError(
                f"deformation support {self.deformation.support} must lie "
                f"inside the model space (n_basis = {self.n_basis})")
        if self.channel.charge != 0.0:
            raise UnsupportedChannelError(
                "the scattering pipeline requires charge = 0; Coulomb "
                "kinematic coefficients are not implemented")


@dataclass(frozen=True)
class EnergyGrid:
    """Uniform energy grid with optional adaptive refinement."""

    emin: float
    emax: float
    steps: int
    adaptive: bool = False

    def __post_init__(self):
        if not (0.0 < self.emin < self.emax):
            raise ValueError(f"need 0 < emin < emax, got [{self.emin}, {self.emax}]")
        if self.steps < 2:
            raise ValueError(f"steps must be >= 2, got {self.steps}")

    def energies(self) -> np.ndarray:
        return np.linspace(self.emin, self.emax, self.steps)


@dataclass(frozen=True)
class SMatrixPoint:
    """Scattering output at one energy.

    ``delta`` is the phase shift of the full route (S_full = e^(2 i delta));
    ``delta_truncated`` belongs to the truncated route. ``status`` is "ok",
    "nudged" (energy moved off a singular point by a relative 1e-9),
    "nonunitary" or "failed:<reason>".
    """

    energy: float
    s_full: complex
    s_truncated: complex
    tau: float
    delta: float
    one_minus_s_abs: float
    g_last: complex
    delta_truncated: float
    status: str = "ok"

    @property
    def failed(self) -> bool:
        return self.status.startswith("failed")


@dataclass(frozen=True)
class ScanTable:
    """Deterministic energy-scan results, ordered by energy."""

    config: ScatterConfig
    grid: EnergyGrid
    mode: str
    points: tuple[SMatrixPoint, ...]


def potential_matrix(size: int, potential: PotentialSpec,
                     channel: ChannelSpec) -> np.ndarray:
    """Dense symmetric matrix <phi_n | V | phi_m> for n, m < size.

    Gauss-Laguerre under the substitution x = (lam + decay) r makes the
    integrand a polynomial of degree at most 2(size-1) + 2 ell + 2 + power,
    so the fixed order 2*size + 16 is exact for the sizes used here.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    lam, ell = channel.lam, channel.ell
    scale = lam + potential.decay
    rule = gauss_laguerre(2 * size + 16)
    r = rule.nodes / scale
    y = lam * r
    table = laguerre_table(size - 1, 2.0 * ell + 1.0, y)
    norms = np.array([basis_norm(n, channel) for n in range(size)])
    phi_poly = norms[:, None] * np.power(y, ell + 1.0)[None, :] * table
    factor = rule.weights * potential.v0 * np.power(r, float(potential.power)) / scale
    mat = (phi_poly * factor[None, :]) @ phi_poly.T
    return 0.5 * (mat + mat.T)


class ScatterEngine:
    """Per-configuration cache of the energy-independent matrix blocks.

    Evaluating many energies against one configuration reuses the dense
    potential and deformation blocks; results are identical to one-shot
    ``s_matrix`` calls because both go through this class.
    """

    def __init__(self, config: ScatterConfig):
        self.config = config
        n = config.n_basis
        # Size n+1 tridiagonals expose the coupling element J_{N-1,N}.
        self._h0 = h0_matrix(n + 1, config.channel)
        self._omega = overlap_matrix(n + 1, config.channel)
        h0_block = self._h0.to_dense()[:n, :n]
        omega_block = self._omega.to_dense()[:n, :n]
        self._omega_block = omega_block
        self._vmat = potential_matrix(n, config.potential, config.channel)
        self._static = h0_block + config.deformation.dense(n) + self._vmat
        assert_symmetric(self._static)

    def _pencil(self, energy: float) -> np.ndarray:
        return self._static - energy * self._omega_block

    def green_last(self, energy: float) -> complex:
        """(N-1, N-1) element of the inverse truncated pencil.

        Raises
        ------
        NearSingularEnergyError
            If the pencil condition exceeds 1e13 (a discrete eigenvalue of
            the truncated problem is too close); scans offset such points.
        """
        if not energy > 0.0:
            raise ValueError(f"energy must be positive, got {energy}")
        n = self.config.n_basis
        b = self._pencil(energy)
        cond = np.linalg.cond(b)
        if not np.isfinite(cond) or cond > GREEN_CONDITION_LIMIT:
            raise NearSingularEnergyError(
                f"truncated pencil condition {cond:.3e} at E = {energy}",
                energy=energy, condition=float(cond))
        rhs = np.zeros(n)
        rhs[-1] = 1.0
        x = solve_linear(b, rhs)
        return complex(x[-1])

    def point(self, energy: float) -> SMatrixPoint:
        """Full and truncated S-matrix values at one energy.

        Phase shifts carry the principal branch; scans re-thread them into
        continuous curves afterwards.
        """
        n = self.config.n_basis
        table = kinematic_table(energy, self.config.channel, n + 2)
        phase = tau_numeric(energy, self.config.deformation,
                            self.config.channel, table=table)
        g = self.green_last(energy)
        j_coupling = float(self._h0.off[n - 1] - energy * self._omega.off[n - 1])
        t_last = table.T[n - 1]
        s_trunc = t_last * (1.0 + g * j_coupling * table.Rminus[n]) \
            / (1.0 + g * j_coupling * table.Rplus[n])
        s_full = cmath.exp(-2.0j * phase.tau) * s_trunc
        status = "ok"
        if abs(abs(s_full) - 1.0) > 1e-6:
            status = "nonunitary"
        return SMatrixPoint(
            energy=energy,
            s_full=s_full,
            s_truncated=s_trunc,
            tau=phase.tau,
            delta=principal_angle(0.5 * cmath.phase(s_full)),
            one_minus_s_abs=abs(1.0 - s_full),
            g_last=g,
            delta_truncated=principal_angle(0.5 * cmath.phase(s_trunc)),
            status=status,
        )

    def point_nudged(self, energy: float) -> SMatrixPoint:
        """Like ``point`` but offsets singular energies by a relative 1e-9."""
        try:
            return self.point(energy)
        except (NearSingularEnergyError, DegeneratePhaseError):
            pass
        nudged = energy * (1.0 + SINGULAR_NUDGE)
        try:
            result = self.point(nudged)
        except (NearSingularEnergyError, DegeneratePhaseError) as exc:
            return SMatrixPoint(
                energy=energy, s_full=complex(math.nan, math.nan),
                s_truncated=complex(math.nan, math.nan), tau=math.nan,
                delta=math.nan, one_minus_s_abs=math.nan,
                g_last=complex(math.nan, math.nan), delta_truncated=math.nan,
                status=f"failed:{type(exc).__name__}")
        if result.status == "ok":
            result = replace(result, status="nudged")
        return result


def green_last(energy: float, config: ScatterConfig) -> complex:
    """One-shot variant of :meth:`ScatterEngine.green_last`."""
    return ScatterEngine(config).green_last(energy)


def s_matrix(energy: float, config: ScatterConfig) -> SMatrixPoint:
    """One-shot variant of :meth:`ScatterEngine.point`."""
    return ScatterEngine(config).point(energy)


def s_matrix_folded(energy: float, config: ScatterConfig) -> complex:
    """Truncated-route S-matrix through an independent assembly.

    The deformation is folded into the potential block (V -> V + D) and the
    undeformed formula is evaluated with no phase factor. Must agree with
    ``s_matrix(...).s_truncated`` to 1e-12; the two paths build the same
    pencil through different code.
    """
    n = config.n_basis
    channel = config.channel
    h0 = h0_matrix(n + 1, channel)
    omega = overlap_matrix(n + 1, channel)
    v_folded = potential_matrix(n, config.potential, channel) \
        + config.deformation.dense(n)
    b = (h0.to_dense()[:n, :n] + v_folded) - energy * omega.to_dense()[:n, :n]
    cond = np.linalg.cond(b)
    if not np.isfinite(cond) or cond > GREEN_CONDITION_LIMIT:
        raise NearSingularEnergyError(
            f"truncated pencil condition {cond:.3e} at E = {energy}",
            energy=energy, condition=float(cond))
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    g = complex(solve_linear(b, rhs)[-1])
    table = kinematic_table(energy, channel, n + 2)
    j_coupling = float(h0.off[n - 1] - energy * omega.off[n - 1])
    return complex(table.T[n - 1] * (1.0 + g * j_coupling * table.Rminus[n])
                   / (1.0 + g * j_coupling * table.Rplus[n]))


def phase_shift(s: complex, previous: float | None = None) -> float:
    """Phase shift delta with e^(2 i delta) = s.

    ``s`` must be unimodular to 1e-6. With ``previous`` given, the branch
    (multiple of pi) closest to it is returned, which threads a continuous
    curve through a scan.
    """
    mag = abs(s)
    if abs(mag - 1.0) > 1e-6:
        raise ValueError(f"|S| = {mag} is not unimodular within 1e-6")
    delta = principal_angle(0.5 * cmath.phase(s))
    if previous is not None:
        delta += math.pi * round((previous - delta) / math.pi)
    return delta


def _height(point: SMatrixPoint, mode: str) -> float:
    if mode == "truncated":
        return abs(1.0 - point.s_truncated)
    return point.one_minus_s_abs


def energy_scan(config: ScatterConfig, grid: EnergyGrid,
                mode: str = "full") -> ScanTable:
    """Deterministic energy scan, optionally refined around sharp features.

    Adaptive refinement bisects neighbor intervals whose |1 - S| values
    differ by more than 0.05, up to 12 halvings. Singular grid points are
    offset by a relative 1e-9; points that still fail are recorded with a
    ``failed`` status and the scan continues.

    The tau and delta columns of the result are unwrapped along the grid
    (period pi) so curves are continuous; a rerun with the same inputs
    produces an identical table.
    """
    if mode not in ("full", "truncated", "both"):
        raise ValueError(f"mode must be full, truncated or both, got {mode!r}")
    engine = ScatterEngine(config)
    rows = {float(e): engine.point_nudged(float(e)) for e in grid.energies()}
    if grid.adaptive:
        height_mode = "truncated" if mode == "truncated" else "full"
        for _ in range(ADAPTIVE_DEPTH):
            ordered = sorted(rows)
            new_energies = []
            for lo, hi in zip(ordered, ordered[1:]):
                a, b = rows[lo], rows[hi]
                if a.failed or b.failed:
                    continue
                if abs(_height(a, height_mode) - _height(b, height_mode)) > ADAPTIVE_JUMP:
                    new_energies.append(0.5 * (lo + hi))
            if not new_energies:
                break
            for e in new_energies:
                rows[e] = engine.point_nudged(e)
    ordered = [rows[e] for e in sorted(rows)]
    return ScanTable(config=config, grid=grid, mode=mode,
                     points=tuple(_rethread(ordered)))


def _rethread(points: list[SMatrixPoint]) -> list[SMatrixPoint]:
    """Unwrap tau and both phase shifts along the scan, skipping failures."""
    out = []
    prev_tau = prev_full = prev_trunc = None
    for p in points:
        if p.failed:
            out.append(p)
            continue
        tau = p.tau if prev_tau is None else \
            p.tau + math.pi * round((prev_tau - p.tau) / math.pi)
        delta = phase_shift(p.s_full, prev_full)
        delta_t = phase_shift(p.s_truncated, prev_trunc)
        prev_tau, prev_full, prev_trunc = tau, delta, delta_t
        out.append(replace(p, tau=tau, delta=delta, delta_truncated=delta_t))
    return out


@dataclass(frozen=True)
class PhaseRow:
    """Transformation phase at one energy: numeric engine vs closed form.

    ``tau_analytic`` is None for deformation kinds without a closed form
    (bridge, custom); ``defect`` is the unimodularity defect of the
    analytic expression when present, of the numeric one otherwise.
    """

    energy: float
    tau_analytic: float | None
    tau_numeric: float
    defect: float
    status: str = "ok"

    @property
    def failed(self) -> bool:
        return self.status.startswith("failed")


def phase_scan(channel: ChannelSpec, deformation: DeformationSpec,
               grid: EnergyGrid) -> tuple[PhaseRow, ...]:
    """Transformation-phase curve over an energy grid, unwrapped (period pi).

    Singular energies are offset by a relative 1e-9 like ``energy_scan``;
    rows that still fail carry a ``failed`` status and NaN values.
    """
    from .deformation import tau_block_three, tau_numeric, tau_one_param

    def analytic(energy: float):
        if deformation.kind == "one_parameter":
            return tau_one_param(energy, deformation.entry_value(0, 0), channel)
        if deformation.kind == "block_three":
            return tau_block_three(energy,
                                   deformation.entry_value(0, 0),
                                   deformation.entry_value(1, 1),
                                   deformation.entry_value(0, 1), channel)
        return None

    rows = []
    for e in grid.energies():
        energy = float(e)
        status = "ok"
        try:
            numeric = tau_numeric(energy, deformation, channel)
            closed = analytic(energy)
        except DegeneratePhaseError:
            energy = energy * (1.0 + SINGULAR_NUDGE)
            try:
                numeric = tau_numeric(energy, deformation, channel)
                closed = analytic(energy)
                status = "nudged"
            except DegeneratePhaseError as exc:
                rows.append(PhaseRow(energy=float(e), tau_analytic=math.nan,
                                     tau_numeric=math.nan, defect=math.nan,
                                     status=f"failed:{type(exc).__name__}"))
                continue
        rows.append(PhaseRow(
            energy=energy,
            tau_analytic=None if closed is None else closed.tau,
            tau_numeric=numeric.tau,
            defect=numeric.unimodularity_defect if closed is None
            else closed.unimodularity_defect,
            status=status))
    return tuple(_rethread_phase(rows))


def _rethread_phase(rows: list[PhaseRow]) -> list[PhaseRow]:
    out = []
    prev_num = prev_ana = None
    for row in rows:
        if row.failed:
            out.append(row)
            continue
        tau_n = row.tau_numeric if prev_num is None else \
            row.tau_numeric + math.pi * round((prev_num - row.tau_numeric) / math.pi)
        prev_num = tau_n
        tau_a = row.tau_analytic
        if tau_a is not None:
            if prev_ana is not None:
                tau_a += math.pi * round((prev_ana - tau_a) / math.pi)
            prev_ana = tau_a
        out.append(replace(row, tau_numeric=tau_n, tau_analytic=tau_a))
    return out
