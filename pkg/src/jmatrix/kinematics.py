"""Closed-form reference-problem solutions for the neutral s-wave channel.

For charge = 0 and ell = 0 the two regularized solutions of the reference
problem expand over the Laguerre basis with coefficients

    s_n = +sqrt(2 / (pi k lam (n+1))) * sin((n+1) theta)   (sine-like, regular)
    c_n = -sqrt(2 / (pi k lam (n+1))) * cos((n+1) theta)   (cosine-like)

where k = sqrt(2 E) and theta parameterizes the energy through
cos(theta) = (k^2 - lam^2/4) / (k^2 + lam^2/4). The normalization is fixed
by the energy-normalized continuum wave sqrt(2/(pi k)) sin(k r), which
makes the Wronskian-type constant W = 2 s_0 (J_00 c_0 + J_01 c_1) equal to
2/pi at every energy.

Coefficients are always produced from the closed forms; the three-term
recursion is used only as a residual check, never run forward.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .basis import ChannelSpec, TridiagonalMatrix, basis_norm, j_matrix
from .errors import UnsupportedChannelError
from .numerics import gauss_laguerre, laguerre_table

__all__ = [
    "EnergyPoint",
    "KinematicTable",
    "energy_point",
    "sine_coefficients",
    "cosine_coefficients",
    "kinematic_table",
    "recursion_residual",
    "sine_overlap_quadrature",
]


def _require_supported(channel: ChannelSpec, need_ell_zero: bool = True):
    if channel.charge != 0.0:
        raise UnsupportedChannelError(
            "Coulomb kinematics (charge != 0) are not implemented; "
            "only the neutral channel is supported")
    if need_ell_zero and channel.ell != 0:
        raise UnsupportedChannelError(
            "closed-form coefficients for ell > 0 are not implemented; "
            "only the s-wave channel is supported")


@dataclass(frozen=True)
class EnergyPoint:
    """Energy, wavenumber and basis angle for one scattering energy."""

    channel: ChannelSpec
    energy: float
    k: float
    theta: float
    cos_theta: float
    sin_theta: float


def energy_point(energy: float, channel: ChannelSpec) -> EnergyPoint:
    """Kinematic point with k = sqrt(2E) and the Laguerre angle theta.

    Raises
    ------
    UnsupportedChannelError
        For a charged channel; the angle parameterization assumes Z = 0.
    ValueError
        For energy <= 0.
    """
    _require_supported(channel, need_ell_zero=False)
    if not energy > 0.0:
        raise ValueError(f"energy must be positive, got {energy}")
    k = math.sqrt(2.0 * energy)
    denom = k * k + 0.25 * channel.lam ** 2
    cos_theta = (k * k - 0.25 * channel.lam ** 2) / denom
    sin_theta = k * channel.lam / denom
    theta = math.atan2(sin_theta, cos_theta)
    return EnergyPoint(channel=channel, energy=energy, k=k, theta=theta,
                       cos_theta=cos_theta, sin_theta=sin_theta)


def _amplitudes(point: EnergyPoint, count: int) -> np.ndarray:
    n = np.arange(count, dtype=float)
    return np.sqrt(2.0 / (math.pi * point.k * point.channel.lam * (n + 1.0)))


def sine_coefficients(point: EnergyPoint, count: int) -> np.ndarray:
    """Expansion coefficients of the regular (sine-like) solution."""
    _require_supported(point.channel)
    if count < 1:
        raise ValueError("count must be >= 1")
    n = np.arange(count, dtype=float)
    return _amplitudes(point, count) * np.sin((n + 1.0) * point.theta)


def cosine_coefficients(point: EnergyPoint, count: int) -> np.ndarray:
    """Expansion coefficients of the regularized cosine-like solution."""
    _require_supported(point.channel)
    if count < 1:
        raise ValueError("count must be >= 1")
    n = np.arange(count, dtype=float)
    return -_amplitudes(point, count) * np.cos((n + 1.0) * point.theta)


@dataclass(frozen=True)
class KinematicTable:
    """Per-energy coefficient arrays and kinematical factors.

    Attributes
    ----------
    s, c : np.ndarray
        Sine-like and cosine-like coefficients, indices 0..count-1.
    hplus, hminus : np.ndarray
        Complex combinations c_n +/- i s_n.
    T : np.ndarray
        Unimodular ratios h_n(-) / h_n(+).
    Rplus, Rminus : np.ndarray
        Neighbor ratios h_n(+-) / h_{n-1}(+-); entry 0 is NaN (undefined).
    kappa : float
        Row-0 inhomogeneity J_00 c_0 + J_01 c_1, computed from the actual
        matrix entries rather than assumed.
    W : float
        Normalization constant 2 s_0 kappa; equals 2/pi in this convention.
    """

    channel: ChannelSpec
    point: EnergyPoint
    count: int
    s: np.ndarray
    c: np.ndarray
    hplus: np.ndarray
    hminus: np.ndarray
    T: np.ndarray
    Rplus: np.ndarray
    Rminus: np.ndarray
    kappa: float
    W: float

    def __post_init__(self):
        for name in ("s", "c", "hplus", "hminus", "T", "Rplus", "Rminus"):
            getattr(self, name).flags.writeable = False


def kinematic_table(energy: float, channel: ChannelSpec, count: int) -> KinematicTable:
    """Build the full kinematic table at one energy.

    Parameters
    ----------
    count : int
        Number of coefficients, >= 2. A scattering run of dimension N
        needs count >= N + 2 so that T_{N-1} and R_N(+-) exist.
    """
    if count < 2:
        raise ValueError("count must be >= 2")
    point = energy_point(energy, channel)
    _require_supported(channel)
    s = sine_coefficients(point, count)
    c = cosine_coefficients(point, count)
    hplus = c + 1j * s
    hminus = c - 1j * s
    T = hminus / hplus
    rp = np.empty(count, dtype=complex)
    rm = np.empty(count, dtype=complex)
    rp[0] = complex(math.nan, math.nan)
    rm[0] = complex(math.nan, math.nan)
    rp[1:] = hplus[1:] / hplus[:-1]
    rm[1:] = hminus[1:] / hminus[:-1]
    j = j_matrix(2, channel, energy)
    kappa = float(j.diag[0] * c[0] + j.off[0] * c[1])
    w = 2.0 * float(s[0]) * kappa
    return KinematicTable(channel=channel, point=point, count=count, s=s, c=c,
                          hplus=hplus, hminus=hminus, T=T, Rplus=rp, Rminus=rm,
                          kappa=kappa, W=w)


def recursion_residual(table: KinematicTable, j: TridiagonalMatrix) -> float:
    """Largest relative three-term-recursion residual over interior rows.

    Checks rows n = 1 .. count-2 for both coefficient families against the
    tridiagonal wave-operator matrix ``j`` (which must come from the same
    channel and energy as the table). Serves as a gate: valid tables stay
    below 1e-12 away from the isolated points where J_nn d_n vanishes.
    """
    if j.size < table.count:
        raise ValueError("matrix too small for the table")
    if table.count < 3:
        warnings.warn("recursion residual is vacuous for count < 3",
                      stacklevel=2)
        return 0.0
    tiny = np.finfo(float).tiny
    worst = 0.0
    for d in (table.s, table.c):
        n = np.arange(1, table.count - 1)
        terms = (j.off[n - 1] * d[n - 1], j.diag[n] * d[n], j.off[n] * d[n + 1])
        res = terms[0] + terms[1] + terms[2]
        # Full row magnitude in the denominator: the diagonal term alone
        # vanishes at the isolated angle theta = pi/2 and would make the
        # ratio meaningless there.
        denom = sum(np.abs(t) for t in terms) + tiny
        worst = max(worst, float(np.max(np.abs(res) / denom)))
    return worst


def sine_overlap_quadrature(n: int, energy: float, channel: ChannelSpec,
                            order: int = 160) -> float:
    """<phibar_n | sqrt(2/(pi k)) sin(k r)> by Gauss-Laguerre quadrature.

    Independent cross-check of the closed-form sine coefficients: the
    energy-normalized free wave sqrt(2/(pi k)) sin(k r) expanded over the
    basis must reproduce s_n. The substitution x = (lam/2) r folds the
    basis decay into the quadrature weight; the remaining sin factor is
    entire, so the rule converges (checked by order doubling at the call
    site through the generous default order).
    """
    _require_supported(channel)
    point = energy_point(energy, channel)
    lam = channel.lam
    rule = gauss_laguerre(order)
    r = 2.0 * rule.nodes / lam
    y = lam * r
    table = laguerre_table(n, 2.0 * channel.ell + 1.0, y)
    phibar_poly = basis_norm(n, channel) * table[n]  # (lam r)^ell = 1 at ell = 0
    wave = math.sqrt(2.0 / (math.pi * point.k)) * np.sin(point.k * r)
    return (2.0 / lam) * rule.integrate(phibar_poly * wave)
