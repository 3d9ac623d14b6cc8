"""Laguerre basis matrices for the radial reference problem.

Basis convention, fixed for the whole package (atomic units):

    phi_n(r)    = a_n (lam*r)^(ell+1) e^(-lam*r/2) L_n^(2*ell+1)(lam*r)
    phibar_n(r) = a_n (lam*r)^ell     e^(-lam*r/2) L_n^(2*ell+1)(lam*r)
    a_n         = sqrt(lam * n! / Gamma(n + 2*ell + 2))

which makes <phibar_n | phi_m> = delta_nm. In this basis the overlap and
the reference Hamiltonian

    H0 = -(1/2) d^2/dr^2 + ell(ell+1)/(2 r^2) + Z/r

are symmetric tridiagonal. Every closed-form entry produced here is pinned
against ``oracle_element``, an independent Gauss-Laguerre integration of
the same matrix element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .numerics import gauss_laguerre, laguerre_table

__all__ = [
    "ChannelSpec",
    "TridiagonalMatrix",
    "basis_norm",
    "overlap_matrix",
    "h0_matrix",
    "j_matrix",
    "oracle_element",
    "conjugate_overlap",
]


@dataclass(frozen=True)
class ChannelSpec:
    """Reference-problem definition.

    Attributes
    ----------
    lam : float
        Laguerre basis scale (1/bohr), > 0.
    ell : int
        Orbital angular momentum, >= 0.
    charge : float
        Coulomb charge Z entering H0 as Z/r. Matrix construction accepts
        any value; the scattering pipeline requires charge = 0.
    """

    lam: float
    ell: int = 0
    charge: float = 0.0

    def __post_init__(self):
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ValueError(f"basis scale must be positive, got {self.lam}")
        if self.ell < 0 or int(self.ell) != self.ell:
            raise ValueError(f"ell must be a nonnegative integer, got {self.ell}")
        if not math.isfinite(self.charge):
            raise ValueError("charge must be finite")


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix: diagonal plus one off-diagonal band."""

    diag: np.ndarray
    off: np.ndarray

    def __post_init__(self):
        if self.off.shape != (self.size - 1,):
            raise ValueError("off-diagonal must have length size - 1")
        if not (np.all(np.isfinite(self.diag)) and np.all(np.isfinite(self.off))):
            raise ValueError("matrix entries must be finite")
        self.diag.flags.writeable = False
        self.off.flags.writeable = False

    @property
    def size(self) -> int:
        return len(self.diag)

    def element(self, i: int, j: int) -> float:
        if not (0 <= i < self.size and 0 <= j < self.size):
            raise IndexError(f"({i}, {j}) outside {self.size}x{self.size}")
        if i == j:
            return float(self.diag[i])
        if abs(i - j) == 1:
            return float(self.off[min(i, j)])
        return 0.0

    def to_dense(self) -> np.ndarray:
        out = np.diag(self.diag)
        idx = np.arange(self.size - 1)
        out[idx, idx + 1] = self.off
        out[idx + 1, idx] = self.off
        return out


def basis_norm(n: int, channel: ChannelSpec) -> float:
    """Normalization a_n = sqrt(lam n! / Gamma(n + 2 ell + 2)).

    Evaluated through log-gamma so degrees up to a few hundred stay in
    float64 range.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    log_ratio = math.lgamma(n + 1.0) - math.lgamma(n + 2.0 * channel.ell + 2.0)
    return math.sqrt(channel.lam) * math.exp(0.5 * log_ratio)


def overlap_matrix(size: int, channel: ChannelSpec) -> TridiagonalMatrix:
    """Basis overlap <phi_n | phi_m>, tridiagonal.

    Diagonal 2(n + ell + 1), off-diagonal -sqrt((n+1)(n + 2 ell + 2)).
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    n = np.arange(size, dtype=float)
    diag = 2.0 * (n + channel.ell + 1.0)
    m = n[:-1]
    off = -np.sqrt((m + 1.0) * (m + 2.0 * channel.ell + 2.0))
    return TridiagonalMatrix(diag=diag, off=off)


def h0_matrix(size: int, channel: ChannelSpec) -> TridiagonalMatrix:
    """Reference Hamiltonian <phi_n | H0 | phi_m>, tridiagonal.

    Kinetic plus centrifugal part: diagonal (lam^2/4)(n + ell + 1),
    off-diagonal (lam^2/8) sqrt((n+1)(n + 2 ell + 2)). The Coulomb term
    Z/r contributes Z*lam on the diagonal only.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    lam = channel.lam
    n = np.arange(size, dtype=float)
    diag = 0.25 * lam * lam * (n + channel.ell + 1.0) + channel.charge * lam
    m = n[:-1]
    off = 0.125 * lam * lam * np.sqrt((m + 1.0) * (m + 2.0 * channel.ell + 2.0))
    return TridiagonalMatrix(diag=diag, off=off)


def j_matrix(size: int, channel: ChannelSpec, energy: float) -> TridiagonalMatrix:
    """Wave-operator matrix J(E) = <phi_n | H0 - E | phi_m>, tridiagonal.

    The basis is not orthogonal, so the energy multiplies the overlap:
    J = H0 - E * Omega.
    """
    if not energy > 0.0:
        raise ValueError(f"energy must be positive, got {energy}")
    h0 = h0_matrix(size, channel)
    omega = overlap_matrix(size, channel)
    return TridiagonalMatrix(diag=h0.diag - energy * omega.diag,
                             off=h0.off - energy * omega.off)


def _poly_basis(degrees: int, channel: ChannelSpec, r: np.ndarray) -> np.ndarray:
    """phi_n(r) * e^(lam r / 2) for n = 0..degrees, shape (degrees+1, len(r)).

    This is the polynomial part of the basis; the exponential is folded
    into the quadrature weight by the caller.
    """
    lam, ell = channel.lam, channel.ell
    y = lam * r
    table = laguerre_table(degrees, 2.0 * ell + 1.0, y)
    norms = np.array([basis_norm(n, channel) for n in range(degrees + 1)])
    return norms[:, None] * np.power(y, ell + 1.0)[None, :] * table


def _poly_basis_deriv(degrees: int, channel: ChannelSpec, r: np.ndarray) -> np.ndarray:
    """d(phi_n)/dr * e^(lam r / 2), using d/dy L_n^a(y) = -L_{n-1}^{a+1}(y)."""
    lam, ell = channel.lam, channel.ell
    y = lam * r
    table = laguerre_table(degrees, 2.0 * ell + 1.0, y)
    dtable = np.zeros_like(table)
    if degrees >= 1:
        dtable[1:] = -laguerre_table(degrees - 1, 2.0 * ell + 2.0, y)
    norms = np.array([basis_norm(n, channel) for n in range(degrees + 1)])
    ypow_l = np.power(y, float(ell))
    bracket = ((ell + 1.0) * ypow_l[None, :] - 0.5 * (ypow_l * y)[None, :]) * table \
        + (ypow_l * y)[None, :] * dtable
    return norms[:, None] * lam * bracket


def _oracle_once(kind: str, n: int, m: int, channel: ChannelSpec,
                 potential, order: int) -> float:
    """One Gauss-Laguerre evaluation of <phi_n | O | phi_m> at fixed order."""
    lam = channel.lam
    decay = potential.decay if kind == "potential" else 0.0
    scale = lam + decay
    rule = gauss_laguerre(order)
    r = rule.nodes / scale
    if kind == "potential":
        phi = _poly_basis(max(n, m), channel, r)
        # e^(-lam r) * e^(-decay r) = e^(-x); only polynomial factors survive.
        vals = phi[n] * phi[m] * potential.v0 * np.power(r, float(potential.power))
        return rule.integrate(vals) / scale
    if kind == "overlap":
        phi = _poly_basis(max(n, m), channel, r)
        return rule.integrate(phi[n] * phi[m]) / scale
    if kind == "coulomb":
        phi = _poly_basis(max(n, m), channel, r)
        return rule.integrate(phi[n] * phi[m] / r) / scale
    if kind == "kinetic":
        dphi = _poly_basis_deriv(max(n, m), channel, r)
        vals = 0.5 * dphi[n] * dphi[m]
        if channel.ell > 0:
            phi = _poly_basis(max(n, m), channel, r)
            vals = vals + channel.ell * (channel.ell + 1.0) * phi[n] * phi[m] / (2.0 * r * r)
        return rule.integrate(vals) / scale
    raise ValueError(f"unknown oracle kind {kind!r}")


def oracle_element(kind: str, n: int, m: int, channel: ChannelSpec,
                   potential=None, order: int | None = None) -> float:
    """Matrix element <phi_n | O | phi_m> by independent quadrature.

    The integrand is reduced to a polynomial through the substitution
    x = (lam + decay) * r, so a sufficiently large rule is exact; the
    result is accepted only if doubling the order moves it by less than
    1e-11 relative.

    Parameters
    ----------
    kind : str
        One of ``overlap``, ``kinetic``, ``coulomb``, ``potential``.
    n, m : int
        Basis indices, >= 0.
    channel : ChannelSpec
    potential : object, optional
        Required for kind ``potential``; must expose ``v0``, ``power``
        and ``decay`` (see scattering.PotentialSpec).
    order : int, optional
        Base quadrature order; defaults to n + m + 2 ell + 8.

    Raises
    ------
    ConvergenceError
        If the order-doubling check fails.
    """
    if n < 0 or m < 0:
        raise ValueError("basis indices must be >= 0")
    if kind == "potential" and potential is None:
        raise ValueError("kind 'potential' requires a potential")
    if order is None:
        order = n + m + 2 * channel.ell + 8
    order = max(order, n + m + 2 * channel.ell + 8)
    first = _oracle_once(kind, n, m, channel, potential, order)
    second = _oracle_once(kind, n, m, channel, potential, 2 * order)
    # Unit absolute floor: vanishing elements (tridiagonality) are judged
    # on the natural O(1) scale of the matrices, not against themselves.
    scale = max(abs(first), abs(second), 1.0)
    if abs(first - second) > 1e-11 * scale:
        raise ConvergenceError(
            f"oracle_element({kind}, {n}, {m}) unstable under order doubling: "
            f"{first!r} vs {second!r}")
    return second


def conjugate_overlap(n: int, m: int, channel: ChannelSpec,
                      order: int | None = None) -> float:
    """<phibar_n | phi_m> by quadrature; should equal delta_nm."""
    if order is None:
        order = n + m + 2 * channel.ell + 8
    lam, ell = channel.lam, channel.ell
    rule = gauss_laguerre(order)
    x = rule.nodes
    table = laguerre_table(max(n, m), 2.0 * ell + 1.0, x)
    an = basis_norm(n, channel)
    am = basis_norm(m, channel)
    vals = an * am * np.power(x, 2.0 * ell + 1.0) * table[n] * table[m]
    return rule.integrate(vals) / lam
