"""Deterministic special-function and small dense linear-algebra kernels.

All routines are pure functions of their inputs: identical calls return
identical values, and nothing here keeps mutable state, so concurrent use
is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, SingularMatrixError

__all__ = [
    "QuadratureRule",
    "laguerre_eval",
    "laguerre_table",
    "gauss_laguerre",
    "solve_linear",
    "assert_symmetric",
    "principal_angle",
    "unwrap_angle_sequence",
]

#: Condition number beyond which a dense solve is reported as unusable.
CONDITION_LIMIT = 1e14


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Laguerre rule for the weight e^(-x) on [0, inf).

    Attributes
    ----------
    order : int
        Number of points; exact for polynomials of degree <= 2*order - 1.
    nodes : np.ndarray
        Strictly increasing positive abscissae (roots of L_order).
    weights : np.ndarray
        Positive weights; they sum to 1 (the total weight integral).
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("quadrature order must be >= 1")
        if self.nodes.shape != (self.order,) or self.weights.shape != (self.order,):
            raise ValueError("nodes/weights must have shape (order,)")
        if not (np.all(np.diff(self.nodes) > 0.0) and self.nodes[0] > 0.0):
            raise ValueError("nodes must be strictly increasing and positive")
        if not np.all(self.weights > 0.0):
            raise ValueError("weights must be positive")
        self.nodes.flags.writeable = False
        self.weights.flags.writeable = False

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum for integrand values sampled at the nodes.

        ``values`` must already exclude the e^(-x) weight factor.
        """
        return float(self.weights @ np.asarray(values))


def laguerre_eval(n: int, alpha: float, x):
    """Generalized Laguerre polynomial L_n^alpha(x) by upward recurrence.

    The three-term recurrence in the degree is forward stable for x >= 0,
    which is the only region this package evaluates.

    Parameters
    ----------
    n : int
        Degree, >= 0.
    alpha : float
        Parameter, must exceed -1.
    x : float or array_like
        Evaluation points, >= 0.

    Returns
    -------
    float or np.ndarray
        L_n^alpha at ``x``, matching the input shape.
    """
    if n < 0:
        raise ValueError("degree n must be >= 0")
    if alpha <= -1.0:
        raise ValueError("alpha must exceed -1")
    arr = np.asarray(x, dtype=float)
    prev = np.zeros_like(arr)
    cur = np.ones_like(arr)
    for k in range(n):
        cur, prev = ((2.0 * k + alpha + 1.0 - arr) * cur - (k + alpha) * prev) / (k + 1.0), cur
    if np.ndim(x) == 0:
        return float(cur)
    return cur


def laguerre_table(nmax: int, alpha: float, x: np.ndarray) -> np.ndarray:
    """All L_n^alpha(x) for n = 0..nmax, as an array of shape (nmax+1, len(x))."""
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    if alpha <= -1.0:
        raise ValueError("alpha must exceed -1")
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1, x.size), dtype=float)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 1.0 + alpha - x
    for k in range(1, nmax):
        out[k + 1] = ((2.0 * k + alpha + 1.0 - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1.0)
    return out


def _laguerre_pair(m: int, z: float) -> tuple[float, float]:
    """(L_m(z), L_{m-1}(z)) for alpha = 0 at a scalar point."""
    prev = 0.0
    cur = 1.0
    for k in range(m):
        cur, prev = ((2.0 * k + 1.0 - z) * cur - k * prev) / (k + 1.0), cur
    return cur, prev


# Compensated (double-double) helpers, vectorized over numpy arrays. Plain
# float64 evaluation of L_m leaves an absolute noise floor of order m*eps
# which limits the small quadrature nodes to ~1e-13 relative accuracy;
# one compensated Newton polish removes that floor.

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _two_prod(a, b):
    p = a * b
    ca = _SPLITTER * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLITTER * b
    bhi = cb - (cb - b)
    blo = b - bhi
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    return _quick_two_sum(s, e + (al + bl))


def _dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    return _quick_two_sum(p, e + (ah * bl + al * bh))


def _dd_mul_d(ah, al, b):
    p, e = _two_prod(ah, b)
    return _quick_two_sum(p, e + al * b)


def _dd_div_d(ah, al, b):
    q1 = ah / b
    p, pe = _two_prod(q1, b)
    s, e = _two_sum(ah, -p)
    q2 = (s + (e + (al - pe))) / b
    return _quick_two_sum(q1, q2)


def _laguerre_pair_dd(m: int, z: np.ndarray):
    """Compensated (L_m, L_{m-1}) for alpha = 0 at an array of points.

    Returns double-double pairs ((Lm_hi, Lm_lo), (Lp_hi, Lp_lo)).
    """
    ph = np.zeros_like(z)
    pl = np.zeros_like(z)
    ch = np.ones_like(z)
    cl = np.zeros_like(z)
    for k in range(m):
        th, tl = _two_sum(np.full_like(z, 2.0 * k + 1.0), -z)
        ah, al = _dd_mul(th, tl, ch, cl)
        bh, bl = _dd_mul_d(ph, pl, float(k))
        nh, nl = _dd_add(ah, al, -bh, -bl)
        ph, pl = ch, cl
        ch, cl = _dd_div_d(nh, nl, k + 1.0)
    return (ch, cl), (ph, pl)


@lru_cache(maxsize=128)
def gauss_laguerre(m: int) -> QuadratureRule:
    """Gauss-Laguerre nodes and weights by Newton polishing.

    Starting guesses are the classical asymptotic estimates for the roots
    of L_m; each root is polished to 1e-14 relative with at most 100
    Newton steps. Weights use w_i = x_i / ((m+1) L_{m+1}(x_i))^2.

    Parameters
    ----------
    m : int
        Order, 1 <= m <= 170. Beyond that the weight denominator
        ((m+1) L_{m+1})^2 overflows float64 near the largest root.

    Returns
    -------
    QuadratureRule

    Raises
    ------
    ConvergenceError
        If a root fails to settle within the iteration budget.
    """
    if m < 1:
        raise ValueError("quadrature order must be >= 1")
    if m > 170:
        raise ValueError(f"order {m} exceeds the float64-safe limit 170")
    nodes = np.empty(m)
    weights = np.empty(m)
    z = 0.0
    for i in range(m):
        if i == 0:
            z = 3.0 / (1.0 + 2.4 * m)
        elif i == 1:
            z = z + 15.0 / (1.0 + 2.5 * m)
        else:
            step = i - 1.0
            z = z + ((1.0 + 2.55 * step) / (1.9 * step)) * (z - nodes[i - 2])
        converged = False
        for _ in range(100):
            pm, pm1 = _laguerre_pair(m, z)
            dp = m * (pm - pm1) / z
            dz = pm / dp
            z -= dz
            if converged:
                break
            # One polish step after the tolerance is met: the small roots
            # need full relative accuracy or the weights drift above 1e-14.
            converged = abs(dz) <= 1e-14 * max(abs(z), 1.0)
        else:
            raise ConvergenceError(f"Laguerre root {i} of order {m} did not converge")
        nodes[i] = z
    # Two compensated Newton sweeps push every root to full double
    # accuracy, then the weights w = x / ((m+1) L_{m+1}(x))^2 follow from
    # a compensated evaluation of L_{m+1}.
    for _ in range(2):
        (lh, ll), (kh, kl) = _laguerre_pair_dd(m, nodes)
        dh, dl = _dd_add(lh, ll, -kh, -kl)
        deriv = m * (dh + dl) / nodes
        nodes = nodes - (lh + ll) / deriv
    (nh, nl), _ = _laguerre_pair_dd(m + 1, nodes)
    gh, gl = _dd_mul_d(nh, nl, m + 1.0)
    sq_h, sq_l = _dd_mul(gh, gl, gh, gl)
    weights = nodes / (sq_h + sq_l)
    # Rescale to the exactly known total mass (the weight function
    # integrates to 1), pinning the zeroth moment.
    weights /= math.fsum(weights)
    return QuadratureRule(order=m, nodes=nodes, weights=weights)


def solve_linear(a, b):
    """Solve the dense system a @ x = b with a usability gate.

    Partial-pivot LU factorization (LAPACK gesv via numpy) at dimensions of
    at most a few hundred; the 2-norm condition number is estimated first
    and anything above 1e14, or a non-finite matrix, is reported instead of
    producing garbage.

    Raises
    ------
    SingularMatrixError
        Singular or numerically singular system.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"dimension mismatch: matrix {a.shape}, rhs {b.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularMatrixError(
            f"condition estimate {cond:.3e} exceeds {CONDITION_LIMIT:.1e}")
    try:
        return np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - gated above
        raise SingularMatrixError(str(exc)) from exc


def assert_symmetric(a, scale_tol: float = 1e-12):
    """Raise if a dense matrix deviates from symmetry beyond the tolerance.

    The deviation |A_ij - A_ji| is compared against ``scale_tol`` times the
    largest magnitude in the matrix.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    scale = float(np.max(np.abs(a)))
    deviation = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if deviation > scale_tol * max(scale, 1e-300):
        raise ValueError(
            f"matrix asymmetry {deviation:.3e} exceeds {scale_tol:.1e} "
            f"of scale {scale:.3e}")


def principal_angle(value: float, period: float = math.pi) -> float:
    """Reduce an angle to the principal branch (-period/2, period/2]."""
    reduced = math.remainder(value, period)
    if reduced <= -0.5 * period:
        reduced += period
    return reduced + 0.0  # normalize -0.0


def unwrap_angle_sequence(values, period: float = math.pi) -> np.ndarray:
    """Unwrap a sequence of angles defined modulo ``period``.

    The first element is reduced to the principal branch; every later
    element is shifted by an integer multiple of the period so adjacent
    differences never exceed period/2 in magnitude.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("cannot unwrap an empty sequence")
    unwrapped = np.unwrap(arr, period=period)
    shift = principal_angle(unwrapped[0], period) - unwrapped[0]
    return unwrapped + shift
