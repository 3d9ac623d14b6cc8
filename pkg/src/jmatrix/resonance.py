"""Resonance location from the scattering matrix.

A sharp resonance is detected as a peak of |1 - S(E)| higher than 0.5; its
position is then refined as the maximum of the phase-shift slope d(delta)/dE,
the Breit-Wigner center. The slope maximum is the right observable to pin:
it is independent of the smooth background phase (and of the overall
rotation distinguishing the full from the truncated route), whereas the
raw |1 - S| peak sits where the total phase crosses pi/2 and is dragged
away from the center by the background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NoResonanceError
from .scattering import ScatterConfig, ScatterEngine, phase_shift

__all__ = ["ResonanceEstimate", "find_peak", "locate_resonance", "find_resonance"]

#: A peak of |1 - S| must top this to count as a sharp resonance.
MIN_PEAK_HEIGHT = 0.5

_GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)

#: Half-width of the central difference used for the phase slope.
_SLOPE_STEP = 1e-5


@dataclass(frozen=True)
class ResonanceEstimate:
    """Located resonance: center energy, |1 - S| there, final bracket width."""

    energy: float
    peak_height: float
    refinement_width: float


def find_peak(height: Callable[[float], float], window: tuple[float, float],
              tol: float, coarse_step: float = 0.005,
              min_height: float = MIN_PEAK_HEIGHT) -> ResonanceEstimate:
    """Maximum of an arbitrary height function inside ``window``.

    Uniform coarse scan with step at most ``coarse_step`` followed by
    golden-section refinement to bracket width ``tol``. The function must
    be single-peaked within the coarse bracket.

    Raises
    ------
    NoResonanceError
        If no coarse sample exceeds ``min_height``.
    """
    lo, hi = window
    if not (0.0 < lo < hi):
        raise ValueError(f"need 0 < emin < emax, got [{lo}, {hi}]")
    if tol < 1e-6:
        raise ValueError(f"tolerance must be >= 1e-6, got {tol}")
    steps = max(2, int(math.ceil((hi - lo) / coarse_step)) + 1)
    energies = np.linspace(lo, hi, steps)
    values = np.array([height(float(e)) for e in energies])
    best = int(np.argmax(values))
    if not values[best] > min_height:
        raise NoResonanceError(
            f"no peak above {min_height} inside [{lo}, {hi}] "
            f"(best {values[best]:.3f} at E = {energies[best]:.6f})")
    a = float(energies[max(best - 1, 0)])
    b = float(energies[min(best + 1, steps - 1)])
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = height(c)
    fd = height(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = height(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = height(d)
    peak = 0.5 * (a + b)
    return ResonanceEstimate(energy=peak, peak_height=height(peak),
                             refinement_width=b - a)


def locate_resonance(s_of_energy: Callable[[float], complex],
                     window: tuple[float, float], tol: float,
                     coarse_step: float = 0.005,
                     min_height: float = MIN_PEAK_HEIGHT) -> ResonanceEstimate:
    """Breit-Wigner center of a sharp resonance of a unimodular S(E).

    A coarse scan (step at most ``coarse_step``) of |1 - S| gates the
    sharpness: its maximum must exceed ``min_height`` or
    :class:`NoResonanceError` is raised. The same sweep yields the
    unwrapped phase shift, whose finite-difference slope brackets the
    center; golden-section search then maximizes d(delta)/dE down to a
    bracket of width ``tol``.
    """
    lo, hi = window
    if not (0.0 < lo < hi):
        raise ValueError(f"need 0 < emin < emax, got [{lo}, {hi}]")
    if tol < 1e-6:
        raise ValueError(f"tolerance must be >= 1e-6, got {tol}")
    steps = max(3, int(math.ceil((hi - lo) / coarse_step)) + 1)
    energies = np.linspace(lo, hi, steps)
    svals = [s_of_energy(float(e)) for e in energies]
    heights = np.array([abs(1.0 - s) if s == s else -math.inf for s in svals])
    best = int(np.argmax(heights))
    if not heights[best] > min_height:
        raise NoResonanceError(
            f"no |1 - S| peak above {min_height} inside [{lo}, {hi}] "
            f"(best {heights[best]:.3f} at E = {energies[best]:.6f})")
    deltas = []
    prev = None
    for s in svals:
        if s == s:
            prev = phase_shift(s, prev)
            deltas.append(prev)
        else:
            deltas.append(math.nan)
    slopes = np.gradient(np.array(deltas, dtype=float), energies)
    j = int(np.nanargmax(slopes))

    def slope(energy: float) -> float:
        h = _SLOPE_STEP
        d_lo = phase_shift(s_of_energy(energy - h))
        d_hi = phase_shift(s_of_energy(energy + h), previous=d_lo)
        return (d_hi - d_lo) / (2.0 * h)

    a = float(energies[max(j - 1, 0)])
    b = float(energies[min(j + 1, steps - 1)])
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = slope(c)
    fd = slope(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = slope(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = slope(d)
    center = 0.5 * (a + b)
    return ResonanceEstimate(energy=center,
                             peak_height=abs(1.0 - s_of_energy(center)),
                             refinement_width=b - a)


def find_resonance(config: ScatterConfig, window: tuple[float, float],
                   tol: float, route: str = "full") -> ResonanceEstimate:
    """Locate the sharp resonance of a scattering configuration.

    ``route`` selects the curve ("full" keeps the transformation-phase
    factor, "truncated" drops it); the located center agrees between the
    two because the phase factor varies smoothly with energy. Singular
    energies inside the window are offset by the scan rule (relative
    1e-9); an energy that still fails contributes nothing to the search.
    """
    if route not in ("full", "truncated"):
        raise ValueError(f"route must be 'full' or 'truncated', got {route!r}")
    engine = ScatterEngine(config)

    def s_at(energy: float) -> complex:
        point = engine.point_nudged(energy)
        if point.failed:
            return complex(math.nan, math.nan)
        return point.s_truncated if route == "truncated" else point.s_full

    return locate_resonance(s_at, window, tol)
