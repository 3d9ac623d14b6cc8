"""Exception types shared across the package."""

from __future__ import annotations


class JMatrixError(Exception):
    """Base class for errors raised by this package."""


class SingularMatrixError(JMatrixError):
    """Linear system is singular or numerically unusable (condition above 1e14)."""


class ConvergenceError(JMatrixError):
    """Iterative kernel (root polishing, quadrature doubling) failed to converge."""


class UnsupportedChannelError(JMatrixError):
    """Channel outside the closed-form kinematics (Coulomb charge or ell > 0)."""


class DegeneratePhaseError(JMatrixError):
    """Transformation-phase evaluation hit a vanishing or singular denominator."""

    def __init__(self, message: str, energy: float | None = None):
        super().__init__(message)
        self.energy = energy


class NearSingularEnergyError(JMatrixError):
    """Energy too close to a discrete eigenvalue of the truncated pencil."""

    def __init__(self, message: str, energy: float | None = None,
                 condition: float | None = None):
        super().__init__(message)
        self.energy = energy
        self.condition = condition


class NoResonanceError(JMatrixError):
    """Resonance search found no peak above the sharpness threshold."""


class ConfigError(JMatrixError):
    """Invalid run configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
