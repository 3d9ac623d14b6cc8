"""J-matrix potential scattering in a Laguerre basis with deformed
reference Hamiltonians.

The reference problem (kinetic + centrifugal + optional Coulomb term) is
represented tridiagonally over a Laguerre basis and solved in closed form;
finite symmetric deformations of its matrix (rank-one ground-state
coupling, a coupled lowest-two-states block, or a bridge between two
distant states) are absorbed into a real transformation phase tau(mu, E),
and the S-matrix of a short-range model potential is assembled with or
without that phase factor.
"""

from .basis import (ChannelSpec, TridiagonalMatrix, h0_matrix, j_matrix,
                    oracle_element, overlap_matrix)
from .deformation import (DeformationSpec, PhaseResult, build_deformation,
                          deformed_factors, tau_block_three, tau_numeric,
                          tau_one_param)
from .errors import (ConfigError, ConvergenceError, DegeneratePhaseError,
                     JMatrixError, NearSingularEnergyError, NoResonanceError,
                     SingularMatrixError, UnsupportedChannelError)
from .kinematics import (EnergyPoint, KinematicTable, energy_point,
                         kinematic_table, recursion_residual)
from .numerics import (QuadratureRule, gauss_laguerre, laguerre_eval,
                       solve_linear, unwrap_angle_sequence)
from .resonance import ResonanceEstimate, find_peak, find_resonance, locate_resonance
from .scattering import (EnergyGrid, PhaseRow, PotentialSpec, ScanTable,
                         ScatterConfig, ScatterEngine, SMatrixPoint,
                         energy_scan, green_last, phase_scan, phase_shift,
                         potential_matrix, s_matrix, s_matrix_folded)

__version__ = "0.1.0"

__all__ = [
    "ChannelSpec", "TridiagonalMatrix", "overlap_matrix", "h0_matrix",
    "j_matrix", "oracle_element",
    "EnergyPoint", "KinematicTable", "energy_point", "kinematic_table",
    "recursion_residual",
    "DeformationSpec", "PhaseResult", "build_deformation", "tau_one_param",
    "tau_block_three", "tau_numeric", "deformed_factors",
    "PotentialSpec", "ScatterConfig", "EnergyGrid", "SMatrixPoint",
    "ScanTable", "PhaseRow", "ScatterEngine", "potential_matrix",
    "green_last", "s_matrix", "s_matrix_folded", "phase_shift",
    "energy_scan", "phase_scan",
    "ResonanceEstimate", "find_peak", "locate_resonance", "find_resonance",
    "QuadratureRule", "gauss_laguerre", "laguerre_eval", "solve_linear",
    "unwrap_angle_sequence",
    "JMatrixError", "SingularMatrixError", "ConvergenceError",
    "UnsupportedChannelError", "DegeneratePhaseError",
    "NearSingularEnergyError", "NoResonanceError", "ConfigError",
]
