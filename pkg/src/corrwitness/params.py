"""
corrwitness - Tolerances, Defaults & Numerical Parameters

Every numerical threshold used by the library lives here, so a run can be
reproduced from its tolerance set alone.

Conventions:
- Basis ordering is row-major with the system index major:
  |j_S>|l_E>  ->  row j*d_E + l
- Multipartite spaces follow the same rule factor by factor (S, then B, then C;
  spin 1 is the most significant qubit of a chain).
"""
from dataclasses import dataclass, replace
from typing import Any

import numpy as np

# ============================================================================
# VALIDATION TOLERANCES
# ============================================================================

TOL_HERM = 1e-9     # ||M - M^dagger||_max
TOL_TRACE = 1e-9    # |Tr(rho) - 1|
TOL_UNIT = 1e-9     # ||U^dagger U - I||_max, also sum_i E_i^dagger E_i = I
TOL_PSD = 1e-9      # lambda_min(rho) >= -TOL_PSD

# Eigendecomposition residual scales with the dimension
TOL_EIG_PER_DIM = 1e-10

# Eigenvalues of R with |lambda| <= TOL_ZERO_REL * ||R||_max count as zero
TOL_ZERO_REL = 1e-10

# (1/2) Tr|R'_S| above this is a detection
TOL_DET = 1e-9

# ============================================================================
# ALGORITHM LIMITS
# ============================================================================

MAX_BCH_ORDER = 12            # nested-commutator truncation cap
MAX_CHAIN_SPINS = 12          # dense 2^N representation cap
MAX_GRAM_CONDITION = 1e8      # tomography basis conditioning cap

# ============================================================================
# DEFAULTS
# ============================================================================

DEFAULT_T_MAX = 10.0
DEFAULT_STEPS = 200           # grid points, t = 0 and t = t_max included
DEFAULT_SEED = 0
CSV_SIGNIFICANT_DIGITS = 17

THREADS_ENV_VAR = "CORRWITNESS_THREADS"


@dataclass(frozen=True)
class Tolerances:
    """
    Tolerance bundle threaded through every numerical operation.

    Usage:
        >>> from dataclasses import replace
        >>> tol = replace(DEFAULT_TOLERANCES, det=1e-7)
        >>> tol.eig(16)
        1.6e-09
    """

    herm: float = TOL_HERM
    trace: float = TOL_TRACE
    unit: float = TOL_UNIT
    psd: float = TOL_PSD
    eig_per_dim: float = TOL_EIG_PER_DIM
    zero_rel: float = TOL_ZERO_REL
    det: float = TOL_DET

    def __post_init__(self) -> None:
        for name, value in self.__dict__.items():
            if not value > 0:
                raise ValueError(f"Tolerance '{name}' must be positive, got {value}")

    def eig(self, dim: int) -> float:
        """Reconstruction / orthonormality tolerance for a dim x dim problem."""
        return self.eig_per_dim * dim

    def zero(self, matrix: Any) -> float:
        """Magnitude below which an eigenvalue of `matrix` is treated as zero."""
        scale = float(np.max(np.abs(np.asarray(matrix)))) if np.size(matrix) else 0.0
        return self.zero_rel * scale

    def with_overrides(self, **overrides: float) -> "Tolerances":
        """Copy with selected fields replaced (unknown names raise TypeError)."""
        return replace(self, **overrides)


DEFAULT_TOLERANCES = Tolerances()
