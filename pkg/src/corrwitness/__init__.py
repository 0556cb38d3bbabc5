"""
corrwitness - Witnessing Initial System-Environment Correlations

A system S prepared together with an environment E in rho_SE reveals
correlations between them through its reduced dynamics alone: if

    D(rho'_S, sigma'_S) > D(rho_S, sigma_S)

for a locally related pair (rho_SE, sigma_SE), the initial state was
correlated.  The package builds the unitaries that make this happen.

Main pieces:
    witness      - correlation operator R, spectral split, witness and
                   saturating unitaries, detection reports
    protocols    - product replacement, eigenbasis dephasing, correlated
                   environments E = B (x) C
    dynamics     - exp(-iHt) sweeps, BCH expansion, ZZ spin-chain counterexample
    tomography   - linear process tomography with correlated inputs
    operators    - states, channels, partial traces and spectral tools
    symbolic     - exact SymPy reference values

Basis convention: |j_S>|l_E> is row j*d_E + l (system index major).
"""

__version__ = "0.1.0"
__status__ = "Alpha"

from .errors import (
    ConfigurationError,
    ConsistencyError,
    CorrWitnessError,
    DimensionMismatchError,
    EigenDecompositionError,
    IdenticalStatesError,
    InvalidOperatorError,
    NotSaturableError,
    OperatorFileError,
    ScenarioError,
    UncorrelatedStateError,
)
from .params import DEFAULT_TOLERANCES, Tolerances
from .operators import (
    DensityOperator,
    HermitianOperator,
    KrausMap,
    Operator,
    SpaceDims,
    UnitaryOperator,
    apply_kraus,
    apply_kraus_local,
    apply_unitary,
    expm_hermitian,
    half_trace_norm,
    hermitian_eig,
    partial_trace,
    partial_trace_E,
    partial_trace_S,
    random_state,
    random_unitary,
    tensor,
    trace_distance,
)
from .witness import (
    DetectionReport,
    EigenSplit,
    build_R,
    detect_correlation,
    is_saturable,
    near_optimal_unitary,
    optimal_unitary,
    saturate_pair,
    split_spectrum,
    witness_for_operator,
    witness_norm,
    witness_unitary,
)
from .protocols import (
    Provenance,
    ScenarioPair,
    TripartiteState,
    correlation_operators,
    dephase_in_eigenbasis,
    detect_env_correlation,
    prepare_local_map,
    prepare_product_replacement,
)
from .dynamics import (
    SweepResult,
    TimeGrid,
    bch_norm,
    build_undetectable_family,
    build_zz_chain,
    sweep,
    verify_undetectable,
)
from .tomography import (
    OperatorBasis,
    build_basis,
    evaluate_query,
    initial_state_maps,
    linearity_criterion,
    predict_linear,
    run_tomography,
)
from .operator_io import load_operator, write_operator_file
from .validator import check_operator

__all__ = [
    # errors
    "CorrWitnessError", "DimensionMismatchError", "InvalidOperatorError",
    "EigenDecompositionError", "UncorrelatedStateError", "NotSaturableError",
    "IdenticalStatesError", "ScenarioError", "OperatorFileError",
    "ConfigurationError", "ConsistencyError",
    # tolerances
    "Tolerances", "DEFAULT_TOLERANCES",
    # operators
    "Operator", "HermitianOperator", "DensityOperator", "UnitaryOperator", "KrausMap",
    "SpaceDims", "tensor", "partial_trace", "partial_trace_E", "partial_trace_S",
    "trace_distance", "half_trace_norm", "hermitian_eig", "expm_hermitian",
    "apply_unitary", "apply_kraus", "apply_kraus_local", "random_state", "random_unitary",
    # witness
    "build_R", "split_spectrum", "EigenSplit", "witness_unitary", "witness_norm",
    "is_saturable", "optimal_unitary", "near_optimal_unitary", "witness_for_operator",
    "DetectionReport", "detect_correlation", "saturate_pair",
    # protocols
    "Provenance", "ScenarioPair", "TripartiteState", "prepare_product_replacement",
    "prepare_local_map", "dephase_in_eigenbasis", "correlation_operators",
    "detect_env_correlation",
    # dynamics
    "TimeGrid", "SweepResult", "sweep", "bch_norm", "build_zz_chain",
    "build_undetectable_family", "verify_undetectable",
    # tomography
    "OperatorBasis", "build_basis", "initial_state_maps", "run_tomography",
    "predict_linear", "evaluate_query", "linearity_criterion",
    # io
    "load_operator", "write_operator_file", "check_operator",
]
