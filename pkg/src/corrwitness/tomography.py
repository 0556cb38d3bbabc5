#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
corrwitness - Linear Process Tomography under Initial Correlations

Starting from an unknown rho_SE^(1), local channels prepare

    rho_SE^(i) = F_S^(i) (x) id_E (rho_SE^(1)),   i = 1..d_S^2

whose system marginals rho_S^(i) span the operators on H_S.  Assuming a
linear reduced map, any rho_S = sum_i a_i rho_S^(i) is predicted to evolve to
sum_i a_i rho'_S^(i).  Writing

    rho_SE = sum_i a_i rho_SE^(i) + Y,   Tr_E(Y) = 0,

the prediction is exact iff Tr_E(U Y U^dagger) = 0, and the prediction error
equals (1/2) Tr|Tr_E(U Y U^dagger)|.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as la

from .errors import ConsistencyError, DimensionMismatchError, ScenarioError
from .operators import (
    DensityOperator,
    KrausMap,
    Operator,
    SpaceDims,
    UnitaryOperator,
    _resolve_space,
    apply_kraus,
    apply_kraus_local,
    as_matrix,
    identity_channel,
    partial_trace,
    replacement_channel,
    trace_distance,
)
from .params import DEFAULT_TOLERANCES, MAX_GRAM_CONDITION, Tolerances
from .witness import witness_norm

_log = logging.getLogger(__name__)

# F_S^(i)(rho_S^(1)) must reproduce the basis state to this accuracy
BASIS_REALIZATION_TOL = 1e-10

# allowed |prediction error - Y norm|: floor + ulps * eps * cond(Gram)
ERROR_MATCH_TOL = 1e-8
ERROR_MATCH_ULPS = 64

Matrix = Union[Operator, np.ndarray]


# ============================================================================
# OPERATOR BASIS
# ============================================================================

@dataclass(frozen=True, eq=False)
class OperatorBasis:
    """
    d^2 linearly independent states with their Hilbert-Schmidt Gram matrix.

    Raises ScenarioError when the Gram condition number exceeds max_condition.
    """

    states: Tuple[DensityOperator, ...]
    max_condition: float = MAX_GRAM_CONDITION

    def __post_init__(self) -> None:
        states = tuple(self.states)
        if not states:
            raise ScenarioError("operator basis needs at least one state")
        d = states[0].dim
        if len(states) != d * d or any(s.dim != d for s in states):
            raise DimensionMismatchError(
                f"basis for d = {d} needs {d * d} states of size {d}, got {len(states)}"
            )
        object.__setattr__(self, "states", states)
        if self.condition > self.max_condition:
            raise ScenarioError(
                f"basis Gram matrix is ill-conditioned: cond = {self.condition:.3e} "
                f"> {self.max_condition:.1e}"
            )

    @property
    def d(self) -> int:
        return self.states[0].dim

    @property
    def stacked(self) -> np.ndarray:
        """(d^2, d, d) array of the basis matrices."""
        return np.stack([s.matrix for s in self.states])

    @property
    def gram(self) -> np.ndarray:
        """G_ij = Tr(rho_i rho_j), real symmetric."""
        flat = self.stacked.reshape(len(self.states), -1)
        return np.real(flat.conj() @ flat.T)

    @property
    def condition(self) -> float:
        return float(np.linalg.cond(self.gram))

    def combine(self, coefficients: Sequence[float]) -> np.ndarray:
        """sum_i a_i rho_i."""
        return _combine(coefficients, [s.matrix for s in self.states])


def _combine(coefficients: Sequence[float], matrices: Sequence[np.ndarray]) -> np.ndarray:
    return np.tensordot(np.asarray(coefficients), np.stack(matrices), axes=1)


def build_basis(d: int) -> OperatorBasis:
    """
    Informationally complete family on C^d.

    |i><i| for every i, then for each pair i < j the projectors onto
    (|i> + |j>)/sqrt 2 and (|i> + i|j>)/sqrt 2. For d = 2 this is
    |0>, |1>, |+>, |+i>.
    """
    if d < 2:
        raise DimensionMismatchError(f"basis dimension must be at least 2, got {d}")

    def unit(i: int, j: int) -> np.ndarray:
        m = np.zeros((d, d), dtype=complex)
        m[i, j] = 1.0
        return m

    states = [DensityOperator(unit(i, i)) for i in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            diag = unit(i, i) + unit(j, j)
            states.append(DensityOperator((diag + unit(i, j) + unit(j, i)) / 2))
            states.append(DensityOperator((diag - 1j * unit(i, j) + 1j * unit(j, i)) / 2))
    return OperatorBasis(tuple(states))


def expand_in_basis(rho_S: Matrix, basis: OperatorBasis) -> np.ndarray:
    """
    Real coefficients a with rho_S = sum_i a_i rho_S^(i).

    A basis element itself expands to the exact unit vector.
    """
    target = as_matrix(rho_S)
    if target.shape != (basis.d, basis.d):
        raise DimensionMismatchError(f"expected a {basis.d}x{basis.d} operator, got {target.shape}")
    n = len(basis.states)
    for k, state in enumerate(basis.states):
        if np.array_equal(state.matrix, target):
            return np.eye(n)[k]
    flat = basis.stacked.reshape(n, -1)
    rhs = np.real(flat.conj() @ target.reshape(-1))
    return la.solve(basis.gram, rhs, assume_a="sym")


def initial_state_maps(rho_S1: Matrix, tol: Tolerances = DEFAULT_TOLERANCES
                       ) -> Tuple[OperatorBasis, Tuple[KrausMap, ...]]:
    """
    Preparation maps realising a basis that starts with rho_S^(1) itself.

    The identity comes first; the remaining d^2 - 1 maps replace the system
    by members of build_basis(d). The member left out is the one whose
    removal keeps the Gram matrix best conditioned.
    """
    s1 = as_matrix(rho_S1)
    d = s1.shape[0]
    first = DensityOperator(s1, tol=tol)
    family = build_basis(d).states

    best: Optional[Tuple[float, int]] = None
    for skip in range(len(family)):
        candidate = (first,) + tuple(s for k, s in enumerate(family) if k != skip)
        try:
            cond = OperatorBasis(candidate).condition
        except ScenarioError:
            continue
        if best is None or cond < best[0]:
            best = (cond, skip)
    if best is None:
        raise ScenarioError("no basis member can be exchanged for rho_S^(1)")

    members = tuple(s for k, s in enumerate(family) if k != best[1])
    basis = OperatorBasis((first,) + members)
    maps = (identity_channel(d),) + tuple(replacement_channel(s, tol=tol) for s in members)
    _log.debug("initial_state_maps: d=%d, replaced member %d, cond=%.3e", d, best[1], best[0])
    return basis, maps


# ============================================================================
# TOMOGRAPHY
# ============================================================================

@dataclass(frozen=True, eq=False)
class TomographyRecord:
    """Prepared states, their evolved marginals and the queried Y norms."""

    basis: OperatorBasis
    maps: Tuple[KrausMap, ...]
    prepared: Tuple[np.ndarray, ...]
    outputs: Tuple[DensityOperator, ...]
    unitary: UnitaryOperator
    space: SpaceDims
    y_norms: Tuple[float, ...] = ()

    @property
    def max_y_norm(self) -> float:
        return max(self.y_norms, default=0.0)


def run_tomography(rho_SE1: Matrix, U: Matrix, basis_maps: Sequence[KrausMap],
                   basis: Optional[OperatorBasis] = None,
                   queries: Optional[Sequence[Matrix]] = None,
                   dims: Optional[Union[SpaceDims, Sequence[int]]] = None,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> TomographyRecord:
    """
    Prepare rho_SE^(i) = F_S^(i) (x) id_E (rho_SE^(1)), evolve them and record rho'_S^(i).

    Args:
        rho_SE1: the unknown initial state
        U: joint unitary implementing the process
        basis_maps: F_S^(i), one per basis state
        basis: expected rho_S^(i); built from F_S^(i)(rho_S^(1)) when omitted
        queries: states whose Y norms are recorded; default is the locally
            prepared rho_S^(1) (x) rho_E^(1)

    Raises:
        ScenarioError: the maps do not realise the basis
    """
    space = _resolve_space(rho_SE1, dims)
    rho = as_matrix(rho_SE1)
    u = as_matrix(U)
    unitary = U if isinstance(U, UnitaryOperator) else UnitaryOperator(u, space.dims, tol=tol)
    rho_S1 = as_matrix(partial_trace(rho, space.dims, [0]))

    realised = [apply_kraus(f, rho_S1, tol) for f in basis_maps]
    if basis is None:
        basis = OperatorBasis(tuple(realised))
    if len(basis_maps) != len(basis.states):
        raise ScenarioError(f"need {len(basis.states)} preparation maps, got {len(basis_maps)}")
    for k, (got, want) in enumerate(zip(realised, basis.states)):
        gap = float(np.max(np.abs(got.matrix - want.matrix)))
        if gap > BASIS_REALIZATION_TOL:
            raise ScenarioError(f"map {k} does not realise basis state {k} (deviation {gap:.3e})")

    prepared = tuple(as_matrix(apply_kraus_local(f, rho, space)) for f in basis_maps)
    outputs = tuple(
        DensityOperator(as_matrix(partial_trace(u @ p @ u.conj().T, space.dims, [0])), tol=tol)
        for p in prepared
    )
    record = TomographyRecord(basis, tuple(basis_maps), prepared, outputs, unitary, space)

    if queries is None:
        queries = [np.kron(rho_S1, as_matrix(partial_trace(rho, space.dims, [1])))]
    norms = tuple(witness_norm(y_operator(record, q), u, space) for q in queries)
    _log.debug("run_tomography: %d prepared states, max Y norm %.3e",
               len(prepared), max(norms, default=0.0))
    return TomographyRecord(basis, tuple(basis_maps), prepared, outputs, unitary, space, norms)


class Prediction(NamedTuple):
    matrix: np.ndarray         # sum_i a_i rho'_S^(i), Hermitian, unit trace
    coefficients: np.ndarray
    positive: bool             # False when linear prediction left the state space


def predict_linear(record: TomographyRecord, rho_S_query: Matrix,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> Prediction:
    """
    Linear prediction sum_i a_i rho'_S^(i). Not clamped: a non-positive result
    is returned as is with positive=False.
    """
    a = expand_in_basis(rho_S_query, record.basis)
    matrix = _combine(a, [o.matrix for o in record.outputs])
    lam_min = float(la.eigvalsh(matrix)[0])
    return Prediction(matrix, a, lam_min >= -tol.psd)


def y_operator(record: TomographyRecord, rho_SE: Matrix) -> np.ndarray:
    """Y = rho_SE - sum_i a_i rho_SE^(i), with a from the system marginal of rho_SE."""
    space = record.space
    x = as_matrix(rho_SE)
    if x.shape != (space.N, space.N):
        raise DimensionMismatchError(f"expected a {space.N}x{space.N} state, got {x.shape}")
    a = expand_in_basis(partial_trace(x, space.dims, [0]), record.basis)
    return x - _combine(a, record.prepared)


@dataclass(frozen=True)
class QueryResult:
    """One tomography query; the prediction error equals y_norm."""

    prediction: np.ndarray
    truth: np.ndarray
    trace_distance_error: float
    positivity_flag: bool      # True when the prediction is not positive semidefinite
    y_norm: float

    def to_dict(self, query: Any = None) -> Dict[str, Any]:
        return {
            "query": query,
            "prediction": _complex_matrix_dict(self.prediction),
            "truth": _complex_matrix_dict(self.truth),
            "trace_distance_error": self.trace_distance_error,
            "positivity_flag": self.positivity_flag,
            "Y_norm": self.y_norm,
        }


def _complex_matrix_dict(m: np.ndarray) -> Dict[str, List[List[float]]]:
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


def error_match_tolerance(basis: OperatorBasis) -> float:
    """Allowed gap between prediction error and Y norm for this basis."""
    return ERROR_MATCH_TOL + ERROR_MATCH_ULPS * float(np.finfo(float).eps) * basis.condition


def evaluate_query(record: TomographyRecord, rho_SE_query: Matrix,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> QueryResult:
    """Predict, evolve exactly and compare one query state."""
    space = record.space
    x = as_matrix(rho_SE_query)
    u = record.unitary.matrix
    prediction = predict_linear(record, partial_trace(x, space.dims, [0]), tol)
    truth = as_matrix(partial_trace(u @ x @ u.conj().T, space.dims, [0]))
    error = trace_distance(prediction.matrix, truth)
    y_norm = witness_norm(y_operator(record, x), u, space)
    allowed = error_match_tolerance(record.basis)
    if abs(error - y_norm) > allowed:
        raise ConsistencyError(
            f"prediction error {error:.3e} differs from Y norm {y_norm:.3e} (allowed {allowed:.1e})"
        )
    return QueryResult(prediction.matrix, truth, error, not prediction.positive, y_norm)


class LinearityVerdict(NamedTuple):
    linear: bool
    norms: Tuple[float, ...]
    max_norm: float


def linearity_criterion(record: TomographyRecord, rho_SE_set: Sequence[Matrix],
                        U: Optional[Matrix] = None,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> LinearityVerdict:
    """
    Reduced dynamics is linear on the set iff every (1/2) Tr|Tr_E(U Y U^dagger)| <= tol.det.

    U defaults to the record's unitary.
    """
    u = record.unitary.matrix if U is None else as_matrix(U)
    norms = tuple(witness_norm(y_operator(record, x), u, record.space) for x in rho_SE_set)
    worst = max(norms, default=0.0)
    return LinearityVerdict(worst <= tol.det, norms, worst)


def local_family(rho_SE1: Matrix, maps: Sequence[KrausMap],
                 dims: Optional[Union[SpaceDims, Sequence[int]]] = None) -> List[np.ndarray]:
    """F_S (x) id_E (rho_SE^(1)) for every map: members of the locally reachable set."""
    space = _resolve_space(rho_SE1, dims)
    return [as_matrix(apply_kraus_local(f, as_matrix(rho_SE1), space)) for f in maps]
