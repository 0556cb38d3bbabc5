#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
corrwitness - Witness and Saturating Unitaries

For a correlated state rho_SE the Hermitian operator

    R = rho_S (x) rho_E - rho_SE,       Tr_E(R) = 0,  Tr_S(R) = 0

is nonzero.  Splitting its spectrum into n nonnegative and N - n nonpositive
eigenvalues with n = m*d_E + r, a unitary that sends m*d_E same-sign
eigenvectors onto the product states |j_S>|l_E> with j < m makes
R'_S = Tr_E(U R U^dagger) nonzero.  When r = 0 and 0 < m < d_S the same
construction reaches the upper bound

    (1/2) Tr|R'_S| = D(rho_SE, rho_S (x) rho_E) = sum of positive eigenvalues.

Usage:
    >>> split = split_spectrum(build_R(rho_SE), d_E=2)
    >>> U = witness_unitary(split, SpaceDims(2, 2))
    >>> witness_norm(build_R(rho_SE), U)
"""
import hashlib
import logging
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as la

from .errors import (
    ConsistencyError,
    DimensionMismatchError,
    IdenticalStatesError,
    NotSaturableError,
    ScenarioError,
    UncorrelatedStateError,
)
from .operators import (
    DensityOperator,
    HermitianOperator,
    Operator,
    SpaceDims,
    UnitaryOperator,
    _resolve_space,
    as_matrix,
    half_trace_norm,
    hermitian_eig,
    partial_trace,
    product_of_marginals,
    trace_distance,
)
from .params import DEFAULT_TOLERANCES, Tolerances

_log = logging.getLogger(__name__)

# Inequality slack used by DetectionReport
BOUND_SLACK = 1e-9


# ============================================================================
# DATA CONTAINERS
# ============================================================================

@dataclass(frozen=True)
class ZeroAssignment:
    """How eigenvalues classified as zero were distributed between the sign sets."""

    n_zeros: int
    to_plus: int
    threshold: float

    @property
    def to_minus(self) -> int:
        return self.n_zeros - self.to_plus


@dataclass(frozen=True, eq=False)
class EigenSplit:
    """
    Sign split of a traceless Hermitian spectrum.

    `values` are descending, so the plus set is values[:n] and the minus set
    values[n:]; `vectors[:, k]` belongs to `values[k]`.
    """

    values: np.ndarray
    vectors: np.ndarray
    n: int
    d_E: int
    zero_assignment: ZeroAssignment

    def __post_init__(self) -> None:
        N = self.values.shape[0]
        if self.vectors.shape != (N, N):
            raise DimensionMismatchError(
                f"Eigenvector matrix shape {self.vectors.shape} does not match {N} eigenvalues"
            )
        if N % self.d_E:
            raise DimensionMismatchError(f"N = {N} is not a multiple of d_E = {self.d_E}")
        if not 0 <= self.n <= N:
            raise ValueError(f"n must lie in [0, {N}], got {self.n}")

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def d_S(self) -> int:
        return self.N // self.d_E

    @property
    def m(self) -> int:
        return self.n // self.d_E

    @property
    def r(self) -> int:
        return self.n % self.d_E

    @property
    def n_minus(self) -> int:
        return self.N - self.n

    @property
    def plus_values(self) -> np.ndarray:
        return self.values[: self.n]

    @property
    def plus_vectors(self) -> np.ndarray:
        return self.vectors[:, : self.n]

    @property
    def minus_values(self) -> np.ndarray:
        return self.values[self.n:]

    @property
    def minus_vectors(self) -> np.ndarray:
        return self.vectors[:, self.n:]

    @property
    def positive_mass(self) -> float:
        """Sum of the plus-set eigenvalues (= (1/2) sum |lambda| for traceless R)."""
        return float(np.sum(self.plus_values))

    def reconstruct(self) -> np.ndarray:
        """V diag(lambda) V^dagger."""
        return (self.vectors * self.values) @ self.vectors.conj().T


@dataclass(frozen=True)
class DetectionReport:
    """
    Outcome of one detection inequality evaluated for a unitary U.

    bound is the right-hand side, achieved the left-hand side; witness_norm is
    (1/2) Tr|R'_S| for the correlation operator R of the scenario.
    """

    bound: float
    achieved: float
    witness_norm: float
    detectable: bool
    unitary_id: str
    n: Optional[int] = None
    m: Optional[int] = None
    r: Optional[int] = None
    saturated: Optional[bool] = None

    def __post_init__(self) -> None:
        if self.achieved > self.bound + BOUND_SLACK:
            raise ConsistencyError(
                f"Inequality violated: achieved {self.achieved:.15g} > bound {self.bound:.15g}"
            )
        if self.witness_norm < 0:
            raise ConsistencyError(f"witness_norm must be nonnegative, got {self.witness_norm}")

    def to_dict(self) -> Dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if v is not None}


# ============================================================================
# CORRELATION OPERATOR
# ============================================================================

def build_R(rho_SE: Union[DensityOperator, np.ndarray],
            dims: Optional[Union[SpaceDims, Sequence[int]]] = None) -> HermitianOperator:
    """R = rho_S (x) rho_E - rho_SE; zero iff rho_SE is a product state."""
    space = _resolve_space(rho_SE, dims)
    product = product_of_marginals(rho_SE, space)
    return HermitianOperator.unchecked(product.matrix - as_matrix(rho_SE), space.dims)


def reduced_witness(R: Union[Operator, np.ndarray], U: Union[Operator, np.ndarray],
                    dims: Optional[Union[SpaceDims, Sequence[int]]] = None) -> np.ndarray:
    """R'_S = Tr_E(U R U^dagger)."""
    space = _resolve_space(R, dims)
    u = as_matrix(U)
    evolved = u @ as_matrix(R) @ u.conj().T
    return as_matrix(partial_trace(evolved, space.dims, keep=[0]))


def witness_norm(R: Union[Operator, np.ndarray], U: Union[Operator, np.ndarray],
                 dims: Optional[Union[SpaceDims, Sequence[int]]] = None) -> float:
    """(1/2) Tr|Tr_E(U R U^dagger)|."""
    return half_trace_norm(reduced_witness(R, U, dims))


def unitary_fingerprint(U: Union[Operator, np.ndarray]) -> str:
    """Short stable identifier of a unitary (sha256 of its complex128 bytes)."""
    data = np.ascontiguousarray(as_matrix(U), dtype=np.complex128).tobytes()
    return hashlib.sha256(data).hexdigest()[:16]


# ============================================================================
# SPECTRAL SPLIT
# ============================================================================

def _best_zero_count(n_strict: int, n_zeros: int, d_E: int) -> int:
    """
    Number of zeros to move into the plus set.

    Zero eigenvalues are interchangeable for the construction, so counting
    k = 0..n_zeros covers every assignment; minimises (n mod d_E, n).
    """
    return min(range(n_zeros + 1), key=lambda k: ((n_strict + k) % d_E, n_strict + k))


def split_spectrum(R: Union[Operator, np.ndarray], d_E: int,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> EigenSplit:
    """
    Split the spectrum of a traceless Hermitian R into plus and minus sets.

    Eigenvalues with |lambda| <= tol.zero(R) count as zero and are assigned so
    that r = n mod d_E is minimal, preferring smaller n on ties.

    Raises:
        UncorrelatedStateError: R = 0
        ScenarioError: R not traceless
    """
    a = as_matrix(R)
    N = a.shape[0]
    if d_E < 1 or N % d_E:
        raise DimensionMismatchError(f"Operator size {N} is not a multiple of d_E = {d_E}")
    scale = float(np.max(np.abs(a)))
    # entries at rounding level of a product state count as R = 0
    if scale <= tol.eig(N):
        raise UncorrelatedStateError("state is uncorrelated: R = 0")
    threshold = tol.zero(a)
    values, vectors = hermitian_eig(a, tol)
    if np.all(np.abs(values) <= threshold):
        raise UncorrelatedStateError("state is uncorrelated: R = 0")
    trace = float(np.sum(values))
    if abs(trace) > tol.eig(N) * max(1.0, scale):
        raise ScenarioError(f"R must be traceless, got Tr(R) = {trace:.3e}")

    n_strict = int(np.sum(values > threshold))
    n_zeros = int(np.sum(np.abs(values) <= threshold))
    k = _best_zero_count(n_strict, n_zeros, d_E)
    split = EigenSplit(values, vectors, n_strict + k, d_E,
                       ZeroAssignment(n_zeros=n_zeros, to_plus=k, threshold=threshold))
    _log.debug("split_spectrum: N=%d n_strict=%d zeros=%d -> n=%d m=%d r=%d",
               N, n_strict, n_zeros, split.n, split.m, split.r)
    return split


# ============================================================================
# UNITARY CONSTRUCTION
# ============================================================================

def _ordered_eigenvectors(split: EigenSplit, use_plus: bool, m: int) -> np.ndarray:
    """
    Columns of V in image order: the m*d_E chosen-sign eigenvectors of largest
    |lambda| first, then every remaining eigenvector by descending |lambda|.
    """
    if use_plus:
        chosen_vals, chosen_vecs = split.plus_values, split.plus_vectors
        other_vals, other_vecs = split.minus_values, split.minus_vectors
    else:
        chosen_vals, chosen_vecs = split.minus_values, split.minus_vectors
        other_vals, other_vecs = split.plus_values, split.plus_vectors

    order = np.argsort(-np.abs(chosen_vals), kind="stable")
    chosen_vals, chosen_vecs = chosen_vals[order], chosen_vecs[:, order]
    k = m * split.d_E
    tail_vals = np.concatenate([chosen_vals[k:], other_vals])
    tail_vecs = np.hstack([chosen_vecs[:, k:], other_vecs])
    tail_order = np.argsort(-np.abs(tail_vals), kind="stable")
    return np.hstack([chosen_vecs[:, :k], tail_vecs[:, tail_order]])


def witness_unitary(split: EigenSplit, dims: Union[SpaceDims, Sequence[int]],
                    block_unitaries: Optional[Tuple[np.ndarray, np.ndarray]] = None,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> UnitaryOperator:
    """
    Unitary with Tr_E(U R U^dagger) != 0.

    Uses the plus set when m >= 1, otherwise the minus set with the mirrored
    layout. U maps the k-th ordered eigenvector to the k-th computational
    product state, so the first m*d_E images are |j_S>|l_E> with j < m.

    Args:
        split: spectral split of a nonzero traceless R
        dims: (d_S, d_E)
        block_unitaries: optional (W_1, W_2) acting inside the two image blocks
            (sizes k and N - k, k = m*d_E); default identity

    Returns:
        UnitaryOperator on dims
    """
    space = SpaceDims.of(dims)
    if space.N != split.N or space.d_E != split.d_E:
        raise DimensionMismatchError(
            f"Split over N={split.N}, d_E={split.d_E} does not match dims {space.dims}"
        )
    if split.m >= 1:
        use_plus, m = True, split.m
    else:
        use_plus, m = False, split.n_minus // split.d_E
        if m < 1:
            raise ConsistencyError(
                f"m = 0 on both sign sets (n={split.n}, N={split.N}, d_E={split.d_E})"
            )
        _log.debug("witness_unitary: m = 0 on the plus set, mirroring with m_minus=%d", m)

    u = _ordered_eigenvectors(split, use_plus, m).conj().T
    if block_unitaries is not None:
        k = m * split.d_E
        w1, w2 = (np.asarray(w, dtype=complex) for w in block_unitaries)
        if w1.shape != (k, k) or w2.shape != (split.N - k, split.N - k):
            raise DimensionMismatchError(
                f"Block unitaries must be {k}x{k} and {split.N - k}x{split.N - k}, "
                f"got {w1.shape} and {w2.shape}"
            )
        u = la.block_diag(w1, w2) @ u
    return UnitaryOperator(u, space.dims, tol=tol)


def is_saturable(split: EigenSplit) -> bool:
    """n = m*d_E with 0 < m < d_S after the zero assignment."""
    return split.r == 0 and 0 < split.m < split.d_S


def optimal_unitary(split: EigenSplit, dims: Union[SpaceDims, Sequence[int]],
                    tol: Tolerances = DEFAULT_TOLERANCES) -> UnitaryOperator:
    """
    Saturating unitary: every positive eigenvector lands in system rows j < m,
    so (1/2) Tr|R'_S| equals the positive eigenvalue mass of R.

    Raises:
        NotSaturableError: n is not a multiple of d_E
    """
    if not is_saturable(split):
        raise NotSaturableError(
            f"not saturable: n = {split.n} positive eigenvalues is not m*d_E "
            f"with 0 < m < d_S (d_E = {split.d_E}, d_S = {split.d_S})"
        )
    return witness_unitary(split, dims, tol=tol)


@dataclass(frozen=True, eq=False)
class NearOptimalResult:
    unitary: UnitaryOperator
    witness_norm: float
    moved_mass: float     # sum |lambda| moved across the sign boundary
    m: int


def near_optimal_unitary(split: EigenSplit, dims: Union[SpaceDims, Sequence[int]],
                         tol: Tolerances = DEFAULT_TOLERANCES) -> NearOptimalResult:
    """
    Best block unitary over every admissible n' = m'*d_E, 0 < m' < d_S.

    Reaching n' moves the eigenvalues closest to zero across the sign
    boundary; the gap to the saturation value is at most the moved mass.
    For a saturable split the result coincides with optimal_unitary.
    """
    space = SpaceDims.of(dims)
    R = split.reconstruct()
    best: Optional[NearOptimalResult] = None
    for m_target in range(1, space.d_S):
        n_target = m_target * split.d_E
        lo, hi = sorted((split.n, n_target))
        moved = float(np.sum(np.abs(split.values[lo:hi])))
        candidate = replace(split, n=n_target)
        U = witness_unitary(candidate, space, tol=tol)
        value = witness_norm(R, U, space)
        _log.debug("near_optimal: m'=%d moved=%.3e norm=%.12g", m_target, moved, value)
        if best is None or value > best.witness_norm or (
                value == best.witness_norm and moved < best.moved_mass):
            best = NearOptimalResult(U, value, moved, m_target)
    if best is None:
        raise DimensionMismatchError(f"near_optimal_unitary needs d_S >= 2, got {space.d_S}")
    return best


def witness_for_operator(X: Union[Operator, np.ndarray],
                         dims: Optional[Union[SpaceDims, Sequence[int]]] = None,
                         tol: Tolerances = DEFAULT_TOLERANCES
                         ) -> Tuple[UnitaryOperator, float]:
    """
    Witness unitary for any Hermitian X with Tr_E(X) = 0.

    Returns:
        (U, (1/2) Tr|Tr_E(U X U^dagger)|)
    """
    space = _resolve_space(X, dims)
    a = as_matrix(X)
    reduced = as_matrix(partial_trace(a, space.dims, keep=[0]))
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(reduced))) > tol.eig(space.N) * scale:
        raise ScenarioError("operator is not traceless over the environment")
    split = split_spectrum(a, space.d_E, tol)
    U = witness_unitary(split, space, tol=tol)
    return U, witness_norm(a, U, space)


# ============================================================================
# REPORTS
# ============================================================================

def detect_correlation(rho_SE: Union[DensityOperator, np.ndarray],
                       U: Optional[Union[UnitaryOperator, np.ndarray]] = None,
                       dims: Optional[Union[SpaceDims, Sequence[int]]] = None,
                       tol: Tolerances = DEFAULT_TOLERANCES
                       ) -> Tuple[UnitaryOperator, DetectionReport]:
    """
    Product-replacement detection of rho_SE for a unitary U.

    With sigma_SE = rho_S (x) rho_E the gain D(rho'_S, sigma'_S) equals
    (1/2) Tr|R'_S| and the bound is D(rho_SE, rho_S (x) rho_E). When U is
    None the witness unitary of R is constructed.

    Raises:
        UncorrelatedStateError: U is None and rho_SE is a product state
    """
    space = _resolve_space(rho_SE, dims)
    R = build_R(rho_SE, space)
    bound = half_trace_norm(R)
    split: Optional[EigenSplit] = None
    try:
        split = split_spectrum(R, space.d_E, tol)
    except UncorrelatedStateError:
        if U is None:
            raise
    if U is None:
        U = witness_unitary(split, space, tol=tol)
    elif not isinstance(U, UnitaryOperator):
        U = UnitaryOperator(U, space.dims, tol=tol)
    value = witness_norm(R, U, space)
    report = DetectionReport(
        bound=bound,
        achieved=value,
        witness_norm=value,
        detectable=value > tol.det,
        unitary_id=unitary_fingerprint(U),
        n=None if split is None else split.n,
        m=None if split is None else split.m,
        r=None if split is None else split.r,
        saturated=None if split is None else is_saturable(split),
    )
    return U, report


def saturate_pair(rho_SE: Union[DensityOperator, np.ndarray],
                  sigma_SE: Union[DensityOperator, np.ndarray],
                  dims: Optional[Union[SpaceDims, Sequence[int]]] = None,
                  tol: Tolerances = DEFAULT_TOLERANCES
                  ) -> Tuple[UnitaryOperator, DetectionReport]:
    """
    Unitary maximising D(rho'_S, sigma'_S) against the bound D(rho_SE, sigma_SE).

    Uses R = sigma_SE - rho_SE. Saturation is reached iff the split is
    saturable; otherwise the witness unitary is returned and achieved < bound.

    Raises:
        IdenticalStatesError: sigma_SE = rho_SE
    """
    space = _resolve_space(rho_SE, dims)
    a, b = as_matrix(rho_SE), as_matrix(sigma_SE)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"State shapes differ: {a.shape} vs {b.shape}")
    R = b - a
    try:
        split = split_spectrum(R, space.d_E, tol)
    except UncorrelatedStateError as exc:
        raise IdenticalStatesError("sigma_SE equals rho_SE within tolerance") from exc

    saturable = is_saturable(split)
    if saturable:
        U = optimal_unitary(split, space, tol)
    else:
        _log.warning("saturate_pair: n=%d is not a multiple of d_E=%d, using witness unitary",
                     split.n, split.d_E)
        U = witness_unitary(split, space, tol=tol)
    achieved = witness_norm(R, U, space)
    report = DetectionReport(
        bound=trace_distance(a, b),
        achieved=achieved,
        witness_norm=achieved,
        detectable=achieved > tol.det,
        unitary_id=unitary_fingerprint(U),
        n=split.n,
        m=split.m,
        r=split.r,
        saturated=saturable,
    )
    return U, report
