#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
corrwitness - Detection Protocols

Trace-distance detection scenarios built from local operations on the system:

    sigma_SE = F_S (x) id_E (rho_SE)

    D(rho'_S, sigma'_S) - D(rho_S, sigma_S)
        <= D(rho_SE, rho_S (x) rho_E) + D(sigma_SE, sigma_S (x) sigma_E) + D(rho_E, sigma_E)

An increase of the reduced trace distance under any system-environment
unitary therefore signals initial correlations.  Variants covered here:
product replacement, eigenbasis dephasing (quantum-discord witness),
correlation operators R, R_bar, Q and correlations inside a bipartite
environment E = B (x) C.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as la

from .errors import ConsistencyError, DimensionMismatchError, ScenarioError
from .operators import (
    DensityOperator,
    KrausMap,
    SpaceDims,
    UnitaryOperator,
    _resolve_space,
    apply_kraus_local,
    as_state,
    as_matrix,
    compose,
    hermitian_eig,
    partial_trace,
    product_of_marginals,
    replacement_channel,
    reset_channel,
    trace_distance,
)
from .params import DEFAULT_TOLERANCES, Tolerances
from .witness import (
    DetectionReport,
    split_spectrum,
    unitary_fingerprint,
    witness_norm,
    witness_unitary,
)

_log = logging.getLogger(__name__)

# Channel-vs-assembly agreement for product replacement
REPLACEMENT_CHECK_TOL = 1e-10

Unitary = Union[UnitaryOperator, np.ndarray]


class Provenance(Enum):
    LOCAL_MAP = "local_map"
    PRODUCT_REPLACEMENT = "product_replacement"
    ENV_FACTORIZED = "env_factorized"
    ARBITRARY = "arbitrary"


# ============================================================================
# SCENARIOS
# ============================================================================

@dataclass(frozen=True, eq=False)
class ScenarioPair:
    """
    Two initial states compared through the reduced dynamics.

    LOCAL_MAP and PRODUCT_REPLACEMENT pairs share the environment marginal;
    PRODUCT_REPLACEMENT pairs additionally have sigma_SE = rho_S (x) rho_E.
    """

    rho_SE: DensityOperator
    sigma_SE: DensityOperator
    provenance: Provenance = Provenance.ARBITRARY
    local_map: Optional[KrausMap] = None
    dephasing_basis: Optional[np.ndarray] = None
    degenerate: bool = False
    tol: Tolerances = DEFAULT_TOLERANCES

    def __post_init__(self) -> None:
        if self.rho_SE.dims != self.sigma_SE.dims or len(self.rho_SE.dims) != 2:
            raise DimensionMismatchError(
                f"Pair needs equal bipartite dims, got {self.rho_SE.dims} and {self.sigma_SE.dims}"
            )
        if self.provenance in (Provenance.LOCAL_MAP, Provenance.PRODUCT_REPLACEMENT):
            gap = float(np.max(np.abs(self.rho_E - self.sigma_E)))
            if gap > self.tol.eig(self.space.N):
                raise ScenarioError(f"{self.provenance.value} pair needs sigma_E = rho_E, "
                                    f"max deviation {gap:.3e}")
        if self.provenance is Provenance.PRODUCT_REPLACEMENT:
            gap = float(np.max(np.abs(
                self.sigma_SE.matrix - product_of_marginals(self.rho_SE).matrix)))
            if gap > self.tol.eig(self.space.N):
                raise ScenarioError(f"product replacement needs sigma_SE = rho_S (x) rho_E, "
                                    f"max deviation {gap:.3e}")

    @property
    def space(self) -> SpaceDims:
        return self.rho_SE.space

    @property
    def rho_S(self) -> np.ndarray:
        return as_matrix(partial_trace(self.rho_SE.matrix, self.space.dims, [0]))

    @property
    def rho_E(self) -> np.ndarray:
        return as_matrix(partial_trace(self.rho_SE.matrix, self.space.dims, [1]))

    @property
    def sigma_S(self) -> np.ndarray:
        return as_matrix(partial_trace(self.sigma_SE.matrix, self.space.dims, [0]))

    @property
    def sigma_E(self) -> np.ndarray:
        return as_matrix(partial_trace(self.sigma_SE.matrix, self.space.dims, [1]))

    def evolved_marginals(self, U: Unitary) -> Tuple[np.ndarray, np.ndarray]:
        """(rho'_S, sigma'_S) after the joint unitary."""
        u = as_matrix(U)
        dims = self.space.dims
        return (as_matrix(partial_trace(u @ self.rho_SE.matrix @ u.conj().T, dims, [0])),
                as_matrix(partial_trace(u @ self.sigma_SE.matrix @ u.conj().T, dims, [0])))


@dataclass(frozen=True, eq=False)
class TripartiteState:
    """State on S (x) B (x) C, row-major with S most significant, then B, then C."""

    rho_SBC: DensityOperator
    dims: Tuple[int, int, int]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or self.rho_SBC.dim != int(np.prod(dims)):
            raise DimensionMismatchError(
                f"dims {dims} do not match a {self.rho_SBC.dim}-dimensional state"
            )
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_parts(cls, rho_S: Union[DensityOperator, np.ndarray],
                   rho_BC: Union[DensityOperator, np.ndarray],
                   d_B: int, d_C: int) -> "TripartiteState":
        """rho_S (x) rho_BC."""
        s, bc = as_matrix(rho_S), as_matrix(rho_BC)
        if bc.shape[0] != d_B * d_C:
            raise DimensionMismatchError(f"rho_BC has size {bc.shape[0]}, expected {d_B * d_C}")
        state = DensityOperator(np.kron(s, bc), (s.shape[0], d_B * d_C))
        return cls(state, (s.shape[0], d_B, d_C))

    @property
    def env_space(self) -> SpaceDims:
        """S | BC bipartition."""
        return SpaceDims(self.dims[0], self.dims[1] * self.dims[2])

    @property
    def rho_S(self) -> np.ndarray:
        return as_matrix(partial_trace(self.rho_SBC.matrix, self.dims, [0]))

    @property
    def rho_BC(self) -> np.ndarray:
        return as_matrix(partial_trace(self.rho_SBC.matrix, self.dims, [1, 2]))

    @property
    def rho_B(self) -> np.ndarray:
        return as_matrix(partial_trace(self.rho_SBC.matrix, self.dims, [1]))

    @property
    def rho_C(self) -> np.ndarray:
        return as_matrix(partial_trace(self.rho_SBC.matrix, self.dims, [2]))

    def system_factorized(self, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        product = np.kron(self.rho_S, self.rho_BC)
        gap = float(np.max(np.abs(self.rho_SBC.matrix - product)))
        return gap <= tol.eig(self.rho_SBC.dim)

    def as_pair(self, sigma_S: Optional[Union[DensityOperator, np.ndarray]] = None,
                tol: Tolerances = DEFAULT_TOLERANCES) -> ScenarioPair:
        """(rho_S (x) rho_BC, sigma_S (x) rho_B (x) rho_C) on the S | BC split."""
        space = self.env_space
        sig_S = self.rho_S if sigma_S is None else as_matrix(sigma_S)
        if sig_S.shape != (space.d_S, space.d_S):
            raise DimensionMismatchError(
                f"sigma_S shape {sig_S.shape} does not match d_S = {space.d_S}"
            )
        sigma = np.kron(sig_S, np.kron(self.rho_B, self.rho_C))
        return ScenarioPair(as_state(self.rho_SBC, space, tol),
                            DensityOperator(sigma, space.dims, tol=tol),
                            Provenance.ENV_FACTORIZED, tol=tol)


# ============================================================================
# STATE PREPARATION
# ============================================================================

def prepare_product_replacement(rho_SE: Union[DensityOperator, np.ndarray],
                                dims: Optional[Union[SpaceDims, Sequence[int]]] = None,
                                tol: Tolerances = DEFAULT_TOLERANCES) -> ScenarioPair:
    """
    sigma_SE = F_S (x) id_E (rho_SE) with F_S = Lambda_S o reset-to-|0>.

    Lambda_S is the preparation channel sending |0_S><0_S| to rho_S. The
    channel output is cross-checked against rho_S (x) rho_E.

    Raises:
        ConsistencyError: channel output and direct assembly disagree
    """
    space = _resolve_space(rho_SE, dims)
    rho = as_state(rho_SE, space, tol)
    rho_S = as_matrix(partial_trace(rho.matrix, space.dims, [0]))

    prepare = replacement_channel(rho_S, tol=tol)
    f_S = compose(prepare, reset_channel(space.d_S))
    sigma = apply_kraus_local(f_S, rho, space)

    assembled = product_of_marginals(rho, space)
    gap = trace_distance(sigma, assembled)
    if gap > REPLACEMENT_CHECK_TOL:
        raise ConsistencyError(
            f"replacement channel output differs from rho_S (x) rho_E by D = {gap:.3e}"
        )
    _log.debug("prepare_product_replacement: %d Kraus operators, check D=%.2e", len(f_S), gap)
    return ScenarioPair(rho, DensityOperator(sigma.matrix, space.dims, tol=tol),
                        Provenance.PRODUCT_REPLACEMENT, local_map=f_S, tol=tol)


def _preferred_basis(cluster: np.ndarray) -> np.ndarray:
    """
    Orthonormal basis of span(cluster) closest to the computational basis.

    Pivoted QR of the projector onto the span takes the computational basis
    vectors with the largest projections first; phases are fixed so that the
    triangular factor has a positive diagonal.
    """
    k = cluster.shape[1]
    projector = cluster @ cluster.conj().T
    q, r, _ = la.qr(projector, pivoting=True)
    pivots = np.diag(r)[:k]
    if np.min(np.abs(pivots)) <= 1e-6:
        raise ConsistencyError(f"could not span a {k}-dimensional eigenspace")
    return q[:, :k] * (pivots / np.abs(pivots)).conj()


def eigenbasis_with_preference(rho_S: Union[DensityOperator, np.ndarray],
                               tol: Tolerances = DEFAULT_TOLERANCES
                               ) -> Tuple[np.ndarray, bool]:
    """
    Eigenbasis of rho_S; degenerate eigenspaces get the computational-preferred basis.

    Returns:
        (basis columns, whether any degenerate eigenspace was found)
    """
    a = as_matrix(rho_S)
    d = a.shape[0]
    values, vectors = hermitian_eig(a, tol)
    gap_tol = tol.eig(d)
    columns = []
    degenerate = False
    start = 0
    while start < d:
        stop = start + 1
        while stop < d and abs(values[stop - 1] - values[stop]) <= gap_tol:
            stop += 1
        cluster = vectors[:, start:stop]
        if stop - start > 1:
            degenerate = True
            _log.warning("rho_S eigenvalue %.6g is %d-fold degenerate; dephasing basis "
                         "chosen closest to the computational basis", values[start], stop - start)
            cluster = _preferred_basis(cluster)
        columns.append(cluster)
        start = stop
    return np.hstack(columns), degenerate


def dephase_in_eigenbasis(rho_SE: Union[DensityOperator, np.ndarray],
                          dims: Optional[Union[SpaceDims, Sequence[int]]] = None,
                          tol: Tolerances = DEFAULT_TOLERANCES) -> ScenarioPair:
    """
    sigma_SE = sum_k (P_k (x) I) rho_SE (P_k (x) I), P_k = |b_k><b_k| over an eigenbasis of rho_S.

    A later increase of the reduced trace distance witnesses correlations that
    are not classical on the system side. The chosen basis is returned on the pair.
    """
    space = _resolve_space(rho_SE, dims)
    rho = as_state(rho_SE, space, tol)
    rho_S = as_matrix(partial_trace(rho.matrix, space.dims, [0]))
    basis, degenerate = eigenbasis_with_preference(rho_S, tol)

    projectors = KrausMap(tuple(np.outer(b, b.conj()) for b in basis.T), tol=tol)
    sigma = apply_kraus_local(projectors, rho, space)
    return ScenarioPair(rho, DensityOperator(sigma.matrix, space.dims, tol=tol),
                        Provenance.LOCAL_MAP, local_map=projectors,
                        dephasing_basis=basis, degenerate=degenerate, tol=tol)


def prepare_local_map(rho_SE: Union[DensityOperator, np.ndarray], f_S: KrausMap,
                      dims: Optional[Union[SpaceDims, Sequence[int]]] = None,
                      tol: Tolerances = DEFAULT_TOLERANCES) -> ScenarioPair:
    """sigma_SE = F_S (x) id_E (rho_SE) for an arbitrary local channel."""
    space = _resolve_space(rho_SE, dims)
    rho = as_state(rho_SE, space, tol)
    if f_S.d_out != f_S.d_in:
        raise DimensionMismatchError("local map must preserve the system dimension")
    sigma = apply_kraus_local(f_S, rho, space)
    return ScenarioPair(rho, DensityOperator(sigma.matrix, space.dims, tol=tol),
                        Provenance.LOCAL_MAP, local_map=f_S, tol=tol)


# ============================================================================
# BOUNDS
# ============================================================================

class CorrelationOperators(NamedTuple):
    R: np.ndarray       # rho_S (x) rho_E - rho_SE
    R_bar: np.ndarray   # sigma_S (x) sigma_E - sigma_SE
    Q: np.ndarray       # rho_S (x) rho_E - sigma_S (x) rho_E


def correlation_operators(pair: ScenarioPair) -> CorrelationOperators:
    """
    R, R_bar and Q of a pair.

    When sigma_E = rho_E they satisfy rho_SE - sigma_SE = R_bar - R + Q.
    """
    rho_E = pair.rho_E
    R = np.kron(pair.rho_S, rho_E) - pair.rho_SE.matrix
    R_bar = np.kron(pair.sigma_S, pair.sigma_E) - pair.sigma_SE.matrix
    Q = np.kron(pair.rho_S - pair.sigma_S, rho_E)
    return CorrelationOperators(R, R_bar, Q)


def bound_rhs_full(pair: ScenarioPair) -> float:
    """D(rho_SE, rho_S (x) rho_E) + D(sigma_SE, sigma_S (x) sigma_E) + D(rho_E, sigma_E)."""
    return (trace_distance(pair.rho_SE, np.kron(pair.rho_S, pair.rho_E))
            + trace_distance(pair.sigma_SE, np.kron(pair.sigma_S, pair.sigma_E))
            + trace_distance(pair.rho_E, pair.sigma_E))


def detection_gain(pair: ScenarioPair, U: Unitary) -> float:
    """D(rho'_S, sigma'_S) - D(rho_S, sigma_S)."""
    rho_S_t, sigma_S_t = pair.evolved_marginals(U)
    return trace_distance(rho_S_t, sigma_S_t) - trace_distance(pair.rho_S, pair.sigma_S)


def _require_shared_environment(pair: ScenarioPair) -> None:
    gap = float(np.max(np.abs(pair.rho_E - pair.sigma_E)))
    if gap > pair.tol.eig(pair.space.N):
        raise ScenarioError(f"pair violates sigma_E = rho_E (max deviation {gap:.3e})")


def bound_rhs_R(pair: ScenarioPair, U: Unitary) -> Tuple[float, float]:
    """
    ((1/2) Tr|R'_S|, (1/2) Tr|R_bar'_S|) for a pair sharing the environment marginal.

    Their sum bounds the detection gain.

    Raises:
        ScenarioError: sigma_E != rho_E
    """
    _require_shared_environment(pair)
    ops = correlation_operators(pair)
    space = pair.space
    return witness_norm(ops.R, U, space), witness_norm(ops.R_bar, U, space)


def q_bound(pair: ScenarioPair, U: Unitary) -> float:
    """(1/2) Tr|Tr_E(U Q U^dagger)|, never above D(rho_S, sigma_S)."""
    return witness_norm(correlation_operators(pair).Q, U, pair.space)


# ============================================================================
# ENVIRONMENT CORRELATIONS
# ============================================================================

def detect_env_correlation(tri: TripartiteState, U: Optional[Unitary] = None,
                           sigma_S: Optional[Union[DensityOperator, np.ndarray]] = None,
                           tol: Tolerances = DEFAULT_TOLERANCES
                           ) -> Tuple[UnitaryOperator, DetectionReport]:
    """
    Detect correlations between B and C through the system alone.

    Compares rho_S (x) rho_BC with sigma_S (x) rho_B (x) rho_C (sigma_S defaults
    to rho_S) under U acting on S (x) BC. The report carries

        achieved = D(rho'_S, sigma'_S) - D(rho_S, sigma_S)
        bound    = D(rho_BC, rho_B (x) rho_C)
        witness_norm = (1/2) Tr|Tr_BC(U R U^dagger)|,
        R = rho_S (x) rho_B (x) rho_C - rho_S (x) rho_BC

    When U is None the witness unitary of R is built.

    Raises:
        ScenarioError: S is correlated with BC
        UncorrelatedStateError: U is None and rho_BC is a product
    """
    if not tri.system_factorized(tol):
        raise ScenarioError("system must be in a product state with the environment BC")
    space = tri.env_space
    pair = tri.as_pair(sigma_S, tol)
    env_product = np.kron(tri.rho_B, tri.rho_C)
    R = np.kron(pair.rho_S, env_product) - pair.rho_SE.matrix

    if U is None:
        U = witness_unitary(split_spectrum(R, space.d_E, tol), space, tol=tol)
    elif not isinstance(U, UnitaryOperator):
        U = UnitaryOperator(U, space.dims, tol=tol)

    gain = detection_gain(pair, U)
    norm = witness_norm(R, U, space)
    report = DetectionReport(
        bound=trace_distance(tri.rho_BC, env_product),
        achieved=gain,
        witness_norm=norm,
        detectable=norm > tol.det,
        unitary_id=unitary_fingerprint(U),
    )
    return U, report

