#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
corrwitness - Time-Independent Hamiltonian Dynamics

For U(t) = exp(-iHt) the reduced correlation operator

    R'_S(t) = Tr_E(U R U^dagger) = Tr_E(R + [R, T] + [[R, T], T]/2! + ...),  T = iHt

is analytic in t and vanishes at t = 0.  If it is nonzero at one time it is
nonzero at almost all times, so detection is generic along a trajectory.

ZZ spin chain (spin 1 = most significant qubit):

    H = sum_{j=1}^{N-1} J_j Z_j Z_{j+1}

With the system on spins 1..n-1 and spin n in a state in the xy plane of the
Bloch sphere, correlations of rho_SE stay invisible for all times although
U(t) does not factorize across the S|E cut.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigurationError, DimensionMismatchError, ScenarioError
from .operators import (
    PAULIS,
    DensityOperator,
    Eigensystem,
    HermitianOperator,
    KrausMap,
    Operator,
    SpaceDims,
    _resolve_space,
    _rng,
    apply_kraus_local,
    as_matrix,
    half_trace_norm,
    hermitian_eig,
    operator_schmidt_rank,
    partial_trace,
    permute_subsystems,
    random_kraus,
    random_state,
    trace_distance,
    unitary_from_eig,
)
from .params import (
    CSV_SIGNIFICANT_DIGITS,
    DEFAULT_STEPS,
    DEFAULT_T_MAX,
    DEFAULT_TOLERANCES,
    MAX_BCH_ORDER,
    MAX_CHAIN_SPINS,
    Tolerances,
)

_log = logging.getLogger(__name__)

Matrix = Union[Operator, np.ndarray]

# Generic time for the non-factorization check of the chain evolution
SCHMIDT_SAMPLE_TIME = 0.7


# ============================================================================
# TIME GRID
# ============================================================================

@dataclass(frozen=True)
class TimeGrid:
    """
    Uniform grid of `steps` points on [0, t_max], both ends included.

    Point k is t_max * (k / (steps - 1)); refining by an integer factor
    reproduces the shared points bitwise.
    """

    t_max: float = DEFAULT_T_MAX
    steps: int = DEFAULT_STEPS
    times: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.t_max > 0:
            raise ConfigurationError(f"t_max must be positive, got {self.t_max}")
        if int(self.steps) < 2:
            raise ConfigurationError(f"steps must be at least 2, got {self.steps}")
        object.__setattr__(self, "steps", int(self.steps))
        times = float(self.t_max) * (np.arange(self.steps) / (self.steps - 1))
        times.setflags(write=False)
        object.__setattr__(self, "times", times)

    def refine(self, factor: int) -> "TimeGrid":
        """Grid whose every `factor`-th point is a point of this grid."""
        if factor < 1:
            raise ConfigurationError(f"refinement factor must be positive, got {factor}")
        return TimeGrid(self.t_max, (self.steps - 1) * factor + 1)

    def __len__(self) -> int:
        return self.steps


def evolutions(H: Matrix, grid: TimeGrid, tol: Tolerances = DEFAULT_TOLERANCES
               ) -> Iterator[np.ndarray]:
    """exp(-iHt) for every grid time, from one eigendecomposition of H."""
    eig = hermitian_eig(H, tol)
    for t in grid.times:
        yield unitary_from_eig(eig, t).matrix


def _parallel_map(func: Callable[[Any], Any], items: Sequence[Any], workers: int) -> List[Any]:
    """Order-preserving map, threaded when workers > 1."""
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


# ============================================================================
# SWEEPS
# ============================================================================

@dataclass(frozen=True, eq=False)
class SweepResult:
    """Per-time detection trajectory."""

    times: np.ndarray
    witness_norms: np.ndarray
    trace_distances: np.ndarray
    td_rate: np.ndarray
    tol_det: float = DEFAULT_TOLERANCES.det

    @property
    def detected(self) -> np.ndarray:
        return self.witness_norms > self.tol_det

    @property
    def detected_fraction(self) -> float:
        """Fraction of grid times t > 0 with witness_norm above the threshold."""
        mask = self.times > 0
        if not np.any(mask):
            return 0.0
        return float(np.mean(self.detected[mask]))

    @property
    def first_detection_time(self) -> Optional[float]:
        hits = np.flatnonzero(self.detected)
        return float(self.times[hits[0]]) if hits.size else None

    @property
    def max_norm(self) -> float:
        return float(np.max(self.witness_norms))

    def summary(self) -> Dict[str, Any]:
        return {
            "detected_fraction": self.detected_fraction,
            "first_detection_time": self.first_detection_time,
            "max_norm": self.max_norm,
        }

    def csv_rows(self, digits: int = CSV_SIGNIFICANT_DIGITS) -> List[str]:
        """Header plus one 't,witness_norm,trace_distance,td_rate' row per time."""
        fmt = f"{{:.{digits}g}}"
        rows = ["t,witness_norm,trace_distance,td_rate"]
        for values in zip(self.times, self.witness_norms, self.trace_distances, self.td_rate):
            rows.append(",".join(fmt.format(float(v)) for v in values))
        return rows


def sweep(H: Matrix, rho_SE: Matrix, sigma_SE: Matrix, grid: TimeGrid,
          dims: Optional[Union[SpaceDims, Sequence[int]]] = None, workers: int = 1,
          tol: Tolerances = DEFAULT_TOLERANCES) -> SweepResult:
    """
    Trajectory of (1/2) Tr|R'_S(t)| and D(rho_S(t), sigma_S(t)) for R = sigma_SE - rho_SE.

    Args:
        H: Hermitian generator on H_S (x) H_E
        rho_SE, sigma_SE: initial states with equal system marginals
        grid: time grid
        dims: (d_S, d_E) when the operators carry no bipartite labels
        workers: thread count for the per-time evaluations (result order is fixed)

    Raises:
        ScenarioError: Tr_E(sigma_SE - rho_SE) != 0
    """
    space = _resolve_space(rho_SE, dims)
    h, rho, sigma = as_matrix(H), as_matrix(rho_SE), as_matrix(sigma_SE)
    if not h.shape == rho.shape == sigma.shape:
        raise DimensionMismatchError(
            f"H, rho_SE, sigma_SE shapes differ: {h.shape}, {rho.shape}, {sigma.shape}"
        )
    R = sigma - rho
    defect = float(np.max(np.abs(as_matrix(partial_trace(R, space.dims, [0])))))
    if defect > tol.eig(space.N):
        raise ScenarioError(f"sweep needs Tr_E(sigma_SE - rho_SE) = 0, deviation {defect:.3e}")

    eig = hermitian_eig(h, tol)

    def point(t: float) -> Tuple[float, float]:
        u = unitary_from_eig(eig, t).matrix
        rho_t = as_matrix(partial_trace(u @ rho @ u.conj().T, space.dims, [0]))
        sigma_t = as_matrix(partial_trace(u @ sigma @ u.conj().T, space.dims, [0]))
        return half_trace_norm(sigma_t - rho_t), trace_distance(rho_t, sigma_t)

    values = np.array(_parallel_map(point, grid.times, workers), dtype=float)
    norms, distances = values[:, 0], values[:, 1]
    _log.debug("sweep: %d points, max witness norm %.3e", grid.steps, float(np.max(norms)))
    return SweepResult(
        times=grid.times,
        witness_norms=norms,
        trace_distances=distances,
        td_rate=np.gradient(distances, grid.times),
        tol_det=tol.det,
    )


def witness_trajectory(H: Matrix, X: Matrix, grid: TimeGrid,
                       dims: Optional[Union[SpaceDims, Sequence[int]]] = None,
                       tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """(1/2) Tr|Tr_E(U(t) X U(t)^dagger)| over the grid for any operator X."""
    space = _resolve_space(X, dims)
    x = as_matrix(X)
    return np.array([
        half_trace_norm(as_matrix(partial_trace(u @ x @ u.conj().T, space.dims, [0])))
        for u in evolutions(H, grid, tol)
    ])


def bch_reduced(H: Matrix, R: Matrix, t: float, order: int,
                dims: Optional[Union[SpaceDims, Sequence[int]]] = None) -> np.ndarray:
    """
    Tr_E(sum_{k<=order} ad_T^k(R) / k!) with T = iHt and ad_T(A) = [A, T].

    Differs from Tr_E(U(t) R U(t)^dagger) by O(t^(order+1)).
    """
    if not 0 <= order <= MAX_BCH_ORDER:
        raise ConfigurationError(f"order must lie in [0, {MAX_BCH_ORDER}], got {order}")
    space = _resolve_space(R, dims)
    T = 1j * as_matrix(H) * t
    term = as_matrix(R).copy()
    total = term.copy()
    for k in range(1, order + 1):
        term = (term @ T - T @ term) / k
        total = total + term
    return as_matrix(partial_trace(total, space.dims, [0]))


def bch_norm(H: Matrix, R: Matrix, t: float, order: int,
             dims: Optional[Union[SpaceDims, Sequence[int]]] = None) -> float:
    """(1/2) Tr|bch_reduced(H, R, t, order)|, the truncated witness norm."""
    return half_trace_norm(bch_reduced(H, R, t, order, dims))


def local_hamiltonian(H_S: Matrix, H_E: Matrix) -> HermitianOperator:
    """H_S (x) I + I (x) H_E."""
    hs, he = as_matrix(H_S), as_matrix(H_E)
    d_S, d_E = hs.shape[0], he.shape[0]
    h = np.kron(hs, np.eye(d_E)) + np.kron(np.eye(d_S), he)
    return HermitianOperator(h, (d_S, d_E))


# ============================================================================
# ZZ SPIN CHAIN
# ============================================================================

def _check_chain(n_spins: int, site: Optional[int] = None) -> None:
    if not 2 <= n_spins <= MAX_CHAIN_SPINS:
        raise ConfigurationError(
            f"chain length must lie in [2, {MAX_CHAIN_SPINS}], got {n_spins}"
        )
    if site is not None and not 2 <= site <= n_spins:
        raise ConfigurationError(f"site must lie in [2, {n_spins}], got {site}")


def _spin_signs(n_spins: int) -> np.ndarray:
    """z_j(b) in {+1, -1} for every basis index b (rows) and spin j (columns)."""
    index = np.arange(2 ** n_spins)[:, None]
    shifts = n_spins - 1 - np.arange(n_spins)
    return 1 - 2 * ((index >> shifts) & 1)


def build_zz_chain(n_spins: int, couplings: Optional[Sequence[float]] = None) -> HermitianOperator:
    """
    Nearest-neighbour ZZ Hamiltonian on an open chain.

    Args:
        n_spins: chain length, 2 <= n_spins <= 12
        couplings: per-bond J_j (length n_spins - 1); default all 1

    Returns:
        Diagonal HermitianOperator with dims (2,) * n_spins
    """
    _check_chain(n_spins)
    J = np.ones(n_spins - 1) if couplings is None else np.asarray(couplings, dtype=float)
    if J.shape != (n_spins - 1,):
        raise ConfigurationError(f"need {n_spins - 1} couplings, got {J.shape[0]}")
    z = _spin_signs(n_spins)
    diagonal = (z[:, :-1] * z[:, 1:]) @ J
    return HermitianOperator(np.diag(diagonal.astype(complex)), (2,) * n_spins)


def pauli_z_at(n_spins: int, site: int) -> np.ndarray:
    """Z acting on spin `site` (1-based) of the chain."""
    return np.diag(_spin_signs(n_spins)[:, site - 1].astype(complex))


def chain_space(n_spins: int, site: int) -> SpaceDims:
    """System = spins 1..site-1, environment = spins site..n_spins."""
    _check_chain(n_spins, site)
    return SpaceDims(2 ** (site - 1), 2 ** (n_spins - site + 1))


def _embed(blocks: np.ndarray, spin_order: Sequence[int], n_spins: int) -> np.ndarray:
    """Reorder a qubit operator whose factors are the spins in `spin_order` into chain order."""
    position = {spin: k for k, spin in enumerate(spin_order)}
    order = [position[spin] for spin in range(1, n_spins + 1)]
    return as_matrix(permute_subsystems(blocks, (2,) * n_spins, order))


def bloch_state(r_x: float, r_y: float, r_z: float = 0.0) -> DensityOperator:
    """(I + r_x X + r_y Y + r_z Z) / 2."""
    if r_x ** 2 + r_y ** 2 + r_z ** 2 > 1.0 + 1e-12:
        raise ScenarioError(
            f"Bloch vector ({r_x}, {r_y}, {r_z}) lies outside the unit ball"
        )
    m = (PAULIS["I"] + r_x * PAULIS["X"] + r_y * PAULIS["Y"] + r_z * PAULIS["Z"]) / 2
    return DensityOperator(m)


def build_undetectable_family(n_spins: int, site: int, rho_rest: Matrix,
                              r_x: float, r_y: float) -> DensityOperator:
    """
    rho_{S Etilde} (x) rho_site with rho_site = (I + r_x X + r_y Y) / 2, in chain order.

    Args:
        n_spins: chain length
        site: the spin carrying the xy-plane state (2 <= site <= n_spins)
        rho_rest: state of the other spins, in chain order with `site` removed
        r_x, r_y: Bloch components, r_x^2 + r_y^2 <= 1

    Returns:
        DensityOperator labelled with the chain S|E split (chain_space)
    """
    space = chain_space(n_spins, site)
    if r_x ** 2 + r_y ** 2 > 1.0 + 1e-12:
        raise ScenarioError(f"Bloch vector ({r_x}, {r_y}) lies outside the unit disk")
    rest = as_matrix(rho_rest)
    if rest.shape[0] != 2 ** (n_spins - 1):
        raise DimensionMismatchError(
            f"rho_rest must act on {n_spins - 1} spins, got size {rest.shape[0]}"
        )
    others = [s for s in range(1, n_spins + 1) if s != site]
    blocks = np.kron(rest, bloch_state(r_x, r_y).matrix)
    return DensityOperator(_embed(blocks, others + [site], n_spins), space.dims)


def build_control_state(n_spins: int, site: int, rho_rest: Matrix) -> DensityOperator:
    """
    Negative control: the Z populations of `site` are correlated with the
    X basis of spin site-1,

        (|+><+| (x) |0><0| + |-><-| (x) |1><1|) / 2  (x)  rho_rest,

    which ZZ dynamics turns into a nonzero R'_S(t) ~ sin(2t).
    """
    space = chain_space(n_spins, site)
    rest = as_matrix(rho_rest)
    if rest.shape[0] != 2 ** (n_spins - 2):
        raise DimensionMismatchError(
            f"rho_rest must act on {n_spins - 2} spins, got size {rest.shape[0]}"
        )
    plus = np.full((2, 2), 0.5, dtype=complex)
    minus = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)
    pair = (np.kron(plus, np.diag([1.0, 0.0])) + np.kron(minus, np.diag([0.0, 1.0]))) / 2
    others = [s for s in range(1, n_spins + 1) if s not in (site - 1, site)]
    blocks = np.kron(pair, rest)
    return DensityOperator(_embed(blocks, [site - 1, site] + others, n_spins), space.dims)


def site_pauli_components(X: Matrix, n_spins: int, site: int) -> Dict[str, np.ndarray]:
    """
    R^(nu) with X = sum_nu R^(nu) (x) sigma_nu at `site`, nu in {I, X, Y, Z}.

    Each R^(nu) acts on the remaining spins in chain order.
    """
    if not 1 <= site <= n_spins:
        raise ConfigurationError(f"site must lie in [1, {n_spins}], got {site}")
    others = [s for s in range(1, n_spins + 1) if s != site]
    order = [s - 1 for s in others] + [site - 1]
    moved = as_matrix(permute_subsystems(as_matrix(X), (2,) * n_spins, order))
    d = 2 ** (n_spins - 1)
    t = moved.reshape(d, 2, d, 2)
    return {name: np.einsum("aibj,ji->ab", t, p) / 2 for name, p in PAULIS.items()}


# ============================================================================
# UNDETECTABILITY SUITE
# ============================================================================

@dataclass(frozen=True)
class UndetectabilityReport:
    n_spins: int
    site: int
    trials: int
    control: bool
    max_witness_norm: float        # (1/2) Tr|R'_S(t)| over trials and times
    max_witness_norm_bar: float    # (1/2) Tr|R_bar'_S(t)|
    max_gain: float                # D(rho_S(t), sigma_S(t)) - D(rho_S, sigma_S)
    detected_trials: int
    schmidt_rank: int              # operator-Schmidt rank of U(0.7) across S|E
    tol_det: float

    @property
    def undetectable(self) -> bool:
        return max(self.max_witness_norm, self.max_witness_norm_bar, self.max_gain) <= self.tol_det

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["undetectable"] = self.undetectable
        return out


def _trial_trajectories(eig: Eigensystem, space: SpaceDims, rho: np.ndarray, f_S: KrausMap,
                        grid: TimeGrid) -> Tuple[float, float, float]:
    """Max over the grid of the R and R_bar witness norms and of the gain."""
    sigma = as_matrix(apply_kraus_local(f_S, rho, space))
    rho_S = as_matrix(partial_trace(rho, space.dims, [0]))
    rho_E = as_matrix(partial_trace(rho, space.dims, [1]))
    sigma_S = as_matrix(partial_trace(sigma, space.dims, [0]))
    sigma_E = as_matrix(partial_trace(sigma, space.dims, [1]))
    R = np.kron(rho_S, rho_E) - rho
    R_bar = np.kron(sigma_S, sigma_E) - sigma
    d0 = trace_distance(rho_S, sigma_S)

    worst = np.zeros(3)
    for t in grid.times:
        u = unitary_from_eig(eig, t).matrix
        ud = u.conj().T

        def reduced(x: np.ndarray) -> np.ndarray:
            return as_matrix(partial_trace(u @ x @ ud, space.dims, [0]))

        gain = trace_distance(reduced(rho), reduced(sigma)) - d0
        current = (half_trace_norm(reduced(R)), half_trace_norm(reduced(R_bar)), gain)
        worst = np.maximum(worst, current)
    return float(worst[0]), float(worst[1]), float(worst[2])


def verify_undetectable(n_spins: int, site: int, trials: int, grid: TimeGrid,
                        seed: Optional[int] = 0, control: bool = False,
                        couplings: Optional[Sequence[float]] = None,
                        workers: int = 1,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> UndetectabilityReport:
    """
    Random-trial check that the xy-plane family stays undetectable under the ZZ chain.

    Each trial draws rho_rest, a Bloch vector in the unit disk and a random
    local channel F_S, then tracks the R and R_bar witness norms and the
    trace-distance gain over the grid. With control=True the state is drawn
    from build_control_state instead, and some trial is expected to detect.
    """
    space = chain_space(n_spins, site)
    H = build_zz_chain(n_spins, couplings)
    eig = hermitian_eig(H, tol)
    rng = _rng(seed)

    states = []
    for _ in range(trials):
        if control:
            rest = random_state(2 ** (n_spins - 2), seed=rng).matrix
            rho = build_control_state(n_spins, site, rest).matrix
        else:
            rest = random_state(2 ** (n_spins - 1), seed=rng).matrix
            radius, angle = np.sqrt(rng.uniform()), rng.uniform(0.0, 2 * np.pi)
            rho = build_undetectable_family(n_spins, site, rest,
                                            radius * np.cos(angle), radius * np.sin(angle)).matrix
        states.append((rho, random_kraus(space.d_S, 2, seed=rng)))

    results = _parallel_map(lambda item: _trial_trajectories(eig, space, item[0], item[1], grid),
                            states, workers)
    worst = np.max(np.array(results), axis=0) if results else np.zeros(3)
    detected = sum(1 for r in results if r[0] > tol.det)

    rank = operator_schmidt_rank(unitary_from_eig(eig, SCHMIDT_SAMPLE_TIME).matrix, space)
    report = UndetectabilityReport(
        n_spins=n_spins,
        site=site,
        trials=trials,
        control=control,
        max_witness_norm=float(worst[0]),
        max_witness_norm_bar=float(worst[1]),
        max_gain=float(worst[2]),
        detected_trials=detected,
        schmidt_rank=rank,
        tol_det=tol.det,
    )
    _log.info("verify_undetectable(N=%d, site=%d, control=%s): max norm %.3e, %d/%d detected",
              n_spins, site, control, report.max_witness_norm, detected, trials)
    return report
