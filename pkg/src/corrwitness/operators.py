#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
corrwitness - Finite-Dimensional Operator Algebra

States, Hermitian and unitary operators on labelled tensor-product spaces,
partial traces, trace distance, Kraus maps, Hermitian eigendecomposition and
the spectral matrix exponential.

Basis convention:
    |j_S>|l_E>  ->  row j*d_E + l      (system index major)

All operator containers are immutable after construction: the wrapped matrix
is a private read-only copy, and every operation returns a new object.
"""
import logging
from dataclasses import InitVar, dataclass
from math import prod
from typing import NamedTuple, Optional, Sequence, Tuple, Type, TypeVar, Union

import numpy as np
import scipy.linalg as la

from .errors import DimensionMismatchError, EigenDecompositionError, InvalidOperatorError
from .params import DEFAULT_TOLERANCES, Tolerances

_log = logging.getLogger(__name__)

Dims = Tuple[int, ...]
Seed = Union[int, np.random.Generator, None]

# ============================================================================
# PAULI MATRICES
# ============================================================================

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

for _p in PAULIS.values():
    _p.setflags(write=False)


# ============================================================================
# SPACES
# ============================================================================

@dataclass(frozen=True)
class SpaceDims:
    """Bipartite system-environment space H_S (x) H_E with N = d_S * d_E."""

    d_S: int
    d_E: int

    def __post_init__(self) -> None:
        if int(self.d_S) < 1 or int(self.d_E) < 1:
            raise DimensionMismatchError(
                f"Dimensions must be positive, got d_S={self.d_S}, d_E={self.d_E}"
            )
        object.__setattr__(self, "d_S", int(self.d_S))
        object.__setattr__(self, "d_E", int(self.d_E))

    @property
    def N(self) -> int:
        return self.d_S * self.d_E

    @property
    def dims(self) -> Dims:
        return (self.d_S, self.d_E)

    def require_bipartite(self) -> "SpaceDims":
        """Both factors nontrivial (d_S >= 2 and d_E >= 2)."""
        if self.d_S < 2 or self.d_E < 2:
            raise DimensionMismatchError(
                f"Bipartite scenario needs d_S >= 2 and d_E >= 2, got {self.dims}"
            )
        return self

    @classmethod
    def of(cls, dims: Union["SpaceDims", Sequence[int]]) -> "SpaceDims":
        if isinstance(dims, SpaceDims):
            return dims
        dims = tuple(dims)
        if len(dims) != 2:
            raise DimensionMismatchError(f"Expected (d_S, d_E), got {dims}")
        return cls(dims[0], dims[1])


# ============================================================================
# OPERATOR CONTAINERS
# ============================================================================

OpT = TypeVar("OpT", bound="Operator")


@dataclass(frozen=True, eq=False)
class Operator:
    """
    Dense square complex matrix on a labelled space.

    Args:
        matrix: square array (copied, stored read-only)
        dims: factor dimensions whose product is the row count; () means flat
        validate: run the subclass invariant checks (False = unchecked escape hatch)
        tol: tolerances used by the checks
    """

    matrix: np.ndarray
    dims: Dims = ()
    validate: InitVar[bool] = True
    tol: InitVar[Tolerances] = DEFAULT_TOLERANCES

    def __post_init__(self, validate: bool, tol: Tolerances) -> None:
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"Operator must be square, got shape {m.shape}")
        dims = tuple(int(d) for d in self.dims) or (m.shape[0],)
        if prod(dims) != m.shape[0]:
            raise DimensionMismatchError(
                f"dims {dims} (product {prod(dims)}) do not match matrix size {m.shape[0]}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)
        if validate:
            self._check(tol)

    def _check(self, tol: Tolerances) -> None:
        pass

    @classmethod
    def unchecked(cls: Type[OpT], matrix: np.ndarray, dims: Sequence[int] = ()) -> OpT:
        """Wrap without invariant checks (intermediate arithmetic)."""
        return cls(matrix, tuple(dims), validate=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def space(self) -> SpaceDims:
        return SpaceDims.of(self.dims)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dims={self.dims})"


@dataclass(frozen=True, eq=False)
class HermitianOperator(Operator):
    """Self-adjoint operator: ||M - M^dagger||_max <= tol.herm."""

    def _check(self, tol: Tolerances) -> None:
        defect = hermiticity_defect(self.matrix)
        if defect > tol.herm:
            raise InvalidOperatorError("hermiticity", defect, tol.herm)


@dataclass(frozen=True, eq=False)
class DensityOperator(HermitianOperator):
    """
    Quantum state: Hermitian, unit trace, positive semidefinite.

    Usage:
        >>> rho = DensityOperator(np.diag([0.5, 0.5]))
        >>> rho.purity()
        0.5
    """

    def _check(self, tol: Tolerances) -> None:
        super()._check(tol)
        tr = float(np.real(np.trace(self.matrix)))
        if abs(tr - 1.0) > tol.trace:
            raise InvalidOperatorError("unit trace", abs(tr - 1.0), tol.trace,
                                       f"unit trace violated: Tr(rho) = {tr:.12g}")
        lam_min = float(la.eigvalsh(self.matrix)[0])
        if lam_min < -tol.psd:
            raise InvalidOperatorError("positivity", -lam_min, tol.psd,
                                       f"positivity violated: min eigenvalue {lam_min:.3e}")

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True, eq=False)
class UnitaryOperator(Operator):
    """U^dagger U = I within tol.unit."""

    def _check(self, tol: Tolerances) -> None:
        defect = unitarity_defect(self.matrix)
        if defect > tol.unit:
            raise InvalidOperatorError("unitarity", defect, tol.unit)

    @property
    def dagger(self) -> "UnitaryOperator":
        return UnitaryOperator.unchecked(self.matrix.conj().T, self.dims)


@dataclass(frozen=True, eq=False)
class KrausMap:
    """
    Completely positive trace-preserving map rho -> sum_i E_i rho E_i^dagger.

    All E_i share one d_out x d_in shape; sum_i E_i^dagger E_i = I within tol.unit.
    """

    operators: Tuple[np.ndarray, ...]
    validate: InitVar[bool] = True
    tol: InitVar[Tolerances] = DEFAULT_TOLERANCES

    def __post_init__(self, validate: bool, tol: Tolerances) -> None:
        ops = tuple(np.array(E, dtype=complex) for E in self.operators)
        if not ops:
            raise InvalidOperatorError("nonempty Kraus set", 0.0, 1.0,
                                       "Kraus map needs at least one operator")
        shape = ops[0].shape
        if any(E.ndim != 2 or E.shape != shape for E in ops):
            raise DimensionMismatchError(
                f"Kraus operators must share one 2-D shape, got {[E.shape for E in ops]}"
            )
        for E in ops:
            E.setflags(write=False)
        object.__setattr__(self, "operators", ops)
        if validate:
            completeness = sum(E.conj().T @ E for E in ops)
            defect = float(np.max(np.abs(completeness - np.eye(shape[1]))))
            if defect > tol.unit:
                raise InvalidOperatorError("trace preservation", defect, tol.unit)

    @property
    def d_in(self) -> int:
        return self.operators[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)


class Eigensystem(NamedTuple):
    values: np.ndarray    # real, descending
    vectors: np.ndarray   # orthonormal columns, vectors[:, k] <-> values[k]


# ============================================================================
# HELPERS
# ============================================================================

def as_matrix(x: Union[Operator, np.ndarray]) -> np.ndarray:
    """Underlying complex matrix of an operator or array."""
    if isinstance(x, Operator):
        return x.matrix
    return np.asarray(x, dtype=complex)


def dims_of(x: Union[Operator, np.ndarray]) -> Dims:
    if isinstance(x, Operator):
        return x.dims
    return (np.asarray(x).shape[0],)


def hermiticity_defect(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def unitarity_defect(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[1])))) if m.size else 0.0


def _same_kind(template: Union[Operator, np.ndarray], matrix: np.ndarray, dims: Sequence[int]):
    """Rewrap `matrix` in the container class of `template` (unchecked)."""
    if isinstance(template, Operator):
        return type(template).unchecked(matrix, dims)
    return matrix


def _rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _resolve_space(m: Union[Operator, np.ndarray],
                   dims: Optional[Union[SpaceDims, Sequence[int]]]) -> SpaceDims:
    own = dims_of(m)
    if dims is None:
        if len(own) != 2:
            raise DimensionMismatchError(
                f"Operator with dims {own} is not bipartite; pass dims=(d_S, d_E)"
            )
        return SpaceDims.of(own)
    space = SpaceDims.of(dims)
    if len(own) == 2 and own != space.dims:
        raise DimensionMismatchError(f"Declared dims {space.dims} disagree with operator dims {own}")
    if as_matrix(m).shape[0] != space.N:
        raise DimensionMismatchError(
            f"Operator size {as_matrix(m).shape[0]} does not match d_S*d_E = {space.N}"
        )
    return space


def _check_same_shape(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"{what}: shapes {a.shape} and {b.shape} differ")


# ============================================================================
# TENSOR STRUCTURE
# ============================================================================

def tensor(a: Union[Operator, np.ndarray], b: Union[Operator, np.ndarray]):
    """
    Kronecker product a (x) b, system factor leftmost.

    The result keeps the most specific container class shared by both operands
    (product of states is a state, of unitaries a unitary).
    """
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.ndim != 2 or ma.shape[0] != ma.shape[1] or mb.ndim != 2 or mb.shape[0] != mb.shape[1]:
        raise DimensionMismatchError(f"tensor needs square operands, got {ma.shape}, {mb.shape}")
    out = np.kron(ma, mb)
    if not (isinstance(a, Operator) and isinstance(b, Operator)):
        return out
    dims = a.dims + b.dims
    for cls in (DensityOperator, UnitaryOperator, HermitianOperator):
        if isinstance(a, cls) and isinstance(b, cls):
            return cls.unchecked(out, dims)
    return Operator.unchecked(out, dims)


def partial_trace(m: Union[Operator, np.ndarray], dims: Sequence[int], keep: Sequence[int]):
    """
    Trace out every factor not listed in `keep`.

    Args:
        m: operator on prod(dims)
        dims: factor dimensions, most significant first
        keep: indices of the factors to keep (returned in ascending order)
    """
    a = as_matrix(m)
    dims = tuple(int(d) for d in dims)
    if prod(dims) != a.shape[0]:
        raise DimensionMismatchError(f"dims {dims} do not match operator size {a.shape[0]}")
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionMismatchError(f"keep indices {keep} out of range for {n} factors")

    t = a.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    for count, axis in enumerate(sorted(traced, reverse=True)):
        t = np.trace(t, axis1=axis, axis2=axis + n - count)
    kept_dims = tuple(dims[k] for k in keep)
    d_keep = prod(kept_dims)
    return _same_kind(m, t.reshape(d_keep, d_keep), kept_dims)


def partial_trace_E(m: Union[Operator, np.ndarray],
                    dims: Optional[Union[SpaceDims, Sequence[int]]] = None):
    """Tr_E over the environment factor; returns a d_S x d_S operator."""
    space = _resolve_space(m, dims)
    return partial_trace(m, space.dims, keep=[0])


def partial_trace_S(m: Union[Operator, np.ndarray],
                    dims: Optional[Union[SpaceDims, Sequence[int]]] = None):
    """Tr_S over the system factor; returns a d_E x d_E operator."""
    space = _resolve_space(m, dims)
    return partial_trace(m, space.dims, keep=[1])


def permute_subsystems(m: Union[Operator, np.ndarray], dims: Sequence[int],
                       order: Sequence[int]):
    """
    Reorder tensor factors: factor order[k] of the input becomes factor k.

    Returns the permuted operator (dims reordered accordingly).
    """
    a = as_matrix(m)
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    order = tuple(int(o) for o in order)
    if sorted(order) != list(range(n)):
        raise DimensionMismatchError(f"order {order} is not a permutation of {n} factors")
    if prod(dims) != a.shape[0]:
        raise DimensionMismatchError(f"dims {dims} do not match operator size {a.shape[0]}")
    t = a.reshape(dims + dims).transpose(order + tuple(n + o for o in order))
    new_dims = tuple(dims[o] for o in order)
    return _same_kind(m, t.reshape(a.shape), new_dims)


def operator_schmidt_coefficients(u: Union[Operator, np.ndarray],
                                  dims: Optional[Union[SpaceDims, Sequence[int]]] = None
                                  ) -> np.ndarray:
    """Singular values of the S|E realignment of u (descending)."""
    space = _resolve_space(u, dims)
    a = as_matrix(u)
    realigned = (a.reshape(space.d_S, space.d_E, space.d_S, space.d_E)
                 .transpose(0, 2, 1, 3)
                 .reshape(space.d_S ** 2, space.d_E ** 2))
    return la.svd(realigned, compute_uv=False)


def operator_schmidt_rank(u: Union[Operator, np.ndarray],
                          dims: Optional[Union[SpaceDims, Sequence[int]]] = None,
                          rel_tol: float = 1e-10) -> int:
    """
    Number of nonzero operator-Schmidt coefficients.

    Rank 1 iff u = u_S (x) u_E.
    """
    s = operator_schmidt_coefficients(u, dims)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def local_unitary(u_S: Union[UnitaryOperator, np.ndarray],
                  u_E: Union[UnitaryOperator, np.ndarray]) -> UnitaryOperator:
    """Factorized evolution U = U_S (x) U_E."""
    mS, mE = as_matrix(u_S), as_matrix(u_E)
    return UnitaryOperator(np.kron(mS, mE), (mS.shape[0], mE.shape[0]))


# ============================================================================
# SPECTRAL TOOLS
# ============================================================================

def hermitian_eig(m: Union[Operator, np.ndarray],
                  tol: Tolerances = DEFAULT_TOLERANCES) -> Eigensystem:
    """
    Eigendecomposition m = V diag(lambda) V^dagger of a Hermitian operator.

    Eigenvalues are returned in descending order. Inside a degenerate
    eigenspace any orthonormal basis may come back.

    Raises:
        InvalidOperatorError: m not Hermitian within tol.herm
        EigenDecompositionError: LAPACK did not converge
    """
    a = as_matrix(m)
    defect = hermiticity_defect(a)
    if defect > tol.herm:
        raise InvalidOperatorError("hermiticity", defect, tol.herm)
    try:
        values, vectors = la.eigh(a)
    except la.LinAlgError as exc:
        raise EigenDecompositionError(f"eigh failed on {a.shape[0]}x{a.shape[0]} input: {exc}") from exc
    return Eigensystem(values[::-1].copy(), vectors[:, ::-1].copy())


def half_trace_norm(m: Union[Operator, np.ndarray]) -> float:
    """(1/2) Tr|M| for Hermitian M, from its spectrum."""
    a = as_matrix(m)
    if a.size == 0:
        return 0.0
    return 0.5 * float(np.sum(np.abs(la.eigvalsh(a))))


def trace_distance(rho: Union[Operator, np.ndarray], sigma: Union[Operator, np.ndarray]) -> float:
    """
    D(rho, sigma) = (1/2) sum_k |lambda_k(rho - sigma)|.

    Computed from the spectrum of the difference; symmetric in its arguments.
    """
    a, b = as_matrix(rho), as_matrix(sigma)
    _check_same_shape(a, b, "trace_distance")
    return half_trace_norm(a - b)


def unitary_from_eig(eig: Eigensystem, t: float, dims: Sequence[int] = ()) -> UnitaryOperator:
    """V exp(-i Lambda t) V^dagger from a precomputed eigensystem."""
    v = eig.vectors
    phases = np.exp(-1j * eig.values * t)
    return UnitaryOperator.unchecked((v * phases) @ v.conj().T, dims)


def expm_hermitian(h: Union[Operator, np.ndarray], t: float,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> UnitaryOperator:
    """
    Spectral matrix exponential exp(-i h t).

    Args:
        h: Hermitian generator
        t: time

    Returns:
        UnitaryOperator on the dims of h
    """
    return unitary_from_eig(hermitian_eig(h, tol), t, dims_of(h))


# ============================================================================
# MAPS
# ============================================================================

def apply_unitary(u: Union[Operator, np.ndarray], m: Union[Operator, np.ndarray]):
    """Ad_U(m) = U m U^dagger, same container kind as m."""
    mu, mm = as_matrix(u), as_matrix(m)
    _check_same_shape(mu, mm, "apply_unitary")
    return _same_kind(m, mu @ mm @ mu.conj().T, dims_of(m))


def apply_kraus(k: KrausMap, rho: Union[Operator, np.ndarray],
                tol: Tolerances = DEFAULT_TOLERANCES) -> DensityOperator:
    """rho -> sum_i E_i rho E_i^dagger; the output is validated as a state."""
    a = as_matrix(rho)
    if a.shape != (k.d_in, k.d_in):
        raise DimensionMismatchError(f"Kraus map expects {k.d_in}x{k.d_in} input, got {a.shape}")
    out = sum(E @ a @ E.conj().T for E in k.operators)
    return DensityOperator(out, (k.d_out,), tol=tol)


def apply_kraus_local(k: KrausMap, rho_SE: Union[Operator, np.ndarray],
                      dims: Optional[Union[SpaceDims, Sequence[int]]] = None):
    """
    F_S (x) id_E applied to a bipartite operator.

    Output dims are (k.d_out, d_E); Tr_S of the output equals Tr_S of the input.
    """
    space = _resolve_space(rho_SE, dims)
    if k.d_in != space.d_S:
        raise DimensionMismatchError(f"Kraus map acts on d={k.d_in}, system has d_S={space.d_S}")
    a = as_matrix(rho_SE)
    t = a.reshape(space.d_S, space.d_E, space.d_S, space.d_E)
    out = sum(np.einsum("ab,bkcl,dc->akdl", E, t, E.conj()) for E in k.operators)
    d_out = k.d_out
    out = out.reshape(d_out * space.d_E, d_out * space.d_E)
    dims_out = (d_out, space.d_E)
    if isinstance(rho_SE, DensityOperator):
        return DensityOperator.unchecked(out, dims_out)
    if isinstance(rho_SE, Operator):
        return HermitianOperator.unchecked(out, dims_out)
    return out


def compose(second: KrausMap, first: KrausMap) -> KrausMap:
    """Kraus representation of second o first."""
    if second.d_in != first.d_out:
        raise DimensionMismatchError(
            f"Cannot compose: first outputs d={first.d_out}, second takes d={second.d_in}"
        )
    return KrausMap(tuple(B @ A for B in second.operators for A in first.operators))


def identity_channel(d: int) -> KrausMap:
    return KrausMap((np.eye(d, dtype=complex),))


def reset_channel(d: int, index: int = 0) -> KrausMap:
    """Constant channel onto |index><index|: Kraus {|index><a|}."""
    ops = []
    for a in range(d):
        E = np.zeros((d, d), dtype=complex)
        E[index, a] = 1.0
        ops.append(E)
    return KrausMap(tuple(ops))


def replacement_channel(target: Union[DensityOperator, np.ndarray], d_in: Optional[int] = None,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> KrausMap:
    """
    Constant channel rho -> Tr(rho) * target.

    Kraus operators sqrt(lambda_k) |v_k><a| over the eigenpairs of the target and
    an input basis |a>; eigenvalues at or below zero are dropped.
    """
    t = as_matrix(target)
    d_out = t.shape[0]
    d_in = d_out if d_in is None else int(d_in)
    values, vectors = hermitian_eig(t, tol)
    ops = []
    for lam, v in zip(values, vectors.T):
        if lam <= 0:
            continue
        amp = np.sqrt(lam) * v
        for a in range(d_in):
            E = np.zeros((d_out, d_in), dtype=complex)
            E[:, a] = amp
            ops.append(E)
    # renormalise against accumulated rounding in sum(lambda_k)
    weight = float(np.sum(values[values > 0]))
    return KrausMap(tuple(E / np.sqrt(weight) for E in ops), tol=tol)


# ============================================================================
# RANDOM INSTANCES
# ============================================================================

def ginibre(rows: int, cols: int, seed: Seed = None) -> np.ndarray:
    """rows x cols matrix of i.i.d. standard complex Gaussians."""
    rng = _rng(seed)
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_state(dim: int, rank: Optional[int] = None, seed: Seed = None,
                 dims: Sequence[int] = ()) -> DensityOperator:
    """
    Random density operator GG^dagger / Tr(GG^dagger), G a dim x rank Ginibre matrix.

    Args:
        dim: Hilbert-space dimension
        rank: rank of the state (default: full rank)
        seed: int seed or Generator; a fixed int seed reproduces the output bitwise
        dims: optional factor labels
    """
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must satisfy 1 <= rank <= {dim}, got {rank}")
    g = ginibre(dim, rank, seed)
    rho = g @ g.conj().T
    rho = rho / np.real(np.trace(rho))
    return DensityOperator(rho, tuple(dims))


def random_unitary(dim: int, seed: Seed = None, dims: Sequence[int] = ()) -> UnitaryOperator:
    """Haar-random unitary: QR of a Ginibre matrix with the R diagonal phases fixed."""
    q, r = la.qr(ginibre(dim, dim, seed))
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return UnitaryOperator(q, tuple(dims))


def random_hermitian(dim: int, seed: Seed = None, scale: float = 1.0,
                     dims: Sequence[int] = ()) -> HermitianOperator:
    """GUE-like Hermitian matrix with ||H||_max <= scale."""
    g = ginibre(dim, dim, seed)
    h = (g + g.conj().T) / 2
    h = h * (scale / max(float(np.max(np.abs(h))), 1e-300))
    return HermitianOperator(h, tuple(dims))


def random_kraus(d: int, n_ops: int = 2, seed: Seed = None,
                 d_out: Optional[int] = None) -> KrausMap:
    """
    Random CPTP map from the blocks of a Haar isometry (Stinespring construction).
    """
    d_out = d if d_out is None else int(d_out)
    if n_ops < 1 or n_ops * d_out < d:
        raise ValueError(f"n_ops * d_out = {n_ops * d_out} must be at least d_in = {d}")
    v = random_unitary(n_ops * d_out, seed).matrix[:, :d]
    return KrausMap(tuple(v[i * d_out:(i + 1) * d_out, :] for i in range(n_ops)))


# ============================================================================
# SIMPLE STATES
# ============================================================================

def basis_ket(d: int, index: int) -> np.ndarray:
    ket = np.zeros(d, dtype=complex)
    ket[index] = 1.0
    return ket


def pure_state(ket: Sequence[complex], dims: Sequence[int] = ()) -> DensityOperator:
    """|psi><psi| for a (not necessarily normalised) ket."""
    psi = np.asarray(ket, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return DensityOperator(np.outer(psi, psi.conj()), tuple(dims))


def maximally_mixed(d: int, dims: Sequence[int] = ()) -> DensityOperator:
    return DensityOperator(np.eye(d, dtype=complex) / d, tuple(dims))


def marginals(rho_SE: Union[Operator, np.ndarray],
              dims: Optional[Union[SpaceDims, Sequence[int]]] = None
              ) -> Tuple[np.ndarray, np.ndarray]:
    """(rho_S, rho_E) as arrays."""
    space = _resolve_space(rho_SE, dims)
    return (as_matrix(partial_trace(as_matrix(rho_SE), space.dims, [0])),
            as_matrix(partial_trace(as_matrix(rho_SE), space.dims, [1])))


def product_of_marginals(rho_SE: Union[Operator, np.ndarray],
                         dims: Optional[Union[SpaceDims, Sequence[int]]] = None
                         ) -> DensityOperator:
    """rho_S (x) rho_E."""
    space = _resolve_space(rho_SE, dims)
    rho_S, rho_E = marginals(rho_SE, space)
    return DensityOperator.unchecked(np.kron(rho_S, rho_E), space.dims)


def as_state(x: Union[Operator, np.ndarray], space: SpaceDims,
             tol: Tolerances = DEFAULT_TOLERANCES) -> DensityOperator:
    """DensityOperator labelled with `space`; raw arrays are validated."""
    if isinstance(x, DensityOperator):
        return x if x.dims == space.dims else DensityOperator.unchecked(x.matrix, space.dims)
    return DensityOperator(as_matrix(x), space.dims, tol=tol)
