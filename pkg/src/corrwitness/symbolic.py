#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
corrwitness - Exact Rational Oracles (SymPy)

Closed-form values for the small analytic instances used to check the
floating-point code: correlation operators, their spectra, trace distances,
the reduced witness of the computational-basis block unitary and the ZZ
chain diagonal.
"""
from typing import Dict, List, Optional, Sequence

import numpy as np
import sympy as sp

# -----------------------------
# States
# -----------------------------

def ket(d: int, index: int) -> sp.Matrix:
    v = sp.zeros(d, 1)
    v[index] = 1
    return v


def bell_state() -> sp.Matrix:
    """|Phi+><Phi+|, Phi+ = (|00> + |11>)/sqrt 2."""
    psi = (ket(4, 0) + ket(4, 3)) / sp.sqrt(2)
    return sp.simplify(psi * psi.H)


def classical_state() -> sp.Matrix:
    """(|00><00| + |11><11|)/2."""
    return sp.diag(sp.Rational(1, 2), 0, 0, sp.Rational(1, 2))


def product_basis_state(j: int, l: int, d_S: int = 2, d_E: int = 2) -> sp.Matrix:
    """|j_S l_E><j_S l_E|."""
    v = ket(d_S * d_E, j * d_E + l)
    return v * v.T


# -----------------------------
# Partial traces (row = j*d_E + l)
# -----------------------------

def partial_trace_E(m: sp.Matrix, d_S: int, d_E: int) -> sp.Matrix:
    out = sp.zeros(d_S, d_S)
    for i in range(d_S):
        for j in range(d_S):
            out[i, j] = sum(m[i * d_E + k, j * d_E + k] for k in range(d_E))
    return out


def partial_trace_S(m: sp.Matrix, d_S: int, d_E: int) -> sp.Matrix:
    out = sp.zeros(d_E, d_E)
    for k in range(d_E):
        for l in range(d_E):
            out[k, l] = sum(m[i * d_E + k, i * d_E + l] for i in range(d_S))
    return out


def correlation_operator(rho: sp.Matrix, d_S: int = 2, d_E: int = 2) -> sp.Matrix:
    """R = rho_S (x) rho_E - rho_SE."""
    rho_S = partial_trace_E(rho, d_S, d_E)
    rho_E = partial_trace_S(rho, d_S, d_E)
    return sp.kronecker_product(rho_S, rho_E) - rho


# -----------------------------
# Spectra & distances
# -----------------------------

def exact_spectrum(m: sp.Matrix) -> List[sp.Expr]:
    """Eigenvalues with multiplicity, descending."""
    values: List[sp.Expr] = []
    for value, mult in m.eigenvals().items():
        values.extend([sp.nsimplify(value)] * mult)
    return sorted(values, key=lambda v: float(v), reverse=True)


def exact_trace_distance(a: sp.Matrix, b: sp.Matrix) -> sp.Expr:
    """(1/2) sum |lambda(a - b)|."""
    return sp.Rational(1, 2) * sum(abs(v) for v in exact_spectrum(a - b))


def block_witness(values: Sequence[sp.Expr], d_E: int) -> sp.Matrix:
    """
    Diagonal R'_S when eigenvalue k is mapped onto product state k:
    row j collects values[j*d_E .. (j+1)*d_E - 1].
    """
    d_S = len(values) // d_E
    return sp.diag(*[sum(values[j * d_E:(j + 1) * d_E]) for j in range(d_S)])


def half_trace_norm(m: sp.Matrix) -> sp.Expr:
    return sp.Rational(1, 2) * sum(abs(v) for v in exact_spectrum(m))


# -----------------------------
# ZZ chain
# -----------------------------

def zz_chain_diagonal(n_spins: int, couplings: Optional[Sequence[int]] = None) -> List[sp.Expr]:
    """sum_j J_j z_j z_{j+1} for every basis index, spin 1 most significant."""
    J = [sp.Integer(1)] * (n_spins - 1) if couplings is None else [sp.nsimplify(c) for c in couplings]
    diagonal = []
    for b in range(2 ** n_spins):
        z = [1 - 2 * ((b >> (n_spins - 1 - j)) & 1) for j in range(n_spins)]
        diagonal.append(sum(J[j] * z[j] * z[j + 1] for j in range(n_spins - 1)))
    return diagonal


def to_numpy(m: sp.Matrix) -> np.ndarray:
    return np.array(m.evalf(), dtype=complex)


def analytic_instances() -> Dict[str, Dict[str, sp.Expr]]:
    """Reference values of the two-qubit examples."""
    bell_R = correlation_operator(bell_state())
    classical_R = correlation_operator(classical_state())
    bell_values = exact_spectrum(bell_R)
    classical_values = exact_spectrum(classical_R)
    return {
        "bell": {
            "bound": half_trace_norm(bell_R),
            "positive_mass": sum(v for v in bell_values if v > 0),
            # two of the three positive eigenvalues fill system row 0
            "witness_norm": half_trace_norm(block_witness(bell_values, 2)),
        },
        "classical": {
            "bound": half_trace_norm(classical_R),
            "witness_norm": half_trace_norm(block_witness(classical_values, 2)),
        },
    }
