#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
corrwitness - Operator Validator

Checks a raw matrix against the invariants of a density, Hermitian or
unitary operator and reports every violation with its measured value and
threshold, instead of stopping at the first one.

Usage:
    >>> violations = check_operator(matrix, kind="density")
    >>> [v["invariant"] for v in violations]
    ['unit trace']
"""
from typing import Any, Dict, List, Sequence

import numpy as np
import scipy.linalg as la

from .operators import hermiticity_defect, unitarity_defect
from .params import DEFAULT_TOLERANCES, Tolerances

PASS = "PASS"
FAIL = "FAIL"

CHECKS_BY_KIND = {
    "density": ("hermiticity", "unit trace", "positivity"),
    "hermitian": ("hermiticity",),
    "unitary": ("unitarity",),
}


class OperatorValidator:
    """
    Invariant checks for one matrix.

    Each check returns a dict with 'invariant', 'value', 'threshold', 'status'.
    """

    def __init__(self, matrix: Any, dims: Sequence[int] = (),
                 tol: Tolerances = DEFAULT_TOLERANCES):
        self.matrix = np.asarray(matrix, dtype=complex)
        self.dims = tuple(dims)
        self.tol = tol

    @staticmethod
    def _result(invariant: str, value: float, threshold: float, ok: bool) -> Dict[str, Any]:
        return {
            "invariant": invariant,
            "value": float(value),
            "threshold": float(threshold),
            "status": PASS if ok else FAIL,
        }

    # ========================================================================
    # STRUCTURE
    # ========================================================================

    def check_shape(self) -> Dict[str, Any]:
        m = self.matrix
        square = m.ndim == 2 and m.shape[0] == m.shape[1] and m.size > 0
        dims_ok = not self.dims or (square and int(np.prod(self.dims)) == m.shape[0])
        rows = float(m.shape[0]) if m.ndim >= 1 else 0.0
        return self._result("shape", rows, float(np.prod(self.dims)) if self.dims else rows,
                            square and dims_ok)

    # ========================================================================
    # ALGEBRAIC INVARIANTS
    # ========================================================================

    def check_hermiticity(self) -> Dict[str, Any]:
        defect = hermiticity_defect(self.matrix)
        return self._result("hermiticity", defect, self.tol.herm, defect <= self.tol.herm)

    def check_trace(self) -> Dict[str, Any]:
        trace = np.trace(self.matrix)
        defect = abs(complex(trace) - 1.0)
        return self._result("unit trace", defect, self.tol.trace, defect <= self.tol.trace)

    def check_positivity(self) -> Dict[str, Any]:
        """Smallest eigenvalue of the Hermitian part."""
        herm = (self.matrix + self.matrix.conj().T) / 2
        lam_min = float(la.eigvalsh(herm)[0])
        return self._result("positivity", max(0.0, -lam_min), self.tol.psd,
                            lam_min >= -self.tol.psd)

    def check_unitarity(self) -> Dict[str, Any]:
        defect = unitarity_defect(self.matrix)
        return self._result("unitarity", defect, self.tol.unit, defect <= self.tol.unit)

    def run(self, kind: str = "density") -> List[Dict[str, Any]]:
        """All checks for `kind`; later checks are skipped when the shape is wrong."""
        if kind not in CHECKS_BY_KIND:
            raise ValueError(f"kind must be one of {sorted(CHECKS_BY_KIND)}, got {kind!r}")
        shape = self.check_shape()
        if shape["status"] == FAIL:
            return [shape]
        dispatch = {
            "hermiticity": self.check_hermiticity,
            "unit trace": self.check_trace,
            "positivity": self.check_positivity,
            "unitarity": self.check_unitarity,
        }
        return [shape] + [dispatch[name]() for name in CHECKS_BY_KIND[kind]]


def check_operator(matrix: Any, kind: str = "density", dims: Sequence[int] = (),
                   tol: Tolerances = DEFAULT_TOLERANCES) -> List[Dict[str, Any]]:
    """Violated invariants of `matrix` as `kind` (empty list = valid)."""
    return [r for r in OperatorValidator(matrix, dims, tol).run(kind) if r["status"] == FAIL]
