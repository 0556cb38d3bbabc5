#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Pytest suite for the operator validator

Tests:
- Valid density, Hermitian and unitary operators pass
- Every violated invariant is reported with value and threshold
- Shape problems stop the remaining checks
"""
import numpy as np
import pytest

from corrwitness.params import Tolerances
from corrwitness.validator import FAIL, PASS, OperatorValidator, check_operator


class TestValidOperators:

    def test_density(self, bell_state):
        assert check_operator(bell_state.matrix, "density", (2, 2)) == []

    def test_hermitian_ignores_trace(self):
        assert check_operator(np.diag([2.0, 3.0]), "hermitian") == []

    def test_unitary(self):
        assert check_operator(np.array([[0, 1], [1, 0]]), "unitary") == []

    def test_all_checks_reported(self):
        results = OperatorValidator(np.eye(2) / 2).run("density")
        names = [r["invariant"] for r in results]
        print(f"\n  checks: {names}")
        assert names == ["shape", "hermiticity", "unit trace", "positivity"]
        assert all(r["status"] == PASS for r in results)


class TestViolations:

    def test_trace(self):
        violations = check_operator(np.diag([0.5, 0.4]), "density")
        assert [v["invariant"] for v in violations] == ["unit trace"]
        assert abs(violations[0]["value"] - 0.1) < 1e-12
        assert violations[0]["threshold"] == 1e-9

    def test_hermiticity_only(self):
        violations = check_operator(np.array([[0.5, 0.1], [0.0, 0.5]]), "density")
        assert [v["invariant"] for v in violations] == ["hermiticity"]
        assert violations[0]["status"] == FAIL

    def test_positivity(self):
        violations = check_operator(np.diag([1.2, -0.2]), "density")
        assert [v["invariant"] for v in violations] == ["positivity"]
        assert abs(violations[0]["value"] - 0.2) < 1e-12

    def test_several_at_once(self):
        violations = check_operator(np.array([[2.0, 1.0], [0.0, -1.5]]), "density")
        names = {v["invariant"] for v in violations}
        assert names == {"hermiticity", "unit trace", "positivity"}

    def test_unitarity(self):
        violations = check_operator(np.array([[1.0, 1.0], [0.0, 1.0]]), "unitary")
        assert [v["invariant"] for v in violations] == ["unitarity"]

    def test_custom_tolerance(self):
        tol = Tolerances(trace=0.2)
        assert check_operator(np.diag([0.5, 0.4]), "density", tol=tol) == []


class TestShape:

    def test_non_square(self):
        violations = check_operator(np.ones((2, 3)) / 6, "density")
        assert [v["invariant"] for v in violations] == ["shape"]

    def test_dims_mismatch(self):
        violations = check_operator(np.eye(4) / 4, "density", dims=(2, 3))
        assert [v["invariant"] for v in violations] == ["shape"]

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            check_operator(np.eye(2), "channel")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
