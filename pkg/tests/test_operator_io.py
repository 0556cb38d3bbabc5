#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Pytest suite for JSON operator files

Tests:
- Reading well-formed files (dims and imaginary part defaults)
- Rejection of malformed files
- Validation on load
"""
import json

import numpy as np
import pytest

from corrwitness.errors import InvalidOperatorError, OperatorFileError
from corrwitness.operator_io import (
    load_operator,
    operator_to_dict,
    parse_operator_dict,
    read_operator_file,
    write_operator_file,
)
from corrwitness.operators import DensityOperator, HermitianOperator, UnitaryOperator


def dump(tmp_path, data, name="op.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


class TestReading:

    def test_bell_file(self, tmp_path, bell_state):
        path = tmp_path / "bell.json"
        write_operator_file(path, bell_state)
        rho = load_operator(path)
        assert isinstance(rho, DensityOperator)
        assert rho.dims == (2, 2)
        assert np.array_equal(rho.matrix, bell_state.matrix)

    def test_defaults(self, tmp_path):
        path = dump(tmp_path, {"re": [[0.5, 0.0], [0.0, 0.5]]})
        matrix, dims = read_operator_file(path)
        assert dims == (2,)
        assert np.array_equal(matrix.imag, np.zeros((2, 2)))

    def test_complex_entries(self):
        matrix, _ = parse_operator_dict({"re": [[0.5, 0.0], [0.0, 0.5]],
                                         "im": [[0.0, -0.5], [0.5, 0.0]]})
        assert matrix[0, 1] == -0.5j

    def test_kinds(self, tmp_path):
        path = dump(tmp_path, {"dims": [2], "re": [[0, 1], [1, 0]]})
        assert isinstance(load_operator(path, "hermitian"), HermitianOperator)
        assert isinstance(load_operator(path, "unitary"), UnitaryOperator)

    def test_dict_layout(self, bell_state):
        out = operator_to_dict(bell_state)
        assert out["dims"] == [2, 2]
        assert out["re"][0][3] == 0.5


class TestMalformed:

    @pytest.mark.parametrize("data", [
        [[1, 0], [0, 0]],
        {"im": [[0.0]]},
        {"re": [[1.0]], "extra": 1},
        {"re": [[1.0, 0.0]]},
        {"re": [["a", 0.0], [0.0, 1.0]]},
        {"re": [[1.0, 0.0], [0.0, 0.0]], "im": [[0.0]]},
        {"re": [[1.0, 0.0], [0.0, 0.0]], "dims": [3]},
        {"re": [[1.0, 0.0], [0.0, 0.0]], "dims": [0]},
        {"re": [[1.0, 0.0], [0.0, 0.0]], "dims": [True, 2]},
        {"re": [[1.0, 0.0], [0.0, 0.0]], "dims": 2},
    ])
    def test_rejected(self, data):
        with pytest.raises(OperatorFileError):
            parse_operator_dict(data)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(OperatorFileError):
            read_operator_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OperatorFileError):
            read_operator_file(tmp_path / "absent.json")

    def test_unknown_kind(self, tmp_path):
        path = dump(tmp_path, {"re": [[1.0]]})
        with pytest.raises(ValueError):
            load_operator(path, "channel")


class TestValidationOnLoad:

    def test_trace_violation(self, tmp_path):
        path = dump(tmp_path, {"re": [[0.5, 0.0], [0.0, 0.4]]})
        with pytest.raises(InvalidOperatorError) as info:
            load_operator(path)
        assert info.value.invariant == "unit trace"
        assert "unit trace" in str(info.value)

    def test_positivity_violation(self, tmp_path):
        path = dump(tmp_path, {"re": [[1.2, 0.0], [0.0, -0.2]]})
        with pytest.raises(InvalidOperatorError) as info:
            load_operator(path)
        assert info.value.invariant == "positivity"

    def test_non_unitary(self, tmp_path):
        path = dump(tmp_path, {"re": [[1.0, 1.0], [0.0, 1.0]]})
        with pytest.raises(InvalidOperatorError):
            load_operator(path, "unitary")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
