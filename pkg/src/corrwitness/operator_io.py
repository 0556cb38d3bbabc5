"""
corrwitness - JSON Operator Files

File format (all keys lower case, no others allowed):

    {"dims": [2, 2], "re": [[...], ...], "im": [[...], ...]}

"re" is required; "im" defaults to zeros and "dims" to the flat dimension.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np

from .errors import OperatorFileError
from .operators import (
    DensityOperator,
    HermitianOperator,
    Operator,
    UnitaryOperator,
    as_matrix,
    dims_of,
)
from .params import DEFAULT_TOLERANCES, Tolerances

_log = logging.getLogger(__name__)

ALLOWED_KEYS = frozenset({"dims", "re", "im"})

OPERATOR_KINDS = {
    "density": DensityOperator,
    "hermitian": HermitianOperator,
    "unitary": UnitaryOperator,
    "any": Operator,
}

PathLike = Union[str, Path]


def _square_array(rows: Any, name: str) -> np.ndarray:
    try:
        a = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise OperatorFileError(f"'{name}' must be a rectangular array of numbers: {exc}") from exc
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise OperatorFileError(f"'{name}' must be a square matrix, got shape {a.shape}")
    return a


def parse_operator_dict(data: Any) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """Matrix and dims from a decoded operator object."""
    if not isinstance(data, dict):
        raise OperatorFileError(f"operator file must hold a JSON object, got {type(data).__name__}")
    unknown = sorted(set(data) - ALLOWED_KEYS)
    if unknown:
        raise OperatorFileError(f"unknown keys in operator file: {unknown}")
    if "re" not in data:
        raise OperatorFileError("operator file is missing the 're' key")

    re = _square_array(data["re"], "re")
    im = _square_array(data["im"], "im") if "im" in data else np.zeros_like(re)
    if im.shape != re.shape:
        raise OperatorFileError(f"'re' {re.shape} and 'im' {im.shape} shapes differ")

    dims_raw = data.get("dims", [re.shape[0]])
    if (not isinstance(dims_raw, list) or not dims_raw
            or not all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in dims_raw)):
        raise OperatorFileError(f"'dims' must be a list of positive integers, got {dims_raw!r}")
    dims = tuple(dims_raw)
    if int(np.prod(dims)) != re.shape[0]:
        raise OperatorFileError(f"dims {list(dims)} do not match matrix size {re.shape[0]}")
    return re + 1j * im, dims


def read_operator_file(path: PathLike) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """Unvalidated matrix and dims from a JSON operator file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OperatorFileError(f"cannot read operator file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OperatorFileError(f"{path} is not valid JSON: {exc}") from exc
    matrix, dims = parse_operator_dict(data)
    _log.debug("read %s: dims=%s", path, dims)
    return matrix, dims


def load_operator(path: PathLike, kind: str = "density",
                  tol: Tolerances = DEFAULT_TOLERANCES) -> Operator:
    """
    Load and validate an operator.

    Args:
        path: JSON operator file
        kind: 'density', 'hermitian', 'unitary' or 'any'

    Raises:
        OperatorFileError: malformed file
        InvalidOperatorError: matrix violates the invariants of `kind`
    """
    if kind not in OPERATOR_KINDS:
        raise ValueError(f"kind must be one of {sorted(OPERATOR_KINDS)}, got {kind!r}")
    matrix, dims = read_operator_file(path)
    return OPERATOR_KINDS[kind](matrix, dims, tol=tol)


def operator_to_dict(op: Union[Operator, np.ndarray],
                     dims: Sequence[int] = ()) -> Dict[str, Any]:
    """Inverse of parse_operator_dict."""
    m = as_matrix(op)
    dims = tuple(dims) or dims_of(op)
    return {
        "dims": [int(d) for d in dims],
        "re": np.real(m).tolist(),
        "im": np.imag(m).tolist(),
    }


def write_operator_file(path: PathLike, op: Union[Operator, np.ndarray],
                        dims: Sequence[int] = ()) -> None:
    Path(path).write_text(json.dumps(operator_to_dict(op, dims)) + "\n", encoding="utf-8")
