"""Matrix and config files.

A matrix file is a JSON object ``{"n": n, "re": [[...]], "im": [[...]]}``
with row-major ``n x n`` arrays. Config files use the same JSON notation.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import NonSquare, SchemaError


def fmt(x: float) -> str:
    """Full double precision, 17 significant digits."""
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def _rows(name: str, value, n: int) -> np.ndarray:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise SchemaError(f"field {name!r}: expected a list of rows")
    if len(value) != n:
        raise SchemaError(f"field {name!r}: expected {n} rows, found {len(value)}")
    for i, row in enumerate(value):
        if len(row) != n:
            if all(len(r) == len(value[0]) for r in value):
                raise NonSquare(f"field {name!r}: rows have length {len(row)} but n = {n}")
            raise SchemaError(f"field {name!r}, row {i}: expected {n} entries, found {len(row)}")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise SchemaError(f"field {name!r}, entry [{i}][{j}]: not a number ({v!r})")
    return np.array(value, dtype=float)


def matrix_from_obj(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise SchemaError("matrix file must hold a JSON object")
    for key in ("n", "re", "im"):
        if key not in obj:
            raise SchemaError(f"missing field {key!r}")
    n = obj["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SchemaError(f"field 'n': expected a positive integer, found {n!r}")
    re = _rows("re", obj["re"], n)
    im = _rows("im", obj["im"], n)
    if re.shape != im.shape:
        raise SchemaError(f"'re' has shape {re.shape} but 'im' has shape {im.shape}")
    A = re + 1j * im
    if not np.all(np.isfinite(A)):
        raise SchemaError("matrix has non-finite entries")
    return A


def parse_matrix_file(path) -> np.ndarray:
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return matrix_from_obj(obj)
    except SchemaError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def matrix_to_text(A) -> str:
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]

    def grid(M):
        return "[" + ", ".join("[" + ", ".join(fmt(v) for v in row) + "]" for row in M) + "]"

    return '{"n": %d, "re": %s, "im": %s}\n' % (n, grid(A.real), grid(A.imag))


def write_matrix_file(path, A) -> None:
    Path(path).write_text(matrix_to_text(A))


def load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
