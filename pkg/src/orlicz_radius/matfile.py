"""Matrix JSON files.

Format: {"dim": n, "data": [[re, im], ...]} with n^2 row-major entries.
JSON keeps fixtures auditable; the interleaved re/im pairs avoid any
ambiguity about complex encoding.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import MatrixFileError


def load_matrix(path) -> np.ndarray:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise MatrixFileError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "dim" not in doc or "data" not in doc:
        raise MatrixFileError(f"{path}: expected keys 'dim' and 'data'")
    dim = doc["dim"]
    data = doc["data"]
    if not isinstance(dim, int) or dim < 1:
        raise MatrixFileError(f"{path}: dim must be a positive integer")
    if not isinstance(data, list) or len(data) != dim * dim:
        raise MatrixFileError(
            f"{path}: data must hold dim^2 = {dim * dim} entries, got {len(data)}"
        )
    try:
        flat = [complex(float(re), float(im)) for re, im in data]
    except (TypeError, ValueError) as exc:
        raise MatrixFileError(f"{path}: entries must be [re, im] pairs") from exc
    if not all(math.isfinite(z.real) and math.isfinite(z.imag) for z in flat):
        raise MatrixFileError(f"{path}: entries must be finite")
    return np.array(flat, dtype=np.complex128).reshape(dim, dim)


def dump_matrix(x: np.ndarray, path) -> None:
    x = np.asarray(x, dtype=np.complex128)
    doc = {
        "dim": x.shape[0],
        "data": [[float(z.real), float(z.imag)] for z in x.ravel()],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
