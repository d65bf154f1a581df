import hashlib
import json
import sys
from typing import Any, TextIO

import numpy as np

from errors import InputError

# Absolute slack for composite arithmetic (axioms, reductions, sup metric).
AXIOM_TOL = 1e-12
# Slack for the telescoping audit d(x_n, x_m) <= Phi_n - Phi_m.
TELESCOPE_TOL = 1e-9
# Slack for sampled semicontinuity checks on gauges.
LSC_TOL = 1e-9

SCHEMA_VERSION = "cfp-1"
DEFAULT_SEED = 20240601
GRID_POINTS = 64


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays and tuples into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=False)


def pp(obj, file: TextIO | None = None):
    print(dumps(obj), file=file or sys.stdout)


def input_digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def strip_timings(report: dict) -> dict:
    """Return a copy of the report without its timing block."""
    sanitized = dict(report)
    sanitized.pop("timings", None)
    return sanitized


def write_report(report: dict, path: str | None = None) -> None:
    if path is None or path == "-":
        pp(report)
        return
    with open(path, "w") as f:
        pp(report, file=f)


def check_finite_matrix(matrix, name: str = "matrix") -> np.ndarray:
    """Return the matrix as a float64 array; raise InputError unless square and finite."""
    try:
        arr = np.array(matrix, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise InputError(f"{name} is not a numeric matrix: {e}") from e
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise InputError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        i, j = np.argwhere(~np.isfinite(arr))[0]
        raise InputError(f"{name}[{i}][{j}] is not finite")
    return arr
