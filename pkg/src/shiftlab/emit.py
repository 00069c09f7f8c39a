"""Dataset emission and exchange formats.

CSV files carry a header row and full-precision (%.17g) reals so runs
diff cleanly; JSON sidecars carry provenance (spectrum, strategy, seed,
tolerances, calibration constants).  Matrices travel as
``{"diag": [...], "sub": [...]}``.  Config files are flat ``key=value``
text; command-line flags override file values.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from shiftlab.tridiag import SymTridiag


def fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def render_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows) -> None:
    Path(path).write_text(render_csv(header, rows), encoding="utf-8")


def jsonable(obj):
    """Recursively convert to JSON-safe values (NaN/inf become null)."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if hasattr(obj, "item") and not hasattr(obj, "__len__"):  # numpy scalar
        return jsonable(obj.item())
    if hasattr(obj, "tolist"):
        return jsonable(obj.tolist())
    return obj


def write_json(path, obj) -> None:
    Path(path).write_text(
        json.dumps(jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n",
        encoding="utf-8",
    )


def matrix_to_dict(T: SymTridiag) -> dict:
    return {"diag": T.diag.tolist(), "sub": T.sub.tolist()}


def matrix_from_dict(data: dict) -> SymTridiag:
    try:
        return SymTridiag(data["diag"], data["sub"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad matrix payload: {exc}") from exc


def read_matrix_json(path) -> SymTridiag:
    return matrix_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_matrix_json(path, T: SymTridiag) -> None:
    write_json(path, matrix_to_dict(T))


def parse_reals(text: str):
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ValueError(f"bad real list {text!r}") from exc


def parse_config_file(path) -> dict:
    """Flat key=value text; blank lines and # comments ignored."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, _, val = line.partition("=")
        values[key.strip().replace("-", "_")] = val.strip()
    return values
