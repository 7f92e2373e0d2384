# tools/io_writers.py

import json
from pathlib import Path
from typing import Any, Dict, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from config import FLOAT_FORMAT


def _render(value: Any) -> Any:
    """Recursively convert numpy scalars/arrays and floats into JSON-ready values."""
    if isinstance(value, dict):
        return {str(k): _render(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_render(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_render(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _Float17(float(value))
    return value


class _Float17(float):
    """Float that serialises with 17 significant digits."""

    def __repr__(self):
        if not np.isfinite(self):
            return "null"
        return FLOAT_FORMAT % float(self)


def _encode(value: Any, indent: int) -> str:
    """Indented JSON with sorted keys; floats keep 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(value[k], indent + 1)}" for k in sorted(value)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        items = [f"{pad}{_encode(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(value, _Float17):
        return repr(value)
    return json.dumps(value)


def write_json(path: Path, payload: Dict[str, Any], config: Dict[str, Any] = None) -> Path:
    """
    Write a result dictionary as JSON.

    Parameters
    ----------
    path : Path
        Output file.
    payload : dict
        Result values; numpy types are converted.
    config : dict, optional
        Resolved run configuration, embedded under "config".

    Returns
    -------
    Path of the written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = dict(payload)
    if config is not None:
        body["config"] = config
    path.write_text(_encode(_render(body), 0) + "\n", encoding="utf-8")
    logger.debug(f"[io_writers] Wrote {path}")
    return path


def write_csv(path: Path, frame: pd.DataFrame) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug(f"[io_writers] Wrote {path} ({len(frame)} rows)")
    return path


def read_json(path: Path) -> Dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_field(path: Path, frame: pd.DataFrame, metadata: Dict[str, Any]) -> Tuple[Path, Path]:
    """Field dump: CSV plus a JSON sidecar with the same stem."""
    path = Path(path)
    csv_path = write_csv(path.with_suffix(".csv"), frame)
    json_path = write_json(path.with_suffix(".json"), metadata)
    return csv_path, json_path


def read_field(path: Path) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    path = Path(path)
    frame = pd.read_csv(path.with_suffix(".csv"), float_precision="round_trip")
    metadata = read_json(path.with_suffix(".json"))
    return frame, metadata
