"""
Export Module.

This module contains the writers for run outputs: CSV tables with
``#``-prefixed metadata header lines and JSON documents. Every writer is
deterministic for identical inputs.
"""

import json
import logging
import subprocess
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import numpy as np
import pandas as pd

from app import __version__
from app.core.model import WignerGrid

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"


@lru_cache(maxsize=1)
def build_id() -> str:
    """``git describe`` of the source tree, or the package version outside git."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
            check=True,
        )
        return out.stdout.strip() or __version__
    except (OSError, subprocess.SubprocessError):
        return __version__


def metadata_lines(meta: Optional[Dict[str, Any]] = None) -> Iterable[str]:
    yield f"# build={build_id()}"
    for key, value in sorted((meta or {}).items()):
        yield f"# {key}={value}"


def write_frame(frame: pd.DataFrame, path: Path, meta: Optional[Dict[str, Any]] = None) -> Path:
    """
    Write a DataFrame as UTF-8 CSV preceded by metadata comment lines.

    Args:
        frame: Table to write
        path: Destination file
        meta: Key/value pairs echoed as ``# key=value`` lines

    Returns:
        The path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        for line in metadata_lines(meta):
            handle.write(line + "\n")
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("wrote %s (%d rows)", path, len(frame))
    return path


def read_frame(path: Path) -> pd.DataFrame:
    """Read a CSV written by :func:`write_frame`."""
    return pd.read_csv(path, comment="#")


def read_metadata(path: Path) -> Dict[str, str]:
    meta = {}
    with Path(path).open(encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
    return meta


def wigner_frame(wg: WignerGrid, neg_log: bool = False, clip: float = 30.0) -> pd.DataFrame:
    """Flatten a Wigner grid into columns x, p and W (or neg_log_W)."""
    X, P = wg.grid.mesh()
    column = "neg_log_W" if neg_log else "W"
    values = wg.neg_log(clip) if neg_log else wg.values
    return pd.DataFrame({"x": X.ravel(), "p": P.ravel(), column: np.ravel(values)})


def write_wigner(
    wg: WignerGrid, directory: Path, name: str, meta: Optional[Dict[str, Any]] = None
):
    """Write ``wigner_<name>.csv`` and ``neg_log_wigner_<name>.csv``."""
    directory = Path(directory)
    meta = dict(meta or {}, grid=wg.grid.spec(), weight=wg.weight)
    return (
        write_frame(wigner_frame(wg), directory / f"wigner_{name}.csv", meta),
        write_frame(wigner_frame(wg, neg_log=True), directory / f"neg_log_wigner_{name}.csv", meta),
    )


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def write_json(payload: Any, path: Path) -> Path:
    """Write JSON with sorted keys; complex numbers become {"re", "im"}."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    logger.info("wrote %s", path)
    return path
