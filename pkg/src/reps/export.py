"""Export of representation operators: WaveOp binaries and Fock JSON."""

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np

from ..grid.io import PathLike, SerializationError, deinterleave, interleave, sidecar_path
from .bargmann import FockError, FockOp, FockVec
from .schrodinger import RepresentationError, Sign, WaveGrid, WaveOp

logger = logging.getLogger(__name__)


def save_waveop(op: WaveOp, path: PathLike) -> Path:
    """
    Write the row-major matrix as interleaved re/im float64 and a JSON header sidecar.

    Returns:
        Path of the binary payload
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "hbar": op.hbar,
        "sign": int(op.sign),
        "grid": {"L_v": op.grid.L_v, "N_v": op.grid.N_v},
    }
    path.write_bytes(interleave(op.matrix).tobytes())
    sidecar_path(path).write_text(json.dumps(header, indent=2, sort_keys=True))
    logger.debug(f"Saved WaveOp N_v={op.grid.N_v} to {path}")
    return path


def load_waveop(path: PathLike) -> WaveOp:
    path = Path(path)
    try:
        header = json.loads(sidecar_path(path).read_text())
        raw = path.read_bytes()
    except (OSError, ValueError) as e:
        raise SerializationError(f"Cannot read WaveOp at {path}: {e}") from e
    try:
        grid = WaveGrid(float(header["grid"]["L_v"]), int(header["grid"]["N_v"]))
        payload = np.frombuffer(raw, dtype="<f8")
        if payload.size != 2 * grid.N_v ** 2:
            raise SerializationError(
                f"{path}: expected {2 * grid.N_v ** 2} reals, found {payload.size}"
            )
        matrix = deinterleave(payload, (grid.N_v, grid.N_v))
        return WaveOp(float(header["hbar"]), Sign(int(header["sign"])), grid, matrix)
    except (KeyError, RepresentationError) as e:
        raise SerializationError(f"Invalid WaveOp header in {path}: {e}") from e


def save_fock(obj: Union[FockVec, FockOp], path: PathLike) -> Path:
    """Write a FockVec or FockOp as JSON with re/im pairs."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    kind = "vector" if isinstance(obj, FockVec) else "operator"
    data = {"kind": kind, **obj.to_dict()}
    path.write_text(json.dumps(data, sort_keys=True))
    return path


def load_fock(path: PathLike) -> Union[FockVec, FockOp]:
    try:
        data = json.loads(Path(path).read_text())
        if data["kind"] == "vector":
            return FockVec.from_dict(data)
        if data["kind"] == "operator":
            return FockOp.from_dict(data)
    except (OSError, ValueError, KeyError, FockError) as e:
        raise SerializationError(f"Cannot read Fock data at {path}: {e}") from e
    raise SerializationError(f"Unknown Fock kind in {path}: {data['kind']}")
