"""Binary and JSON-sidecar serialization of sampled observables."""

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np

from .gridfn import GridSpec, InvalidGridError, PFunction

logger = logging.getLogger(__name__)

HEADER_DTYPE = np.dtype([
    ("N_s", "<i8"), ("N_x", "<i8"), ("N_y", "<i8"),
    ("L_s", "<f8"), ("L_x", "<f8"), ("L_y", "<f8"),
])

PathLike = Union[str, Path]


class SerializationError(Exception):
    """Base exception for import/export errors."""
    pass


def interleave(values: np.ndarray) -> np.ndarray:
    """Complex array -> flat little-endian float64 array of (re, im) pairs."""
    flat = np.ascontiguousarray(values, dtype=np.complex128).ravel()
    return flat.view(np.float64).astype("<f8")


def deinterleave(payload: np.ndarray, shape) -> np.ndarray:
    pairs = np.asarray(payload, dtype="<f8").reshape(-1, 2)
    return (pairs[:, 0] + 1j * pairs[:, 1]).reshape(shape)


def sidecar_path(path: PathLike) -> Path:
    return Path(path).with_suffix(".json")


def save_pfunction(k: PFunction, path: PathLike) -> Path:
    """
    Write k as header + interleaved payload, and its GridSpec as a JSON sidecar.

    Args:
        k: Observable to export
        path: Binary file path; the sidecar gets the same stem with .json

    Returns:
        Path of the binary file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    spec = k.spec
    header = np.array(
        [(spec.N_s, spec.N_x, spec.N_y, spec.L_s, spec.L_x, spec.L_y)], dtype=HEADER_DTYPE
    )
    with open(path, "wb") as f:
        f.write(header.tobytes())
        f.write(interleave(k.values).tobytes())
    sidecar_path(path).write_text(json.dumps(spec.to_dict(), indent=2, sort_keys=True))
    logger.debug(f"Saved PFunction {spec.shape} to {path}")
    return path


def load_pfunction(path: PathLike) -> PFunction:
    """
    Read a PFunction written by save_pfunction.

    Raises:
        SerializationError: If the file is truncated or disagrees with its sidecar
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise SerializationError(f"Cannot read {path}: {e}") from e

    if len(raw) < HEADER_DTYPE.itemsize:
        raise SerializationError(f"{path} is too short for a header")
    header = np.frombuffer(raw[:HEADER_DTYPE.itemsize], dtype=HEADER_DTYPE)[0]
    try:
        spec = GridSpec(
            float(header["L_s"]), float(header["L_x"]), float(header["L_y"]),
            int(header["N_s"]), int(header["N_x"]), int(header["N_y"]),
        )
    except InvalidGridError as e:
        raise SerializationError(f"Invalid grid header in {path}: {e}") from e

    sidecar = sidecar_path(path)
    if sidecar.exists():
        declared = GridSpec.from_dict(json.loads(sidecar.read_text()))
        if declared != spec:
            raise SerializationError(f"Header of {path} disagrees with {sidecar}")

    payload = np.frombuffer(raw[HEADER_DTYPE.itemsize:], dtype="<f8")
    if payload.size != 2 * spec.size:
        raise SerializationError(
            f"{path}: expected {2 * spec.size} reals, found {payload.size}"
        )
    return PFunction(spec, deinterleave(payload, spec.shape))
