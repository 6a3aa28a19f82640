"""Binary snapshot format for wave fields.

A snapshot is a pair of files sharing a base path:

    <base>.bin   little-endian float64, interleaved (re, im), x-major rows
    <base>.json  sidecar with the grid spec, hbar, time, and a sha256 of .bin

The layout is contractual so snapshots are bit-reproducible across runs.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .fields import WaveField
from .grid import GridSpec, make_grid

FORMAT_TAG = "phase-wave-snapshot/1"


def _payload(field: WaveField) -> bytes:
    inter = np.empty((field.values.shape[0], field.values.shape[1], 2), dtype="<f8")
    inter[:, :, 0] = field.values.real
    inter[:, :, 1] = field.values.imag
    return inter.tobytes(order="C")


def snapshot_checksum(field: WaveField) -> str:
    return hashlib.sha256(_payload(field)).hexdigest()


def write_snapshot(field: WaveField, base_path) -> dict:
    """Write <base>.bin and <base>.json atomically; returns the sidecar dict."""
    base = Path(base_path)
    base.parent.mkdir(parents=True, exist_ok=True)
    payload = _payload(field)
    sidecar = {
        "format": FORMAT_TAG,
        "grid": {
            "Lx": field.grid.spec.Lx,
            "Nx": field.grid.spec.Nx,
            "Pmax": field.grid.spec.Pmax,
            "Np": field.grid.spec.Np,
            "d": field.grid.spec.d,
        },
        "hbar": field.grid.hbar,
        "t": field.t,
        "dtype": "float64-le-interleaved-re-im",
        "layout": "x-major",
        "sha256": hashlib.sha256(payload).hexdigest(),
    }
    _atomic_write_bytes(base.with_suffix(".bin"), payload)
    _atomic_write_bytes(
        base.with_suffix(".json"),
        (json.dumps(sidecar, indent=2, sort_keys=True) + "\n").encode(),
    )
    return sidecar


def read_snapshot(base_path) -> WaveField:
    base = Path(base_path)
    with open(base.with_suffix(".json"), "r", encoding="utf-8") as fh:
        sidecar = json.load(fh)
    if sidecar.get("format") != FORMAT_TAG:
        raise ValidationError(f"unrecognized snapshot format {sidecar.get('format')!r}")
    payload = base.with_suffix(".bin").read_bytes()
    if hashlib.sha256(payload).hexdigest() != sidecar["sha256"]:
        raise ValidationError(f"snapshot checksum mismatch for {base}")
    g = sidecar["grid"]
    grid = make_grid(GridSpec(Lx=g["Lx"], Nx=g["Nx"], Pmax=g["Pmax"], Np=g["Np"], d=g["d"]),
                     hbar=sidecar["hbar"])
    raw = np.frombuffer(payload, dtype="<f8").reshape(g["Nx"], g["Np"], 2)
    values = raw[:, :, 0] + 1j * raw[:, :, 1]
    return WaveField(values, grid, t=sidecar["t"])


def _atomic_write_bytes(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
