"""Run outputs: metric CSVs, checksums, and the run manifest.

CSV files use '.' decimals, 17-significant-digit floats (lossless for
float64), and LF line endings.  The manifest is written atomically at run
end and lists a sha256 for every file the run emitted, so reruns can be
compared checksum-by-checksum.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

MANIFEST_NAME = "manifest.json"


def fmt_float(x: float) -> str:
    return f"{float(x):.17g}"


def write_metric_csv(path, columns, rows) -> None:
    """rows: iterable of sequences matching ``columns``; floats formatted
    losslessly, everything else via str()."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(
            fmt_float(v) if isinstance(v, float) else str(v) for v in row))
    data = ("\n".join(lines) + "\n").encode()
    _atomic_write(path, data)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


@dataclass
class RunManifest:
    resolved_config: dict
    derived: dict
    verdicts: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    status: str = "ok"
    wall_clock_seconds: float = 0.0
    tool: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "tool": self.tool,
            "status": self.status,
            "resolved_config": self.resolved_config,
            "derived": self.derived,
            "verdicts": self.verdicts,
            "outputs": self.outputs,
            "wall_clock_seconds": self.wall_clock_seconds,
        }


def collect_output_checksums(out_dir) -> dict:
    """sha256 of every file under out_dir (except the manifest itself)."""
    out_dir = Path(out_dir)
    sums = {}
    for p in sorted(out_dir.rglob("*")):
        if p.is_file() and p.name != MANIFEST_NAME and not p.name.endswith(".tmp"):
            sums[str(p.relative_to(out_dir))] = sha256_file(p)
    return sums


def write_manifest(manifest: RunManifest, out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest.outputs = collect_output_checksums(out_dir)
    path = out_dir / MANIFEST_NAME
    _atomic_write(path, (json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n").encode())
    return path


class WallClock:
    def __enter__(self):
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self._t0
        return False
