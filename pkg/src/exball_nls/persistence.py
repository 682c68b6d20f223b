"""Run directories: a JSON manifest plus one raw binary file per snapshot.

Snapshot files hold little-endian float64 pairs (re, im) for all M+1 nodes.
Each file is hashed with SHA-256 and the digest stored in the manifest.
"""
from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path

import numpy as np

from .errors import IntegrityError
from .functional_calculus import PROFILE_ID, profile_digest
from .nls_solver import EvolutionConfig, Trajectory
from .radial_core import RadialGrid

SPEC_VERSION = 1
MANIFEST = "manifest.json"
_DTYPE = np.dtype("<f8")


def snapshot_bytes(values: np.ndarray) -> bytes:
    v = np.asarray(values, dtype=complex)
    pairs = np.empty(2 * v.size, dtype=_DTYPE)
    pairs[0::2] = v.real
    pairs[1::2] = v.imag
    return pairs.tobytes()


def values_from_bytes(raw: bytes, M: int) -> np.ndarray:
    pairs = np.frombuffer(raw, dtype=_DTYPE)
    if pairs.size != 2 * (M + 1):
        raise IntegrityError(f"snapshot holds {pairs.size} floats, expected {2 * (M + 1)}")
    return pairs[0::2] + 1j * pairs[1::2]


def sha256(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def save_trajectory(traj: Trajectory, run_dir, extra: dict | None = None) -> Path:
    """Write snapshots and manifest; returns the manifest path."""
    run_dir = Path(run_dir)
    snap_dir = run_dir / "snapshots"
    snap_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, (t, v) in enumerate(zip(traj.times, traj.values)):
        raw = snapshot_bytes(v)
        name = f"snapshots/{i:06d}.bin"
        (run_dir / name).write_bytes(raw)
        entries.append({"index": i, "t": float(t), "file": name, "sha256": sha256(raw)})
    manifest = {
        "spec_version": SPEC_VERSION,
        "grid": {"L": traj.grid.L, "M": traj.grid.M},
        "config": traj.config.to_dict(),
        "truncated": bool(traj.truncated),
        "last_trusted_time": traj.last_trusted_time,
        "profile": {"id": PROFILE_ID, "digest": profile_digest()},
        "hash": "sha256",
        "snapshots": entries,
        "extra": extra or {},
    }
    path = run_dir / MANIFEST
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    # wall-clock data is kept out of the manifest so reruns compare byte-identical
    (run_dir / "timestamps.json").write_text(json.dumps({"written": time.strftime("%Y-%m-%dT%H:%M:%S%z")}) + "\n")
    return path


def read_manifest(run_dir) -> dict:
    path = Path(run_dir) / MANIFEST
    try:
        manifest = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise IntegrityError(f"no manifest in {run_dir}") from exc
    except json.JSONDecodeError as exc:
        raise IntegrityError(f"manifest is not valid JSON: {exc}") from exc
    if manifest.get("spec_version") != SPEC_VERSION:
        raise IntegrityError(f"unsupported spec_version {manifest.get('spec_version')!r}")
    return manifest


def load_trajectory(run_dir) -> Trajectory:
    """Load and hash-verify a run; raises IntegrityError on any mismatch."""
    run_dir = Path(run_dir)
    manifest = read_manifest(run_dir)
    grid = RadialGrid(manifest["grid"]["L"], manifest["grid"]["M"])
    cfg = EvolutionConfig(**manifest["config"])
    times, vals = [], []
    for e in manifest["snapshots"]:
        path = run_dir / e["file"]
        if not path.is_file():
            raise IntegrityError(f"missing snapshot {e['file']}")
        raw = path.read_bytes()
        if sha256(raw) != e["sha256"]:
            raise IntegrityError(f"hash mismatch for {e['file']}")
        times.append(e["t"])
        vals.append(values_from_bytes(raw, grid.M))
    return Trajectory(grid, cfg, np.array(times), np.array(vals),
                      truncated=manifest.get("truncated", False),
                      last_trusted_time=manifest.get("last_trusted_time"))


def write_field(path, values: np.ndarray) -> str:
    raw = snapshot_bytes(values)
    Path(path).write_bytes(raw)
    return sha256(raw)


def write_json(path, obj) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)
