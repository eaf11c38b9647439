"""File formats: profile CSV and binary, trajectory dumps, reaction JSON.

CSV puts one node per row (coordinates, then the value).  The binary layout
is magic + header (dims, per-axis extents and counts) + little-endian float64
payload in C order; it round-trips bitwise where CSV goes through repr().
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .profiles import Grid, Profile
from .quasi_periodic import QPSignal, TorusPhase
from .reaction import ReactionTerm

MAGIC = b"SKLB"


# -- profiles: CSV ---------------------------------------------------------------


def profile_to_csv(profile: Profile, path: str | Path) -> None:
    grid = profile.grid
    header = "x,value" if grid.dimension == 1 else "x,y,value"
    coords = grid.meshgrid()
    cols = [c.ravel() for c in coords] + [profile.values.ravel()]
    data = np.column_stack(cols)
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")


def _axis_from_coords(col: np.ndarray) -> tuple[float, float, int]:
    vals = np.unique(col)
    if vals.size < 3:
        raise ValueError("profile CSV has fewer than 3 distinct nodes on an axis")
    steps = np.diff(vals)
    if np.max(steps) - np.min(steps) > 1e-9 * max(1.0, np.max(np.abs(vals))):
        raise ValueError("profile CSV nodes are not uniformly spaced")
    return float(vals[0]), float(vals[-1]), int(vals.size)


def profile_from_csv(path: str | Path) -> Profile:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] == 2:
        lo, hi, n = _axis_from_coords(data[:, 0])
        grid = Grid.line(lo, hi, n)
        order = np.argsort(data[:, 0], kind="stable")
        return Profile(grid, data[order, 1])
    if data.shape[1] == 3:
        xlo, xhi, nx = _axis_from_coords(data[:, 0])
        ylo, yhi, ny = _axis_from_coords(data[:, 1])
        grid = Grid(((xlo, xhi), (ylo, yhi)), (nx, ny))
        # lexicographic (x, y) sort recovers C order
        order = np.lexsort((data[:, 1], data[:, 0]))
        return Profile(grid, data[order, 2].reshape(nx, ny))
    raise ValueError(f"profile CSV must have 2 or 3 columns, got {data.shape[1]}")


# -- profiles: binary ------------------------------------------------------------


def profile_to_bytes(profile: Profile) -> bytes:
    grid = profile.grid
    out = [MAGIC, struct.pack("<I", grid.dimension)]
    for (lo, hi), n in zip(grid.extents, grid.counts):
        out.append(struct.pack("<ddq", lo, hi, n))
    payload = np.ascontiguousarray(profile.values, dtype="<f8")
    out.append(payload.tobytes())
    return b"".join(out)


def profile_from_bytes(buf: bytes) -> Profile:
    if buf[:4] != MAGIC:
        raise ValueError("not a profile blob (bad magic)")
    (dims,) = struct.unpack_from("<I", buf, 4)
    if dims not in (1, 2):
        raise ValueError(f"unsupported dimension {dims}")
    off = 8
    extents = []
    counts = []
    for _ in range(dims):
        lo, hi, n = struct.unpack_from("<ddq", buf, off)
        extents.append((lo, hi))
        counts.append(int(n))
        off += 24
    grid = Grid(tuple(extents), tuple(counts))
    total = int(np.prod(counts))
    vals = np.frombuffer(buf, dtype="<f8", count=total, offset=off)
    return Profile(grid, vals.reshape(grid.shape()))


def profile_to_binary(profile: Profile, path: str | Path) -> None:
    Path(path).write_bytes(profile_to_bytes(profile))


def profile_from_binary(path: str | Path) -> Profile:
    return profile_from_bytes(Path(path).read_bytes())


# -- trajectories ----------------------------------------------------------------


def trajectory_to_csv(times, profiles: list[Profile], path: str | Path) -> None:
    """Flat dump: one row per (time, node index, value)."""
    times = np.asarray(times, dtype=float)
    if times.size != len(profiles):
        raise ValueError("one time per profile required")
    rows = []
    for t, p in zip(times, profiles):
        flat = p.values.ravel()
        idx = np.arange(flat.size)
        rows.append(np.column_stack([np.full(flat.size, t), idx, flat]))
    np.savetxt(
        path,
        np.concatenate(rows),
        delimiter=",",
        header="time,node,value",
        comments="",
        fmt=("%.17g", "%d", "%.17g"),
    )


def dump_trajectory(
    directory: str | Path,
    times,
    profiles: list[Profile],
    phases: list[TorusPhase] | None = None,
    prefix: str = "profile",
) -> Path:
    """Binary profile files plus a time-indexed manifest; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    times = np.asarray(times, dtype=float)
    if times.size != len(profiles):
        raise ValueError("one time per profile required")
    files = []
    for i, p in enumerate(profiles):
        name = f"{prefix}_{i:05d}.bin"
        profile_to_binary(p, directory / name)
        files.append(name)
    manifest = {
        "format": "profile-binary-v1",
        "times": [float(t) for t in times],
        "files": files,
    }
    if phases is not None:
        manifest["phases"] = [list(ph.theta) for ph in phases]
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return path


def load_trajectory(directory: str | Path):
    """Inverse of dump_trajectory: (times, profiles, phases-or-None)."""
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    times = np.asarray(manifest["times"], dtype=float)
    profiles = [profile_from_binary(directory / f) for f in manifest["files"]]
    phases = None
    if "phases" in manifest:
        phases = [TorusPhase(tuple(th)) for th in manifest["phases"]]
    return times, profiles, phases


# -- reaction terms ---------------------------------------------------------------


def reaction_to_dict(term: ReactionTerm) -> dict:
    out = {
        "form": term.form,
        "signals": {k: json.loads(v.to_json()) for k, v in term.signals.items()},
        "params": {k: float(v) for k, v in term.params.items()},
        "g_symmetric": term.g_symmetric,
        "zero_at_zero": term.zero_at_zero,
    }
    if not term.signals and term.basis_hint is not None:
        out["omegas"] = list(term.basis_hint.omegas)
    return out


def reaction_from_dict(raw: dict) -> ReactionTerm:
    from .quasi_periodic import FrequencyBasis

    signals = {
        k: QPSignal.from_json(json.dumps(v)) for k, v in raw["signals"].items()
    }
    hint = None
    if "omegas" in raw:
        hint = FrequencyBasis(tuple(raw["omegas"]))
    return ReactionTerm(
        form=raw["form"],
        signals=signals,
        params=dict(raw["params"]),
        g_symmetric=bool(raw.get("g_symmetric", False)),
        zero_at_zero=bool(raw.get("zero_at_zero", False)),
        basis_hint=hint,
    )
