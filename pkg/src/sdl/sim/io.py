"""Serialization of path batches and sample lists.

Binary format "SDL1": a fixed little-endian header

    magic   4 bytes  b"SDL1"
    n_paths u64
    n_steps u64
    T       f64
    seed    i64

followed by the values payload, row-major float64 of shape
(n_paths, n_steps + 1) including the start column. The uniform grid is
implied by (T, n_steps); the clamp counter is diagnostic state, not data,
and is not serialized (reads get 0).

CSV: a plain export for small batches — one row per grid time, columns
t, path_0, ..., path_{n-1}, with the batch metadata in a comment line so the
file round-trips. Bare single-column sample lists (no comment header) are
also readable, for feeding external samples to the estimators.
"""

from __future__ import annotations

import io as _stdio
import struct
import warnings
from pathlib import Path

import numpy as np

from ..errors import FormatError, InvalidConfig
from .paths import PathBatch, check_seed

__all__ = [
    "write_sdl1",
    "read_sdl1",
    "write_csv",
    "read_csv",
    "read_samples",
    "write_samples_csv",
    "batch_to_bytes",
]

MAGIC = b"SDL1"
_HEADER = struct.Struct("<4sQQdq")


def write_sdl1(batch: PathBatch, path) -> None:
    """Write a PathBatch to `path` in the SDL1 binary format."""
    if not isinstance(batch, PathBatch):
        raise InvalidConfig("batch must be a PathBatch")
    header = _HEADER.pack(
        MAGIC, batch.n_paths, batch.n_steps, batch.T, check_seed(batch.seed)
    )
    payload = np.ascontiguousarray(batch.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def read_sdl1(path) -> PathBatch:
    """Read a PathBatch from an SDL1 file; FormatError on any malformation."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(data)} bytes)")
    magic, n_paths, n_steps, T, seed = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if n_steps < 1 or n_paths < 1:
        raise FormatError(f"{path}: invalid shape n_paths={n_paths} n_steps={n_steps}")
    if not (np.isfinite(T) and T > 0):
        raise FormatError(f"{path}: invalid horizon T={T}")
    expected = n_paths * (n_steps + 1) * 8
    payload = data[_HEADER.size :]
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    values = np.frombuffer(payload, dtype="<f8").reshape(n_paths, n_steps + 1).copy()
    times = np.linspace(0.0, T, n_steps + 1)
    return PathBatch(times=times, values=values, seed=seed, clamp_violations=0)


def write_csv(batch: PathBatch, path) -> None:
    """Export a batch as CSV: rows are grid times, columns t, path_0, ...

    Intended for small batches (plotting, spreadsheets); the binary format
    is the scalable one. Metadata travels in a `# sdl1:` comment line.
    """
    if not isinstance(batch, PathBatch):
        raise InvalidConfig("batch must be a PathBatch")
    table = np.column_stack([batch.times, batch.values.T])
    names = ",".join(f"path_{i}" for i in range(batch.n_paths))
    header = (
        f"sdl1: n_paths={batch.n_paths} n_steps={batch.n_steps} "
        f"T={batch.T!r} seed={batch.seed}\nt,{names}"
    )
    np.savetxt(path, table, delimiter=",", fmt="%.17g", header=header)


def read_csv(path) -> PathBatch:
    """Read a batch written by write_csv; FormatError on malformed input."""
    seed = 0
    T = None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            first = fh.readline()
            if first.startswith("# sdl1:"):
                for tok in first.split()[2:]:
                    key, _, val = tok.partition("=")
                    if key == "seed":
                        seed = int(val)
                    elif key == "T":
                        T = float(val)
            fh.seek(0)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", UserWarning)
                table = np.loadtxt(fh, delimiter=",", comments="#", ndmin=2)
    except (OSError, ValueError) as exc:
        raise FormatError(f"{path}: not a readable batch CSV ({exc})") from exc
    if table.shape[1] < 2 or table.shape[0] < 2:
        raise FormatError(f"{path}: batch CSV needs a t column and >= 1 path")
    times = table[:, 0]
    if T is None:
        T = float(times[-1])
    return PathBatch(
        times=times, values=np.ascontiguousarray(table[:, 1:].T), seed=seed
    )


def write_samples_csv(samples, path) -> None:
    """Write a bare one-column sample list (e.g. horizon values)."""
    arr = np.asarray(samples, dtype=np.float64).ravel()
    np.savetxt(path, arr, fmt="%.17g", header="sample")


def read_samples(path) -> np.ndarray:
    """Load a 1-d sample array from an SDL1 batch (horizon column) or a CSV.

    SDL1 files contribute their terminal values; CSV files may be either a
    bare sample column or a write_csv batch (again the terminal row is
    taken). FormatError if neither format matches.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return read_sdl1(path).terminal()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            raw = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except (OSError, ValueError) as exc:
        raise FormatError(f"{path}: neither SDL1 nor CSV samples ({exc})") from exc
    if raw.shape[1] == 1:
        return np.ascontiguousarray(raw[:, 0])
    # batch CSV: columns t, path_0, ... — take the horizon row
    return np.ascontiguousarray(raw[-1, 1:])


def batch_to_bytes(batch: PathBatch) -> bytes:
    """SDL1 serialization to memory (used by determinism checks)."""
    buf = _stdio.BytesIO()
    if not isinstance(batch, PathBatch):
        raise InvalidConfig("batch must be a PathBatch")
    buf.write(
        _HEADER.pack(MAGIC, batch.n_paths, batch.n_steps, batch.T, check_seed(batch.seed))
    )
    buf.write(np.ascontiguousarray(batch.values, dtype="<f8").tobytes())
    return buf.getvalue()
