"""Recording and feature-matrix I/O.

A recording on disk is a pair of files: `<stem>.f32` holding a little-endian
float32 matrix (channels x samples, row-major) and `<stem>.meta`, a plain-text
sidecar of `key = value` lines declaring rate, channel names, and provenance.
Feature matrices reuse the same pair format with rows = examples. Read-back
is bit-exact because data are stored and loaded as raw float32.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, SchemaError

_RATING_KEYS = ("valence", "arousal", "dominance")


@dataclass
class Recording:
    data: np.ndarray  # (n_channels, n_samples) float32
    rate_hz: float
    channel_names: list[str]
    subject: str = ""
    trial: str = ""
    ratings: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype="<f4")
        if self.data.ndim != 2:
            raise DataError("recording data must be 2-d (channels x samples)")
        if self.data.shape[0] != len(self.channel_names):
            raise DataError("channel_names length must match data rows")
        if not np.all(np.isfinite(self.data)):
            raise DataError("recording contains non-finite samples")

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]


def _meta_path(stem: Path) -> Path:
    return stem.with_suffix(".meta")


def _data_path(stem: Path) -> Path:
    return stem.with_suffix(".f32")


def _write_sidecar(path: Path, entries: list[tuple[str, str]]) -> None:
    lines = [f"{k} = {v}" for k, v in entries]
    path.write_text("\n".join(lines) + "\n")


def _read_sidecar(path: Path) -> dict[str, str]:
    if not path.exists():
        raise DataError(f"missing sidecar: {path}")
    out: dict[str, str] = {}
    for ln, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{path}:{ln}: expected 'key = value'")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def save_recording(stem: str | Path, rec: Recording) -> Path:
    stem = Path(stem)
    _data_path(stem).write_bytes(rec.data.astype("<f4", copy=False).tobytes())
    entries = [
        ("format", "recording"),
        ("rate_hz", repr(float(rec.rate_hz))),
        ("n_channels", str(rec.n_channels)),
        ("n_samples", str(rec.n_samples)),
        ("channel_names", ",".join(rec.channel_names)),
        ("subject", rec.subject),
        ("trial", rec.trial),
    ]
    for k in _RATING_KEYS:
        if k in rec.ratings:
            entries.append((k, repr(float(rec.ratings[k]))))
    for k, v in sorted(rec.extra.items()):
        entries.append((k, str(v)))
    _write_sidecar(_meta_path(stem), entries)
    return _data_path(stem)


def load_recording(stem: str | Path) -> Recording:
    stem = Path(stem)
    meta = _read_sidecar(_meta_path(stem))
    try:
        rate = float(meta.pop("rate_hz"))
        nc = int(meta.pop("n_channels"))
        ns = int(meta.pop("n_samples"))
        names = meta.pop("channel_names").split(",")
    except KeyError as e:
        raise DataError(f"sidecar missing required key: {e}") from None
    meta.pop("format", None)
    if len(names) != nc:
        raise DataError("channel_names count disagrees with n_channels")
    raw = _data_path(stem).read_bytes()
    expect = 4 * nc * ns
    if len(raw) != expect:
        raise DataError(
            f"{_data_path(stem)}: expected {expect} bytes, found {len(raw)}")
    data = np.frombuffer(raw, dtype="<f4").reshape(nc, ns)
    ratings = {k: float(meta.pop(k)) for k in _RATING_KEYS if k in meta}
    subject = meta.pop("subject", "")
    trial = meta.pop("trial", "")
    return Recording(data.copy(), rate, names, subject, trial, ratings, meta)


def read_csv_recording(path: str | Path, rate_hz: float,
                       subject: str = "", trial: str = "") -> Recording:
    """CSV with a header row of channel names; first column is sample index."""
    path = Path(path)
    with open(path) as f:
        header = f.readline().strip()
        if not header:
            raise DataError(f"{path}: empty file")
        names = [c.strip() for c in header.split(",")]
        if len(names) < 2:
            raise DataError(f"{path}: need an index column plus channels")
        try:
            body = np.loadtxt(f, delimiter=",", ndmin=2)
        except ValueError as e:
            raise DataError(f"{path}: {e}") from None
    if body.shape[1] != len(names):
        raise DataError(f"{path}: row width disagrees with header")
    idx = body[:, 0]
    if np.any(np.diff(idx) <= 0):
        raise DataError(f"{path}: sample index must increase")
    data = body[:, 1:].T  # rows become channels
    return Recording(data, rate_hz, names[1:], subject, trial)


# ---------------------------------------------------------------------------
# feature matrices: same pair format, rows = examples

def save_features(stem: str | Path, matrix: np.ndarray, labels: np.ndarray,
                  meta: dict | None = None) -> Path:
    stem = Path(stem)
    m = np.ascontiguousarray(matrix, dtype="<f4")
    if m.ndim != 2:
        raise SchemaError("feature matrix must be 2-d")
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (m.shape[0],):
        raise SchemaError("labels length must match matrix rows")
    _data_path(stem).write_bytes(m.tobytes())
    entries = [
        ("format", "features"),
        ("n_rows", str(m.shape[0])),
        ("n_cols", str(m.shape[1])),
        ("labels", ",".join(str(int(v)) for v in labels)),
    ]
    for k, v in sorted((meta or {}).items()):
        entries.append((k, str(v)))
    _write_sidecar(_meta_path(stem), entries)
    return _data_path(stem)


def load_features(stem: str | Path) -> tuple[np.ndarray, np.ndarray, dict]:
    stem = Path(stem)
    meta = _read_sidecar(_meta_path(stem))
    if meta.pop("format", "features") != "features":
        raise SchemaError(f"{stem}: not a feature matrix")
    try:
        rows = int(meta.pop("n_rows"))
        cols = int(meta.pop("n_cols"))
        labels = np.array([int(v) for v in meta.pop("labels").split(",")],
                          dtype=np.int64) if rows else np.zeros(0, np.int64)
    except KeyError as e:
        raise SchemaError(f"feature sidecar missing key: {e}") from None
    raw = _data_path(stem).read_bytes()
    if len(raw) != 4 * rows * cols:
        raise DataError(f"{_data_path(stem)}: size mismatch")
    mat = np.frombuffer(raw, dtype="<f4").reshape(rows, cols).copy()
    return mat, labels, meta


# ---------------------------------------------------------------------------
# versioned binary container (used for classifier models)

_MAGIC = b"ETBL"
_VERSION = 1


def save_blob(path: str | Path, header: dict, arrays: dict[str, np.ndarray]) -> None:
    """magic + version + JSON header + raw little-endian array payloads."""
    manifest = []
    payloads = []
    for name, arr in arrays.items():
        a = np.ascontiguousarray(arr)
        dt = a.dtype.newbyteorder("<")
        a = a.astype(dt, copy=False)
        manifest.append({"name": name, "dtype": dt.str, "shape": list(a.shape)})
        payloads.append(a.tobytes())
    head = dict(header)
    head["__arrays__"] = manifest
    blob = json.dumps(head, sort_keys=True).encode()
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<II", _VERSION, len(blob)))
        f.write(blob)
        for p in payloads:
            f.write(p)


def load_blob(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != _MAGIC:
            raise DataError(f"{path}: not a model container")
        version, hlen = struct.unpack("<II", f.read(8))
        if version != _VERSION:
            raise DataError(f"{path}: unsupported container version {version}")
        header = json.loads(f.read(hlen).decode())
        arrays = {}
        for ent in header.pop("__arrays__", []):
            dt = np.dtype(ent["dtype"])
            count = int(np.prod(ent["shape"], dtype=np.int64)) if ent["shape"] else 1
            buf = f.read(dt.itemsize * count)
            if len(buf) != dt.itemsize * count:
                raise DataError(f"{path}: truncated array {ent['name']}")
            arrays[ent["name"]] = np.frombuffer(buf, dtype=dt).reshape(ent["shape"]).copy()
    return header, arrays
