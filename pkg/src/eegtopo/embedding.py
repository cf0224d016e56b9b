"""Delay-coordinate phase-space reconstruction plus lag/dimension diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, ParameterError
from .signals import Segment, TimeSeries

# diagnostics defaults; the pipeline itself runs with fixed (dim, lag)
AMI_BINS = 16
FNN_R_TOL = 15.0
FNN_A_TOL = 2.0
FNN_THRESHOLD = 0.05


@dataclass(frozen=True)
class EmbeddingParams:
    dim: int
    lag: int

    def __post_init__(self):
        if self.dim < 1 or self.lag < 1:
            raise ParameterError("embedding needs dim >= 1 and lag >= 1")

    def min_length(self) -> int:
        return (self.dim - 1) * self.lag + 1


@dataclass
class PointCloud:
    points: np.ndarray  # (m, d)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2 or self.points.shape[0] < 1:
            raise ParameterError("point cloud must be (m, d) with m >= 1")
        if not np.all(np.isfinite(self.points)):
            raise ParameterError("point cloud has non-finite coordinates")

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def _as_array(ts) -> np.ndarray:
    if isinstance(ts, TimeSeries):
        return ts.samples
    if isinstance(ts, Segment):
        return ts.samples
    return np.asarray(ts, dtype=np.float64)


def _embed_array(x: np.ndarray, dim: int, lag: int) -> np.ndarray:
    w = x.size
    m = w - (dim - 1) * lag
    if m < 1:
        raise ParameterError(
            f"series of {w} samples too short for dim={dim}, lag={lag}")
    # column j is x shifted by j*lag; no interpolation anywhere
    cols = [x[j * lag: j * lag + m] for j in range(dim)]
    return np.stack(cols, axis=1)


def delay_embed(seg, p: EmbeddingParams) -> PointCloud:
    """x_k = (t_k, t_{k+lag}, ..., t_{k+(dim-1) lag}); count = w - (dim-1) lag."""
    return PointCloud(_embed_array(_as_array(seg), p.dim, p.lag))


def _hist_mi(x: np.ndarray, y: np.ndarray, bins: int) -> float:
    # equal-width bins over the observed range, MI in nats
    joint, _, _ = np.histogram2d(x, y, bins=bins)
    p = joint / joint.sum()
    px = p.sum(axis=1, keepdims=True)
    py = p.sum(axis=0, keepdims=True)
    nz = p > 0
    return float(np.sum(p[nz] * np.log(p[nz] / (px @ py)[nz])))


def ami_lag(ts, max_lag: int, bins: int = AMI_BINS) -> tuple[int, np.ndarray]:
    """Average mutual information over lags 1..max_lag.

    Returns (selected lag, curve). The selected lag is the first local
    minimum of the curve; if the curve has none, the global minimum wins.
    """
    x = _as_array(ts)
    if bins < 2:
        raise ParameterError("bins must be >= 2")
    if not (1 <= max_lag < x.size / 2):
        raise ParameterError("need 1 <= max_lag < length/2")
    if np.ptp(x) == 0:
        raise DegenerateInputError("AMI undefined for a constant series")
    curve = np.empty(max_lag, dtype=np.float64)
    for lag in range(1, max_lag + 1):
        curve[lag - 1] = _hist_mi(x[:-lag], x[lag:], bins)
    for i in range(1, max_lag - 1):
        if curve[i] < curve[i - 1] and curve[i] <= curve[i + 1]:
            return i + 1, curve
    return int(np.argmin(curve)) + 1, curve


def _nearest_neighbors(emb: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exhaustive nearest neighbor per point, chunked to bound memory.

    Returns (index, squared distance) arrays of length m.
    """
    m = emb.shape[0]
    sq = np.einsum("ij,ij->i", emb, emb)
    nn_idx = np.empty(m, dtype=np.int64)
    nn_d2 = np.empty(m, dtype=np.float64)
    chunk = max(1, int(2**22 // max(m, 1)))
    for s in range(0, m, chunk):
        block = emb[s:s + chunk]
        d2 = sq[s:s + chunk, None] + sq[None, :] - 2.0 * (block @ emb.T)
        np.maximum(d2, 0.0, out=d2)
        rows = np.arange(d2.shape[0])
        d2[rows, rows + s] = np.inf  # exclude self
        nn_idx[s:s + chunk] = np.argmin(d2, axis=1)
        nn_d2[s:s + chunk] = d2[rows, nn_idx[s:s + chunk]]
    return nn_idx, nn_d2


def fnn_dim(ts, lag: int, max_dim: int, r_tol: float = FNN_R_TOL,
            a_tol: float = FNN_A_TOL,
            threshold: float = FNN_THRESHOLD) -> tuple[int, np.ndarray]:
    """False-nearest-neighbor fraction for dimensions 1..max_dim.

    Kennel criteria: a neighbor is false when the added coordinate jumps by
    more than r_tol times the neighbor distance, or when the grown distance
    exceeds a_tol times the series spread. Returns (selected dim, fractions);
    selected = smallest dim with fraction < threshold, fallback max_dim.
    """
    x = _as_array(ts)
    if lag < 1:
        raise ParameterError("lag must be >= 1")
    if max_dim < 2:
        raise ParameterError("max_dim must be >= 2")
    if x.size - max_dim * lag < 2:
        raise ParameterError("series too short to test max_dim at this lag")
    sd = x.std()
    if sd == 0:
        raise DegenerateInputError("FNN undefined for a constant series")
    fractions = np.empty(max_dim, dtype=np.float64)
    for d in range(1, max_dim + 1):
        # keep only points whose (d+1)-th coordinate exists
        m = x.size - d * lag
        emb = _embed_array(x, d, lag)[:m]
        nxt = x[d * lag: d * lag + m]
        nn_idx, nn_d2 = _nearest_neighbors(emb)
        extra = np.abs(nxt - nxt[nn_idx])
        r_d = np.sqrt(nn_d2)
        crit1 = extra > r_tol * r_d  # with r_d = 0 this is extra > 0
        crit2 = np.sqrt(nn_d2 + extra**2) > a_tol * sd
        fractions[d - 1] = float(np.mean(crit1 | crit2))
    below = np.nonzero(fractions < threshold)[0]
    chosen = int(below[0]) + 1 if below.size else max_dim
    return chosen, fractions
