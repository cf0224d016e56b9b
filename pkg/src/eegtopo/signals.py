"""Time-series ingest, band-pass filtering, segmentation, and synthesis."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import signal as spsig

from .errors import DegenerateInputError, EmptyResultError, ParameterError

# band table per the usual EEG conventions; gamma capped at 45 Hz to stay
# clear of mains/muscle bands. Overridable through config.
DEFAULT_BANDS: dict[str, tuple[float, float]] = {
    "theta": (4.0, 8.0),
    "alpha": (8.0, 13.0),
    "beta": (13.0, 30.0),
    "gamma": (30.0, 45.0),
}

BAND_ORDER = ("theta", "alpha", "beta", "gamma")

FILTER_ORDER = 4  # Butterworth prototype order, applied forward-backward


def _round_half_up(x: float) -> int:
    # deterministic across platforms; avoids banker's rounding
    return int(math.floor(x + 0.5))


@dataclass
class TimeSeries:
    """A uniformly sampled real signal with provenance metadata.

    samples must be finite, rate_hz positive, length at least 2.
    """

    samples: np.ndarray
    rate_hz: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size < 2:
            raise ParameterError("time series must be 1-d with length >= 2")
        if not np.all(np.isfinite(self.samples)):
            raise ParameterError("time series contains non-finite samples")
        if not (self.rate_hz > 0):
            raise ParameterError("rate_hz must be positive")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.rate_hz


@dataclass
class BandSet:
    """One TimeSeries per band, equal length and rate."""

    theta: TimeSeries
    alpha: TimeSeries
    beta: TimeSeries
    gamma: TimeSeries

    def __post_init__(self):
        ref = self.theta
        for name in ("alpha", "beta", "gamma"):
            ts = getattr(self, name)
            if len(ts) != len(ref) or ts.rate_hz != ref.rate_hz:
                raise ParameterError("band series must share length and rate")

    def __iter__(self):
        for name in BAND_ORDER:
            yield name, getattr(self, name)


@dataclass
class Segment:
    band: str
    samples: np.ndarray
    start_index: int
    window_len: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.size != self.window_len:
            raise ParameterError("segment samples length must equal window_len")
        if self.start_index < 0:
            raise ParameterError("start_index must be >= 0")


def _design_sos(lo_hz: float, hi_hz: float, rate_hz: float) -> np.ndarray:
    nyq = rate_hz / 2.0
    if not (0.0 < lo_hz < hi_hz < nyq):
        raise ParameterError(
            f"cutoffs must satisfy 0 < lo < hi < Nyquist ({nyq:g} Hz), "
            f"got [{lo_hz:g}, {hi_hz:g}]"
        )
    return spsig.butter(FILTER_ORDER, [lo_hz, hi_hz], btype="bandpass",
                        fs=rate_hz, output="sos")


def bandpass(ts: TimeSeries, lo_hz: float, hi_hz: float) -> TimeSeries:
    """Zero-phase band-pass via forward-backward application of a 4th-order
    Butterworth design. Length and rate are preserved."""
    sos = _design_sos(lo_hz, hi_hz, ts.rate_hz)
    # reflect-pad to tame edge transients; cap padlen for short inputs
    padlen = min(3 * (2 * sos.shape[0] + 1), ts.samples.size - 1)
    out = spsig.sosfiltfilt(sos, ts.samples, padtype="even", padlen=padlen)
    meta = dict(ts.meta)
    meta["band_hz"] = (lo_hz, hi_hz)
    return TimeSeries(out, ts.rate_hz, meta)


def bandpass_response(lo_hz: float, hi_hz: float, rate_hz: float,
                      freqs_hz: np.ndarray) -> np.ndarray:
    """Magnitude response of the zero-phase filter at the given frequencies.

    Forward-backward application squares the one-pass magnitude.
    """
    sos = _design_sos(lo_hz, hi_hz, rate_hz)
    w = 2.0 * np.pi * np.asarray(freqs_hz, dtype=np.float64) / rate_hz
    _, h = spsig.sosfreqz(sos, worN=w)
    return np.abs(h) ** 2


def band_decompose(ts: TimeSeries, bands: dict[str, tuple[float, float]] | None = None) -> BandSet:
    """Split a series into theta/alpha/beta/gamma via the module band table."""
    if ts.rate_hz < 100:
        raise ParameterError("band_decompose needs rate_hz >= 100 "
                             "(gamma upper edge must clear Nyquist)")
    table = DEFAULT_BANDS if bands is None else bands
    missing = [b for b in BAND_ORDER if b not in table]
    if missing:
        raise ParameterError(f"band table missing entries: {missing}")
    out = {}
    for name in BAND_ORDER:
        lo, hi = table[name]
        bts = bandpass(ts, lo, hi)
        bts.meta["band"] = name
        out[name] = bts
    return BandSet(**out)


def segment(ts: TimeSeries, window_s: float, overlap_frac: float) -> list[Segment]:
    """Slice a series into sliding windows.

    window_len = round(window_s * rate_hz), stride = round(window_len * (1 - overlap)),
    count = floor((w - window_len) / stride) + 1. Windows come back in temporal order.
    """
    if not (0.0 <= overlap_frac < 1.0):
        raise ParameterError("overlap_frac must be in [0, 1)")
    if window_s <= 0:
        raise ParameterError("window_s must be positive")
    w = ts.samples.size
    window_len = _round_half_up(window_s * ts.rate_hz)
    if window_len < 2:
        raise ParameterError("window too short at this rate")
    if window_len > w:
        raise EmptyResultError(
            f"window of {window_len} samples does not fit series of {w}")
    stride = max(1, _round_half_up(window_len * (1.0 - overlap_frac)))
    count = (w - window_len) // stride + 1
    band = ts.meta.get("band", "raw")
    segs = []
    for i in range(count):
        s = i * stride
        segs.append(Segment(
            band=band,
            samples=ts.samples[s:s + window_len].copy(),
            start_index=s,
            window_len=window_len,
            meta=dict(ts.meta, segment_index=i),
        ))
    return segs


def zscore_segment(seg: Segment) -> Segment:
    """Optional per-segment standardization (off by default in the pipeline)."""
    sd = seg.samples.std()
    if sd == 0:
        raise DegenerateInputError("cannot z-score a constant segment")
    return replace(seg, samples=(seg.samples - seg.samples.mean()) / sd)


# ---------------------------------------------------------------------------
# synthesis

_LORENZ_SIGMA = 10.0
_LORENZ_RHO = 28.0
_LORENZ_BETA = 8.0 / 3.0


def _lorenz_rk4(n_steps: int, dt: float, x0: float, y0: float, z0: float,
                sigma: float, rho: float, beta: float) -> np.ndarray:
    def deriv(s):
        x, y, z = s
        return np.array([sigma * (y - x), x * (rho - z) - y, x * y - beta * z])

    state = np.array([x0, y0, z0], dtype=np.float64)
    out = np.empty(n_steps, dtype=np.float64)
    for i in range(n_steps):
        out[i] = state[0]
        k1 = deriv(state)
        k2 = deriv(state + 0.5 * dt * k1)
        k3 = deriv(state + 0.5 * dt * k2)
        k4 = deriv(state + dt * k3)
        state = state + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return out


def synth(kind: str, params: dict | None = None, seed: int | None = None) -> TimeSeries:
    """Generate a deterministic synthetic series.

    Kinds: sine, noisy_sine, white_noise, lorenz_x. All stochastic kinds
    draw from a generator seeded with `seed`.

    Parameters by kind (defaults in parentheses):
      sine / noisy_sine: freq_hz (10), rate_hz (128), n (128), amplitude (1),
        phase (0); noisy_sine adds noise_sigma (0.1) Gaussian noise
      white_noise: rate_hz (128), n (128), sigma (1)
      lorenz_x: n (5000), dt (0.01), x0/y0/z0 (1), burn_in (0)
    """
    p = dict(params or {})

    def take(name, default):
        return p.pop(name, default)

    if kind in ("sine", "noisy_sine"):
        freq = float(take("freq_hz", 10.0))
        rate = float(take("rate_hz", 128.0))
        n = int(take("n", 128))
        amp = float(take("amplitude", 1.0))
        phase = float(take("phase", 0.0))
        sigma = float(take("noise_sigma", 0.1)) if kind == "noisy_sine" else 0.0
        if p:
            raise ParameterError(f"unknown synth params: {sorted(p)}")
        if not (0 < freq < rate / 2):
            raise ParameterError("freq_hz must lie below Nyquist")
        if n < 2:
            raise ParameterError("n must be >= 2")
        k = np.arange(n, dtype=np.float64)
        x = amp * np.sin(2.0 * np.pi * freq * k / rate + phase)
        if sigma > 0:
            rng = np.random.default_rng(seed)
            x = x + sigma * rng.standard_normal(n)
        return TimeSeries(x, rate, {"kind": kind, "freq_hz": freq})

    if kind == "white_noise":
        rate = float(take("rate_hz", 128.0))
        n = int(take("n", 128))
        sigma = float(take("sigma", 1.0))
        if p:
            raise ParameterError(f"unknown synth params: {sorted(p)}")
        if n < 2 or sigma <= 0 or rate <= 0:
            raise ParameterError("white_noise needs n >= 2, sigma > 0, rate > 0")
        rng = np.random.default_rng(seed)
        return TimeSeries(sigma * rng.standard_normal(n), rate, {"kind": kind})

    if kind == "lorenz_x":
        n = int(take("n", 5000))
        dt = float(take("dt", 0.01))
        x0 = float(take("x0", 1.0))
        y0 = float(take("y0", 1.0))
        z0 = float(take("z0", 1.0))
        burn = int(take("burn_in", 0))
        if p:
            raise ParameterError(f"unknown synth params: {sorted(p)}")
        if n < 2 or dt <= 0 or burn < 0:
            raise ParameterError("lorenz_x needs n >= 2, dt > 0, burn_in >= 0")
        x = _lorenz_rk4(n + burn, dt, x0, y0, z0,
                        _LORENZ_SIGMA, _LORENZ_RHO, _LORENZ_BETA)[burn:]
        return TimeSeries(x, 1.0 / dt, {"kind": kind, "dt": dt})

    raise ParameterError(f"unknown synth kind: {kind!r}")


def phase_surrogate(ts: TimeSeries, seed: int | None = None,
                    smooth_bw_hz: float = 2.0) -> TimeSeries:
    """Phase-randomized surrogate matching the smoothed power spectrum.

    The spectrum is smoothed with a boxcar of the given bandwidth before
    phases are redrawn, so narrow spectral lines spread into bands; the
    surrogate then decorrelates within a window instead of reproducing the
    original oscillation. Output is rescaled to the input's mean/std.
    """
    x = ts.samples
    n = x.size
    X = np.fft.rfft(x - x.mean())
    power = np.abs(X) ** 2
    df = ts.rate_hz / n
    width = max(1, _round_half_up(smooth_bw_hz / df))
    if width > 1:
        kernel = np.ones(width) / width
        power = np.convolve(power, kernel, mode="same")
    amp = np.sqrt(power)
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, amp.size)
    phases[0] = 0.0
    if n % 2 == 0:
        phases[-1] = 0.0  # Nyquist bin must stay real
    y = np.fft.irfft(amp * np.exp(1j * phases), n=n)
    sd = y.std()
    if sd == 0:
        raise DegenerateInputError("surrogate collapsed to a constant")
    y = (y - y.mean()) / sd * x.std() + x.mean()
    meta = dict(ts.meta)
    meta["kind"] = "surrogate"
    return TimeSeries(y, ts.rate_hz, meta)
