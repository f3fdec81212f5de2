"""Sampled-waveform substrate: energy, PAPR, spectra, tapers, Doppler scaling.

Waveforms are complex analytic signals carried at passband; the real
transmitted signal Re{s(t)} is materialized only inside papr().
"""

from __future__ import annotations

import base64
import io
import json
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.signal import windows

ZERO_START = "zero_start"
CENTERED = "centered"


def default_sample_rate(carrier: float, sweep: float = 0.0) -> float:
    """Default sampling rate 8*(f_c + sweep/2): keeps the real passband signal
    well oversampled for PAPR and broadband resampling."""
    return 8.0 * (carrier + sweep / 2.0)


def time_axis(n: int, sample_rate: float, origin: str, duration: float) -> np.ndarray:
    """Sample instants for the given origin convention.

    Centered waveforms sample at midpoints (k + 1/2)/fs - T/2, a grid exactly
    symmetric about zero so odd-moment integrals of even-symmetric signals
    cancel pairwise.
    """
    if origin == CENTERED:
        return (np.arange(n) + 0.5) / sample_rate - duration / 2.0
    return np.arange(n) / sample_rate


@dataclass(frozen=True)
class TaperSpec:
    """Amplitude tapering window.

    kind: rectangular | tukey | hanning | kaiser.  ``shape`` is the Tukey
    tapered fraction alpha_T in [0, 1] or the Kaiser parameter alpha_K >= 0;
    ignored for the other kinds.
    """

    kind: str = "rectangular"
    shape: float = 0.0

    def __post_init__(self):
        if self.kind not in ("rectangular", "tukey", "hanning", "kaiser"):
            raise ValueError(f"unknown taper kind {self.kind!r}")
        if self.kind == "tukey" and not (0.0 <= self.shape <= 1.0):
            raise ValueError("tukey shape must be in [0, 1]")
        if self.kind == "kaiser" and self.shape < 0.0:
            raise ValueError("kaiser shape must be >= 0")

    def window(self, n: int) -> np.ndarray:
        if self.kind == "rectangular":
            return np.ones(n)
        if self.kind == "tukey":
            return windows.tukey(n, alpha=self.shape)
        if self.kind == "hanning":
            return windows.hann(n)
        return windows.kaiser(n, beta=self.shape)


@dataclass(frozen=True)
class Waveform:
    """Complex analytic signal with its sampling metadata.

    time_origin selects the time axis: ``zero_start`` samples t in [0, T),
    ``centered`` samples t in [-T/2, T/2).
    """

    samples: np.ndarray
    sample_rate: float
    duration: float
    carrier: float
    time_origin: str = ZERO_START
    label: str = ""

    def __post_init__(self):
        s = np.ascontiguousarray(np.asarray(self.samples, dtype=complex))
        if s.ndim != 1 or s.size < 2:
            raise ValueError("waveform needs a 1-D sample array of length >= 2")
        if not np.all(np.isfinite(s)):
            raise ValueError("waveform samples must be finite")
        if self.time_origin not in (ZERO_START, CENTERED):
            raise ValueError(f"unknown time origin {self.time_origin!r}")
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    def times(self) -> np.ndarray:
        return time_axis(self.n, self.sample_rate, self.time_origin, self.duration)

    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2)) / self.sample_rate

    def baseband(self) -> np.ndarray:
        """Complex envelope with the carrier mixed off (exact, no filtering)."""
        return self.samples * np.exp(-2j * np.pi * self.carrier * self.times())

    def with_samples(self, samples: np.ndarray, **meta) -> "Waveform":
        kw = dict(
            sample_rate=self.sample_rate,
            duration=self.duration,
            carrier=self.carrier,
            time_origin=self.time_origin,
            label=self.label,
        )
        kw.update(meta)
        return Waveform(samples=samples, **kw)


def normalize_energy(w: Waveform) -> Waveform:
    """Scale to unit energy under the discrete integral sum|s|^2 * dt."""
    e = w.energy()
    if e <= 0.0:
        raise ValueError("cannot normalize an all-zero waveform")
    return w.with_samples(w.samples / np.sqrt(e))


def occupied_band(w: Waveform, fraction: float = 0.999) -> Tuple[float, float]:
    """Smallest frequency interval about the spectral centroid holding the
    requested energy fraction."""
    f, dens = spectrum(w)
    total = np.trapezoid(dens, f)
    centroid = np.trapezoid(f * dens, f) / total
    cum = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) / 2 * np.diff(f))])

    def contained(half):
        lo, hi = centroid - half, centroid + half
        return (np.interp(hi, f, cum) - np.interp(lo, f, cum)) / total

    lo_h, hi_h = 0.0, (f[-1] - f[0]) / 2
    for _ in range(60):
        mid = 0.5 * (lo_h + hi_h)
        if contained(mid) >= fraction:
            hi_h = mid
        else:
            lo_h = mid
    return centroid - hi_h, centroid + hi_h


def papr(w: Waveform) -> float:
    """Peak-to-average power ratio of the real transmitted signal, in dB."""
    lo, hi = occupied_band(w, 0.99)
    if w.sample_rate < 4.0 * max(abs(lo), abs(hi)):
        raise ValueError(
            "sample rate too low to represent the real passband signal "
            f"(need >= {4.0 * max(abs(lo), abs(hi)):.1f} Hz)"
        )
    x = np.real(w.samples)
    peak = float(np.max(x**2))
    avg = float(np.mean(x**2))
    return 10.0 * np.log10(peak / avg)


def spectrum(w: Waveform, pad_factor: int = 4) -> Tuple[np.ndarray, np.ndarray]:
    """Energy density |S(f)|^2 on a uniform grid; integrates to the energy."""
    n = w.n * max(1, pad_factor)
    spec = np.fft.fftshift(np.fft.fft(w.samples, n)) * w.dt
    f = np.fft.fftshift(np.fft.fftfreq(n, d=w.dt))
    return f, np.abs(spec) ** 2


def spectral_containment(w: Waveform, band_center: float, band_width: float) -> float:
    """In-band energy fraction psi over [center - width/2, center + width/2]."""
    if band_width <= 0.0:
        raise ValueError("band width must be positive")
    lo = band_center - band_width / 2.0
    hi = band_center + band_width / 2.0
    nyq = w.sample_rate / 2.0
    if lo < -nyq or hi > nyq:
        raise ValueError("containment band extends beyond the Nyquist range")
    f, dens = spectrum(w)
    cum = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) / 2 * np.diff(f))])
    total = cum[-1]
    return float((np.interp(hi, f, cum) - np.interp(lo, f, cum)) / total)


def percent_bandwidth(w: Waveform, p: float) -> float:
    """Smallest band centered on the carrier with containment >= p, by bisection."""
    if not (0.0 < p < 1.0):
        raise ValueError("p must be in (0, 1)")
    nyq = w.sample_rate / 2.0
    max_width = 2.0 * min(nyq - w.carrier, nyq + w.carrier)
    if spectral_containment(w, w.carrier, max_width) < p:
        raise ValueError(f"containment {p} not reachable within the Nyquist band")
    lo, hi = 0.0, max_width
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mid == 0.0 or spectral_containment(w, w.carrier, mid) >= p:
            hi = mid
        else:
            lo = mid
    return hi


def sinc_interp(
    x: np.ndarray, positions: np.ndarray, taps: int = 16, beta: float = 8.0
) -> np.ndarray:
    """Kaiser-windowed sinc interpolation of x at fractional sample positions.

    Samples outside the support are treated as zero (pulse semantics).
    taps=16 keeps band-limited fidelity for the oversampling ratios used here;
    integer positions reproduce the input exactly.
    """
    x = np.asarray(x)
    positions = np.asarray(positions, dtype=float)
    n0 = np.floor(positions).astype(int)
    frac = positions - n0
    half = taps // 2
    offsets = np.arange(-half + 1, half + 1)
    idx = n0[:, None] + offsets[None, :]
    valid = (idx >= 0) & (idx < x.size)
    dist = frac[:, None] - offsets[None, :]
    u = dist / half
    inside = np.abs(u) <= 1.0
    win = np.where(inside, np.i0(beta * np.sqrt(np.clip(1.0 - u**2, 0.0, 1.0))), 0.0)
    win /= np.i0(beta)
    kern = np.sinc(dist) * win
    vals = np.where(valid, x[np.clip(idx, 0, x.size - 1)], 0.0)
    return (vals * kern).sum(axis=1)


def doppler_scale(w: Waveform, eta: float) -> Waveform:
    """Time-scaled copy sqrt(eta) * s(eta t): duration T/eta, energy preserved."""
    if eta <= 0.0:
        raise ValueError("Doppler scale eta must be positive")
    n_out = int(round(w.n / eta))
    positions = eta * np.arange(n_out)
    y = np.sqrt(eta) * sinc_interp(w.samples, positions)
    return w.with_samples(y, duration=w.duration / eta)


def apply_taper(
    w: Waveform, taper: TaperSpec, domain: str = "time", span_factor: float = 1.0
) -> Waveform:
    """Multiply by the window in the stated domain.

    Frequency-domain tapering is applied symmetrically about the spectral
    centroid with the window spanning span_factor times the occupied 99.9%
    band (bins outside the window support are zeroed); rectangular tapering
    is the identity in either domain.
    """
    if domain not in ("time", "frequency"):
        raise ValueError("domain must be 'time' or 'frequency'")
    if taper.kind == "rectangular":
        return w
    if domain == "time":
        return w.with_samples(w.samples * taper.window(w.n))
    lo, hi = occupied_band(w, 0.999)
    centroid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
    lo, hi = centroid - span_factor * half, centroid + span_factor * half
    spec = np.fft.fft(w.samples)
    f = np.fft.fftfreq(w.n, d=w.dt)
    wgt = np.zeros(w.n)
    inband = (f >= lo) & (f <= hi)
    pos = (f[inband] - lo) / (hi - lo)
    fine = taper.window(4097)
    wgt[inband] = np.interp(pos, np.linspace(0.0, 1.0, fine.size), fine)
    return w.with_samples(np.fft.ifft(spec * wgt))


# --------------------------------------------------------------------------
# serialization


def to_json(w: Waveform) -> str:
    """JSON header + base64 interleaved re/im float64 payload."""
    inter = np.empty(2 * w.n)
    inter[0::2] = w.samples.real
    inter[1::2] = w.samples.imag
    return json.dumps(
        {
            "label": w.label,
            "duration": w.duration,
            "carrier": w.carrier,
            "sample_rate": w.sample_rate,
            "time_origin": w.time_origin,
            "encoding": "base64/float64-interleaved",
            "data": base64.b64encode(inter.tobytes()).decode("ascii"),
        }
    )


def from_json(text: str) -> Waveform:
    doc = json.loads(text)
    raw = np.frombuffer(base64.b64decode(doc["data"]), dtype=np.float64)
    samples = raw[0::2] + 1j * raw[1::2]
    return Waveform(
        samples=samples,
        sample_rate=doc["sample_rate"],
        duration=doc["duration"],
        carrier=doc["carrier"],
        time_origin=doc.get("time_origin", ZERO_START),
        label=doc.get("label", ""),
    )


def to_csv(w: Waveform) -> str:
    buf = io.StringIO()
    buf.write("t_s,re,im\n")
    for t, s in zip(w.times(), w.samples):
        buf.write(f"{t:.9g},{s.real:.9g},{s.imag:.9g}\n")
    return buf.getvalue()
