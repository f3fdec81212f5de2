"""Ambiguity surfaces: numeric broadband/narrowband auto- and cross-AFs,
Q-functions, pulse-train composites, and the Bessel/GBF series forms of the
SFM and GSFM for cross-validation.

The numeric engine works on complex envelopes: mixing the carrier off and
band-limited decimation are exact reformulations of Eq-level definitions, so
the per-Doppler-row work is one windowed-sinc resample plus one FFT
correlation sweep over all delays.
"""

from __future__ import annotations

import base64
import io
import json
from dataclasses import dataclass, replace
from typing import Sequence, Tuple

import numpy as np

from . import specfun
from .sigcore import Waveform, sinc_interp
from .wavegen import (
    EVEN,
    GSFI,
    NONSYMMETRIC,
    GsfmParams,
    SfmParams,
    gsfm_fourier_coeffs,
)

SOUND_SPEED = 1500.0
BROADBAND = "broadband"
NARROWBAND = "narrowband"


def velocity_to_eta(v: np.ndarray | float, c: float = SOUND_SPEED) -> np.ndarray:
    """Broadband Doppler scale (1 + v/c) / (1 - v/c) for closing speed v."""
    v = np.asarray(v, dtype=float)
    return (1.0 + v / c) / (1.0 - v / c)


def velocity_to_phi(
    v: np.ndarray | float, carrier: float, c: float = SOUND_SPEED
) -> np.ndarray:
    """Narrowband Doppler shift (2 v / c) f_c."""
    return (2.0 * np.asarray(v, dtype=float) / c) * carrier


def default_velocities(
    v_max: float = 20.0, step: float = 0.25
) -> np.ndarray:
    n = int(round(v_max / step))
    return np.arange(-n, n + 1) * step


@dataclass(frozen=True)
class AmbiguitySurface:
    """|chi| magnitude over (doppler, delay); rows follow the doppler grid."""

    delay: np.ndarray
    velocity: np.ndarray
    doppler: np.ndarray  # eta (broadband) or phi in Hz (narrowband)
    mag: np.ndarray
    model: str
    auto: bool
    c: float = SOUND_SPEED
    label: str = ""

    def __post_init__(self):
        mag = np.asarray(self.mag, dtype=float)
        if mag.shape != (len(self.velocity), len(self.delay)):
            raise ValueError("magnitude matrix must be (doppler, delay)")
        if np.any(np.diff(self.delay) <= 0) or (
            len(self.velocity) > 1 and np.any(np.diff(self.velocity) <= 0)
        ):
            raise ValueError("surface grids must be strictly increasing")
        object.__setattr__(self, "mag", mag)

    def db(self, floor: float = -120.0) -> np.ndarray:
        ref = self.mag.max()
        return 20.0 * np.log10(np.maximum(self.mag / ref, 10 ** (floor / 20.0)))

    def row(self, v: float) -> np.ndarray:
        idx = int(np.argmin(np.abs(self.velocity - v)))
        return self.mag[idx]


# --------------------------------------------------------------------------
# numeric engine


def _envelope(w: Waveform, f_ref: float) -> np.ndarray:
    """Envelope relative to a caller-chosen reference carrier, starting at a
    zero-based time axis (a common shift leaves |chi| untouched)."""
    t = np.arange(w.n) / w.sample_rate
    return w.samples * np.exp(-2j * np.pi * f_ref * t)


def _decimate_bandlimited(u: np.ndarray, fs: float, target_fs: float):
    """Exact spectral decimation of an already narrowband envelope."""
    n = u.size
    n_new = int(np.ceil(n * target_fs / fs))
    n_new = min(n, max(n_new, 64))
    if n_new == n:
        return u.copy(), fs
    spec = np.fft.fft(u)
    h = (n_new + 1) // 2
    kept = np.concatenate([spec[:h], spec[n - (n_new - h):]])
    y = np.fft.ifft(kept) * (n_new / n)
    return y, fs * n_new / n


def _envelope_pair(w1: Waveform, w2: Waveform, v_max: float, c: float):
    """Common-rate envelopes for the correlation engine."""
    if abs(w1.sample_rate - w2.sample_rate) > 1e-9 * w1.sample_rate:
        raise ValueError("xaf needs equal sample rates")
    f_ref = w1.carrier
    u1 = _envelope(w1, f_ref)
    u2 = _envelope(w2, f_ref)
    fs = w1.sample_rate
    # occupied width about zero, padded for Doppler shifts and sinc skirts
    half = 0.0
    for u, w in ((u1, w1), (u2, w2)):
        f = np.fft.fftfreq(4 * u.size, d=1.0 / fs)
        dens = np.abs(np.fft.fft(u, 4 * u.size)) ** 2
        order = np.argsort(f)
        f_sorted, d_sorted = f[order], dens[order]
        cum = np.cumsum(d_sorted)
        cum /= cum[-1]
        lo = f_sorted[np.searchsorted(cum, 5e-6)]
        hi = f_sorted[min(np.searchsorted(cum, 1.0 - 5e-6), f_sorted.size - 1)]
        half = max(half, abs(lo), abs(hi))
    eta_pad = abs(velocity_to_eta(v_max, c) - 1.0)
    half += f_ref * eta_pad + 4.0 / min(w1.duration, w2.duration)
    target = max(8.0 * half, 64.0 / min(w1.duration, w2.duration))
    u1d, fs1 = _decimate_bandlimited(u1, fs, target)
    u2d, _ = _decimate_bandlimited(u2, fs, target)
    # keep unit-energy semantics exact after the (tiny) out-of-band loss
    dt = 1.0 / fs1
    for arr in (u1d, u2d):
        e = np.sum(np.abs(arr) ** 2) * dt
        arr *= 1.0 / np.sqrt(e)
    return u1d, u2d, fs1, f_ref


def _corr_all_lags(v1: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """C(j) = sum_k v1[k] conj(y[k + j]) for all feasible integer lags."""
    n1, n2 = v1.size, y.size
    L = 1 << int(np.ceil(np.log2(n1 + n2)))
    d = np.fft.ifft(np.fft.fft(v1, L) * np.conj(np.fft.fft(y, L)))
    lags = np.arange(-(n2 - 1), n1)
    return lags, d[(-lags) % L]


def _xaf_complex(
    w1: Waveform,
    w2: Waveform,
    model: str,
    velocities: np.ndarray,
    c: float,
    max_delay: float | None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Complex chi(tau, doppler) rows with the carrier phase reattached.

    Each pulse is referenced to its own start (delays measure pulse-start
    offsets), which is the convention every train-level consumer builds on.
    """
    v_abs = float(np.max(np.abs(velocities))) if velocities.size else 0.0
    eta_extreme = velocity_to_eta(v_abs, c)
    if model == BROADBAND and not (0.8 <= 1.0 / eta_extreme <= 1.25):
        raise ValueError("velocity grid outside the resampler's validity range")
    u1, u2, fs_env, f_ref = _envelope_pair(w1, w2, v_abs, c)
    dt = 1.0 / fs_env
    t1 = np.arange(u1.size) * dt
    span = max_delay if max_delay is not None else min(w1.duration, w2.duration)
    # Row v answers: where does the bank respond to a *closing-v* echo?  In
    # the replica-scale integral that means scale 1/eta(v); the printed
    # narrowband shift +phi(v) then emerges in the |v|/c -> 0 limit with the
    # same sign (the two textbook forms orient Doppler oppositely).
    etas = 1.0 / velocity_to_eta(velocities, c) if velocities.size else np.ones(1)
    n_out = int(np.ceil(u2.size / min(float(np.min(etas)), 1.0))) + 1
    rows = []
    delays = None
    for iv, v in enumerate(velocities):
        if model == BROADBAND:
            eta = float(etas[iv])
            y = np.sqrt(eta) * sinc_interp(u2, eta * np.arange(n_out))
            v1 = u1 * np.exp(-2j * np.pi * f_ref * (eta - 1.0) * t1)
        else:
            eta = 1.0
            phi = float(velocity_to_phi(v, f_ref, c))
            y = u2
            v1 = u1 * np.exp(2j * np.pi * phi * t1)
        lags, corr = _corr_all_lags(v1, y)
        delays = lags * dt
        rows.append(corr * dt * np.exp(-2j * np.pi * f_ref * eta * delays))
    chi = np.vstack(rows)
    keep = np.abs(delays) <= span + dt / 2
    return delays[keep], chi[:, keep]


def xaf(
    w1: Waveform,
    w2: Waveform,
    model: str = BROADBAND,
    velocities: np.ndarray | None = None,
    c: float = SOUND_SPEED,
    max_delay: float | None = None,
) -> AmbiguitySurface:
    """Cross-ambiguity |chi| of w1 against Doppler-transformed copies of w2.

    Broadband rows evaluate sqrt(eta) * integral s1(t) s2*(eta (t + tau)) dt;
    narrowband rows use the frequency-shift model.  w1 == w2 yields the auto
    surface with peak 1 at (tau=0, v=0).
    """
    if model not in (BROADBAND, NARROWBAND):
        raise ValueError(f"unknown AF model {model!r}")
    velocities = default_velocities() if velocities is None else np.asarray(velocities, float)
    delays, chi = _xaf_complex(w1, w2, model, velocities, c, max_delay)
    doppler = (
        velocity_to_eta(velocities, c)
        if model == BROADBAND
        else velocity_to_phi(velocities, w1.carrier, c)
    )
    auto = w1 is w2 or (
        w1.n == w2.n and np.array_equal(w1.samples, w2.samples)
    )
    return AmbiguitySurface(
        delay=delays,
        velocity=velocities,
        doppler=doppler,
        mag=np.abs(chi),
        model=model,
        auto=auto,
        c=c,
        label=f"{w1.label}|{w2.label}",
    )


def qfunction(
    surface: AmbiguitySurface, delay_extent: float | None = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Q(doppler) = integral of |chi|^2 over delay, in dB.

    Requires an auto surface whose delay grid spans the full pulse; the
    trapezoid rule is applied along each doppler row.
    """
    if not surface.auto:
        raise ValueError("the Q-function is defined for auto surfaces")
    mask = (
        np.abs(surface.delay) <= delay_extent
        if delay_extent is not None
        else np.ones(surface.delay.size, bool)
    )
    q = np.trapezoid(surface.mag[:, mask] ** 2, surface.delay[mask], axis=1)
    return surface.velocity.copy(), 10.0 * np.log10(q)


# --------------------------------------------------------------------------
# analytic series forms


def _sinc(x: np.ndarray) -> np.ndarray:
    """sin(x)/x with the removable singularity filled."""
    return np.sinc(x / np.pi)


def sfm_af_analytic(
    p: SfmParams,
    model: str = NARROWBAND,
    delays: np.ndarray | None = None,
    velocities: np.ndarray | None = None,
    c: float = SOUND_SPEED,
) -> AmbiguitySurface:
    """Bessel-sinc series of the SFM auto-AF.

    The narrowband series is exact (Jacobi-Anger plus a finite overlap
    integral, no dropped terms); the broadband series carries the slow-time
    approximation of the Bessel argument, valid for |v|/c <~ 1/100.
    """
    T, fm, fc = p.duration, p.mod_freq, p.carrier
    beta = p.mod_index
    velocities = default_velocities() if velocities is None else np.asarray(velocities, float)
    if delays is None:
        delays = np.linspace(-T, T, 801)
    delays = np.asarray(delays, float)
    n_max = int(np.ceil(2.0 * beta + 20.0))
    n = np.arange(-n_max, n_max + 1)
    jn_phase = 1j**n
    mag = np.zeros((velocities.size, delays.size))
    for it, tau in enumerate(delays):
        L = T - abs(tau)
        if L <= 0.0:
            continue
        if model == NARROWBAND:
            z = 2.0 * beta * np.sin(-np.pi * fm * tau)
            bes = specfun.bessel_j(n, z)
            pre = jn_phase * bes * np.exp(1j * np.pi * fm * n * tau)
            phi = velocity_to_phi(velocities, fc, c)
            arg = np.pi * (fm * n[None, :] + phi[:, None])
            series = pre[None, :] * np.exp(1j * arg * (T - tau)) * _sinc(arg * L)
            mag[:, it] = np.abs(series.sum(axis=1)) * L / T
        else:
            eta = 1.0 / velocity_to_eta(velocities, c)
            z = 2.0 * beta * np.sin(-np.pi * fm * eta * tau)
            bes = specfun.bessel_j(n[None, :], z[:, None])
            omega = (eta[:, None] - 1.0) * fc - fm * n[None, :] * (1.0 + eta[:, None]) / 2.0
            pre = (
                jn_phase[None, :]
                * bes
                * np.exp(1j * np.pi * fm * eta[:, None] * n[None, :] * tau)
                * np.exp(-1j * np.pi * omega * (T - tau))
            )
            series = pre * _sinc(np.pi * omega * L)
            mag[:, it] = np.sqrt(eta) * np.abs(series.sum(axis=1)) * L / T
    doppler = (
        velocity_to_eta(velocities, c)
        if model == BROADBAND
        else velocity_to_phi(velocities, fc, c)
    )
    return AmbiguitySurface(
        delay=delays,
        velocity=velocities,
        doppler=doppler,
        mag=mag,
        model=model,
        auto=True,
        c=c,
        label=f"sfm-analytic-{model}",
    )


def _gsfm_recentred_coeffs(p: GsfmParams, n_harmonics: int):
    """Fourier coefficients of the IF, re-centred onto [0, T].

    The even-symmetric case shifts onto the nonsymmetric axis, which flips
    alternate cosine coefficients; this subsumes the even case in the
    real-argument mixed-type GBF form.
    """
    a0, am, bm = gsfm_fourier_coeffs(p, n_harmonics)
    if p.symmetry == EVEN:
        signs = (-1.0) ** np.arange(1, n_harmonics + 1)
        am = am * signs
        bm = np.zeros_like(am)
    return a0, am, bm


def _gsfm_harmonic_count(p: GsfmParams) -> int:
    return int(np.ceil(4.0 * p.cycles * p.rho + 24.0))


def _gbf_rows_batched(am_t, bm_t, A, T, scaled_delays, block: int = 64):
    """Mixed-type GBF coefficient rows for a batch of delays.

    The GBF arguments at delay tau are (2 A b~_m sin(-pi m tau / T),
    -2 A a~_m sin(-pi m tau / T)); all delays in a block share one FFT grid
    sized for the worst-row harmonic rate.  Yields (slice, orders, coeffs)
    with coeffs of shape (block, n_orders).
    """
    am_t = np.asarray(am_t, float)
    bm_t = np.asarray(bm_t, float)
    m = np.arange(1, am_t.size + 1)
    scaled = np.asarray(scaled_delays, float)
    # worst-case harmonic rate over all delays: |sin| <= 1
    probe = specfun.GbfArgs(2 * A * np.abs(bm_t) + 1e-300, 2 * A * np.abs(am_t))
    n_grid = specfun.gbf_grid_size(probe)
    theta = np.arange(n_grid) / n_grid
    sin_basis = np.sin(2 * np.pi * m[:, None] * theta[None, :])
    cos_basis = np.cos(2 * np.pi * m[:, None] * theta[None, :])
    orders_full = np.fft.fftfreq(n_grid, d=1.0 / n_grid).astype(int)
    rate = float(np.sum(m * 2 * A * (np.abs(am_t) + np.abs(bm_t))))
    n_keep = min(n_grid // 2 - 1, int(rate + 16 * (1 + rate) ** (1 / 3) + 48))
    keep = np.abs(orders_full) <= n_keep
    for start in range(0, scaled.size, block):
        sl = slice(start, min(start + block, scaled.size))
        s_tau = np.sin(-np.pi * np.outer(scaled[sl], m) / T)  # (rows, M)
        sine_args = 2 * A * s_tau * bm_t[None, :]
        cos_args = -2 * A * s_tau * am_t[None, :]
        phase = sine_args @ sin_basis - cos_args @ cos_basis
        coeffs = np.fft.fft(np.exp(1j * phase), axis=1) / n_grid
        coeffs = coeffs[:, keep]
        # orders that matter for *this* block of delays only
        live = np.abs(coeffs).max(axis=0) > 1e-11
        yield sl, orders_full[keep][live], coeffs[:, live]


def gsfm_analytic_spectrum(
    p: GsfmParams, freqs: np.ndarray, n_harmonics: int | None = None
) -> np.ndarray:
    """GBF-sinc series of |S(f)|, including the a0 spectral-centroid shift."""
    T, df, fc = p.duration, p.sweep, p.carrier
    M = n_harmonics or _gsfm_harmonic_count(p)
    a0, am, bm = _gsfm_recentred_coeffs(p, M)
    m = np.arange(1, M + 1)
    A = df * T / 2.0
    args = specfun.truncate_harmonics(A * am / m, A * bm / m)
    orders, coeffs = specfun.gbf_mixed_all(args)
    keep = np.abs(coeffs) > 1e-12
    orders, coeffs = orders[keep], coeffs[keep]
    f0 = fc + a0 * df / 4.0
    arg = np.pi * T * (np.asarray(freqs, float)[:, None] - f0 - orders[None, :] / T)
    series = ((-1.0) ** orders)[None, :] * coeffs[None, :] * _sinc(arg)
    return np.sqrt(T) * np.abs(series.sum(axis=1))


def gsfm_af_analytic(
    p: GsfmParams,
    model: str = NARROWBAND,
    delays: np.ndarray | None = None,
    velocities: np.ndarray | None = None,
    c: float = SOUND_SPEED,
    n_harmonics: int | None = None,
) -> AmbiguitySurface:
    """Mixed-type GBF series of the GSFM auto-AF.

    Slot pairing of the GBF arguments (sine slot from the b coefficients,
    cosine slot from the a coefficients, both scaled by sin(pi m tau / T))
    follows the sum-to-product expansion and is validated against the numeric
    oracle.  rho = 1 collapses to the SFM Bessel series.
    """
    T, df, fc = p.duration, p.sweep, p.carrier
    velocities = default_velocities() if velocities is None else np.asarray(velocities, float)
    if delays is None:
        delays = np.linspace(-T, T, 801)
    delays = np.asarray(delays, float)
    M = n_harmonics or _gsfm_harmonic_count(p)
    a0, am, bm = _gsfm_recentred_coeffs(p, M)
    m = np.arange(1, M + 1)
    am_t, bm_t = am / m, bm / m  # tilde coefficients
    A = df * T / 2.0
    mag = np.zeros((velocities.size, delays.size))
    eta = 1.0 / velocity_to_eta(velocities, c)  # replica-scale rows, see xaf
    phi = velocity_to_phi(velocities, fc, c)
    f0 = fc + a0 * df / 4.0
    if model == NARROWBAND:
        for sl, orders, coeffs in _gbf_rows_batched(am_t, bm_t, A, T, delays):
            tau = delays[sl]
            L = np.maximum(T - np.abs(tau), 0.0)
            pre = coeffs * np.exp(1j * np.pi * orders[None, :] * tau[:, None] / T)
            arg = np.pi * (orders[None, None, :] / T + phi[:, None, None])
            series = (
                pre[None, :, :]
                * np.exp(1j * arg * (T - tau)[None, :, None])
                * _sinc(arg * L[None, :, None])
            )
            mag[:, sl] = np.abs(series.sum(axis=2)) * L[None, :] / T
    else:
        for iv, e in enumerate(eta):
            for sl, orders, coeffs in _gbf_rows_batched(am_t, bm_t, A, T, e * delays):
                tau = delays[sl]
                L = np.maximum(T - np.abs(tau), 0.0)
                omega = (e - 1.0) * f0 - (1.0 + e) * orders[None, :] / (2.0 * T)
                series = (
                    coeffs
                    * np.exp(1j * np.pi * e * orders[None, :] * tau[:, None] / T)
                    * np.exp(-1j * np.pi * omega * (T - tau)[:, None])
                    * _sinc(np.pi * omega * L[:, None])
                )
                mag[iv, sl] = np.sqrt(e) * np.abs(series.sum(axis=1)) * L / T
    doppler = eta if model == BROADBAND else phi
    return AmbiguitySurface(
        delay=delays,
        velocity=velocities,
        doppler=doppler,
        mag=mag,
        model=model,
        auto=True,
        c=c,
        label=f"gsfm-analytic-{model}",
    )


def gsfm_analytic(
    p: GsfmParams,
    which: str,
    grids: dict | None = None,
    c: float = SOUND_SPEED,
):
    """Dispatch helper: 'spectrum' -> (freqs, |S|), 'naaf'/'baaf' -> surface."""
    grids = grids or {}
    if which == "spectrum":
        freqs = grids.get("freqs")
        if freqs is None:
            half = p.sweep * 1.5 + 8.0 * max(1.0, p.cycles * p.rho) / p.duration
            freqs = np.linspace(p.carrier - half, p.carrier + half, 2001)
        return freqs, gsfm_analytic_spectrum(p, freqs, grids.get("n_harmonics"))
    model = NARROWBAND if which == "naaf" else BROADBAND
    return gsfm_af_analytic(
        p,
        model=model,
        delays=grids.get("delays"),
        velocities=grids.get("velocities"),
        c=c,
        n_harmonics=grids.get("n_harmonics"),
    )


# --------------------------------------------------------------------------
# pulse trains


def composite_af(
    pulses: Sequence[Waveform],
    t_pri: float,
    velocities: np.ndarray | None = None,
    c: float = SOUND_SPEED,
    model: str = BROADBAND,
) -> AmbiguitySurface:
    """Composite AF of a pulse train: the double sum of pairwise cross-AFs
    offset in delay by (m - n) * T_PRI."""
    velocities = default_velocities() if velocities is None else np.asarray(velocities, float)
    n_p = len(pulses)
    d0, chi0 = _xaf_complex(pulses[0], pulses[0], model, velocities, c, None)
    dt = d0[1] - d0[0]
    span = (n_p - 1) * t_pri + pulses[0].duration
    n_half = int(np.ceil(span / dt)) + 1
    delays = np.arange(-n_half, n_half + 1) * dt
    acc = np.zeros((velocities.size, delays.size), dtype=complex)
    for mi in range(n_p):
        for ni in range(n_p):
            if mi == ni == 0:
                d, chi = d0, chi0
            else:
                d, chi = _xaf_complex(
                    pulses[mi], pulses[ni], model, velocities, c, None
                )
            # scatter at the (possibly fractional-lag) offset with linear
            # interpolation between the two neighbouring bins
            pos = (d + (mi - ni) * t_pri) / dt + n_half
            i0 = np.floor(pos).astype(int)
            frac = pos - i0
            for i_part, wgt in ((i0, 1.0 - frac), (i0 + 1, frac)):
                ok = (i_part >= 0) & (i_part < delays.size)
                np.add.at(acc, (slice(None), i_part[ok]), chi[:, ok] * wgt[ok])
    mag = np.abs(acc) / n_p  # unit-energy pulses: train energy = n_p
    doppler = (
        velocity_to_eta(velocities, c)
        if model == BROADBAND
        else velocity_to_phi(velocities, pulses[0].carrier, c)
    )
    return AmbiguitySurface(
        delay=delays,
        velocity=velocities,
        doppler=doppler,
        mag=mag,
        model=model,
        auto=True,
        c=c,
        label=f"composite(n={n_p})",
    )


# --------------------------------------------------------------------------
# export


def surface_to_csv(surface: AmbiguitySurface) -> str:
    buf = io.StringIO()
    buf.write("doppler,delay_s,magnitude_db\n")
    db = surface.db()
    for i, d in enumerate(surface.doppler):
        for j, tau in enumerate(surface.delay):
            buf.write(f"{d:.9g},{tau:.9g},{db[i, j]:.4f}\n")
    return buf.getvalue()


def surface_to_json(surface: AmbiguitySurface) -> str:
    mat = surface.mag.astype(np.float32)
    return json.dumps(
        {
            "model": surface.model,
            "auto": surface.auto,
            "c": surface.c,
            "label": surface.label,
            "delay_s": surface.delay.tolist(),
            "velocity_mps": surface.velocity.tolist(),
            "doppler": surface.doppler.tolist(),
            "shape": list(mat.shape),
            "encoding": "base64/float32-rowmajor",
            "magnitude": base64.b64encode(mat.tobytes()).decode("ascii"),
        }
    )


def qfunction_to_csv(velocities: np.ndarray, q_db: np.ndarray) -> str:
    buf = io.StringIO()
    buf.write("velocity_mps,q_db\n")
    for v, q in zip(velocities, q_db):
        buf.write(f"{v:.9g},{q:.6f}\n")
    return buf.getvalue()
