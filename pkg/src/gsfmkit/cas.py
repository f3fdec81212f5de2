"""Continuous-active-sonar pulse trains and matched-filter-bank processing.

Pulse trains are contiguous (the PRI equals the pulse length); diversity
comes from the six GSFM reflections plus per-pulse frequency hops.  Echo
synthesis and the filter banks run on complex envelopes at a decimated rate,
exactly like the ambiguity engine.
"""

from __future__ import annotations

import io
import json
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .ambiguity import velocity_to_eta
from .sigcore import Waveform, sinc_interp
from .wavegen import GsfmParams, gen_gsfm, gsfm_reflections

FBPT = "fbpt"
SBPT = "sbpt"
OBPT = "obpt"
FCPI = "fcpi"
SPCPI = "spcpi"
ACPI = "acpi"


@dataclass(frozen=True)
class PulseDescriptor:
    """One pulse of a diverse train: a GSFM design plus its frequency step."""

    params: GsfmParams
    reflection: str = "forward"
    freq_step: float = 0.0


@dataclass(frozen=True)
class PulseTrainSpec:
    pulses: tuple[PulseDescriptor, ...]
    t_pri: float
    kind: str = FBPT
    k_factor: float = 1.0  # OBPT band-division scalar, 1 < K < N

    def __post_init__(self):
        if self.kind not in (FBPT, SBPT, OBPT):
            raise ValueError(f"unknown pulse-train kind {self.kind!r}")
        for d in self.pulses:
            if abs(d.params.duration - self.t_pri) > 1e-12:
                raise ValueError("contiguous train: every pulse duration must equal T_PRI")

    @property
    def n_pulses(self) -> int:
        return len(self.pulses)


@dataclass(frozen=True)
class Target:
    range_m: float
    velocity: float
    acceleration: float = 0.0
    strength_db: float = 0.0

    def __post_init__(self):
        if self.range_m <= 0.0:
            raise ValueError("target range must be positive")


@dataclass(frozen=True)
class DirectBlast:
    source_level_db: float = 185.0
    spacing_m: float = 10.0
    null_depth_db: float = 60.0


@dataclass(frozen=True)
class CasScenario:
    targets: tuple[Target, ...]
    sound_speed: float = 1500.0
    dbl: DirectBlast = field(default_factory=DirectBlast)
    spreading: str = "cylindrical"
    noise_level_db: float | None = None  # re the DBL at the receiver; None = off

    def __post_init__(self):
        if self.spreading not in ("cylindrical", "spherical"):
            raise ValueError("spreading must be 'cylindrical' or 'spherical'")
        for t in self.targets:
            if abs(t.velocity) / self.sound_speed >= 0.05:
                raise ValueError("target velocity outside the model's validity")

    def transmission_loss(self, r: float) -> float:
        k = 10.0 if self.spreading == "cylindrical" else 20.0
        return k * np.log10(max(r, 1.0))

    def dbl_received_db(self) -> float:
        return (
            self.dbl.source_level_db
            - self.transmission_loss(self.dbl.spacing_m)
            - self.dbl.null_depth_db
        )

    def echo_received_db(self, t: Target) -> float:
        return (
            self.dbl.source_level_db
            - 2.0 * self.transmission_loss(t.range_m)
            + t.strength_db
        )


@dataclass(frozen=True)
class MfBankOutput:
    delays: np.ndarray
    velocities: np.ndarray
    revisits: tuple[np.ndarray, ...]  # per revisit: |output| (velocity, delay)
    revisit_period: float
    strategy: str
    m_coherent: int
    ref_level_db: float

    def peak(self, revisit: int) -> tuple[float, float, float]:
        """(delay_s, velocity_mps, magnitude) of the strongest cell."""
        mat = self.revisits[revisit]
        i, j = np.unravel_index(int(np.argmax(mat)), mat.shape)
        return float(self.delays[j]), float(self.velocities[i]), float(mat[i, j])


# --------------------------------------------------------------------------
# train construction


def design_gsfm_family(
    base: GsfmParams,
    n_pulses: int,
    sample_rate: float | None = None,
    rho_step: float = 1.0,
    cycle_factor: float = 2.25,
) -> list[Waveform]:
    """Nearly orthogonal pulses: the six reflections of each (alpha, rho)
    design, with every additional family of six taking a well-separated
    (rho, cycles) point so cross-family correlations stay at the
    TBP-limited floor."""
    order = ["forward", "reverse", "forward_flip", "reverse_flip", "even", "even_flip"]
    pulses: list[Waveform] = []
    family = 0
    while len(pulses) < n_pulses:
        p = replace(
            base,
            rho=base.rho + rho_step * family,
            cycles=base.cycles * cycle_factor**family,
            alpha=None,
        )
        refl = gsfm_reflections(p, sample_rate)
        for name in order:
            if len(pulses) >= n_pulses:
                break
            pulses.append(refl[name])
        family += 1
    return pulses


def build_pulse_train(
    spec: PulseTrainSpec,
    b_sys: float,
    m_coherent: int | None = None,
    sample_rate: float | None = None,
) -> tuple[list[Waveform], float, float]:
    """Synthesize the train pulses and report (pulses, TBP, R_max).

    Pulse n is its GSFM reflection shifted by its frequency step; the band
    the train occupies must stay inside b_sys.  The TBP follows the train
    kind for the given coherent pulse count; R_max = c N T_PRI / 2 at the
    reference sound speed 1500 m/s unless overridden by the caller's c.
    """
    n = spec.n_pulses
    m = n if m_coherent is None else m_coherent
    if not (1 <= m <= n):
        raise ValueError("coherent pulse count must lie in 1..N")
    pulses: list[Waveform] = []
    fs = sample_rate
    steps = [d.freq_step for d in spec.pulses]
    for d in spec.pulses:
        p = d.params
        ib = p.sweep
        lo = p.carrier + d.freq_step - ib / 2.0
        hi = p.carrier + d.freq_step + ib / 2.0
        if hi - lo > b_sys + 1e-9:
            raise ValueError("pulse band exceeds the system bandwidth")
        refl = gsfm_reflections(p, fs)
        w = refl[d.reflection]
        if fs is None:
            fs = w.sample_rate
        if d.freq_step:
            t = np.arange(w.n) / w.sample_rate
            w = w.with_samples(
                w.samples * np.exp(2j * np.pi * d.freq_step * t),
                carrier=p.carrier + d.freq_step,
            )
        pulses.append(w)
    span = (max(steps) - min(steps)) + spec.pulses[0].params.sweep
    if span > b_sys + 1e-9:
        raise ValueError("train band span exceeds the system bandwidth")
    if spec.kind == FBPT:
        tbp = spec.t_pri * b_sys * m
    elif spec.kind == SBPT:
        tbp = spec.t_pri * b_sys * m**2 / n
    else:
        df_min = _min_step(steps)
        tbp = spec.t_pri * (b_sys / spec.k_factor + df_min * m) * m
    r_max = 1500.0 * n * spec.t_pri / 2.0
    return pulses, tbp, r_max


def _min_step(steps: Sequence[float]) -> float:
    vals = sorted(set(steps))
    if len(vals) < 2:
        return 0.0
    return min(b - a for a, b in zip(vals, vals[1:]))


def concat_train(pulses: Sequence[Waveform], t_pri: float) -> Waveform:
    """Contiguous train waveform (T_PRI = pulse duration)."""
    fs = pulses[0].sample_rate
    hop = int(round(t_pri * fs))
    n_total = hop * len(pulses)
    s = np.zeros(n_total, dtype=complex)
    for k, p in enumerate(pulses):
        if abs(p.sample_rate - fs) > 1e-9 * fs:
            raise ValueError("train pulses must share one sample rate")
        s[k * hop : k * hop + p.n] = p.samples
    return Waveform(
        s,
        fs,
        len(pulses) * t_pri,
        pulses[0].carrier,
        label=f"train(n={len(pulses)})",
    )


# --------------------------------------------------------------------------
# echo synthesis


def synth_scenario_echo(
    scenario: CasScenario,
    train: Waveform,
    window: float | None = None,
    seed: int = 0,
) -> tuple[np.ndarray, float, float]:
    """Received envelope-rate signal for the scenario.

    Returns (samples, sample_rate, ref_level_db); amplitudes are relative to
    the direct blast at the receiver (0 dB), so a +16 dB echo has amplitude
    10^(16/20) times the DBL's.  The direct blast arrives at spacing/c with
    eta = 1; each target contributes a two-way-delayed, Doppler-warped train
    copy (v(t) = v0 + a t sets the instantaneous scale).
    """
    c = scenario.sound_speed
    fs = train.sample_rate
    ref = scenario.dbl_received_db()
    max_delay = max([2.0 * t.range_m / c for t in scenario.targets], default=0.0)
    span = window if window is not None else train.duration + max_delay + 0.5
    n = int(round(span * fs))
    t = np.arange(n) / fs
    out = np.zeros(n, dtype=complex)

    def add_copy(delay, level_db, v0, accel):
        amp = 10.0 ** ((level_db - ref) / 20.0)
        v_t = v0 + accel * t
        eta_t = velocity_to_eta(v_t, c)
        pos = eta_t * (t - delay) * fs
        inside = (pos > -8) & (pos < train.n + 8)
        if not inside.any():
            warnings.warn("echo falls outside the simulation window", stacklevel=3)
            return
        vals = np.zeros(n, dtype=complex)
        vals[inside] = sinc_interp(train.samples, pos[inside])
        out[:] = out + amp * vals

    add_copy(scenario.dbl.spacing_m / c, ref, 0.0, 0.0)
    for tgt in scenario.targets:
        add_copy(
            2.0 * tgt.range_m / c,
            scenario.echo_received_db(tgt),
            tgt.velocity,
            tgt.acceleration,
        )
    if scenario.noise_level_db is not None:
        rng = np.random.default_rng(seed)
        sigma = 10.0 ** (scenario.noise_level_db / 20.0)
        out += sigma * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
    return out, fs, ref


# --------------------------------------------------------------------------
# processing


def acceleration_tolerance(
    accel: float, c: float, t_cpi: float, bandwidth: float
) -> tuple[bool, float]:
    """Acceleration-tolerance test a/c < 1/(T^2 B) with its margin ratio."""
    if min(c, t_cpi, bandwidth) <= 0.0 or accel < 0.0:
        raise ValueError("inputs must be positive")
    bound = 1.0 / (t_cpi**2 * bandwidth)
    if accel == 0.0:
        return True, np.inf
    ratio = bound / (accel / c)
    return ratio > 1.0, ratio


def _decimate_received(
    samples: np.ndarray, fs: float, carrier: float, target_fs: float
) -> tuple[np.ndarray, float]:
    t = np.arange(samples.size) / fs
    u = samples * np.exp(-2j * np.pi * carrier * t)
    n = u.size
    n_new = max(64, int(np.ceil(n * target_fs / fs)))
    if n_new >= n:
        return u, fs
    spec = np.fft.fft(u)
    h = (n_new + 1) // 2
    kept = np.concatenate([spec[:h], spec[n - (n_new - h):]])
    return np.fft.ifft(kept) * (n_new / n), fs * n_new / n


def mf_bank_process(
    received: np.ndarray,
    fs: float,
    pulses: Sequence[Waveform],
    t_pri: float,
    strategy: str,
    velocities: np.ndarray,
    b_sys: float,
    c: float = 1500.0,
    m_coherent: int | None = None,
    n_revisits: int | None = None,
) -> MfBankOutput:
    """Per-revisit Doppler filter banks against the received signal.

    The revisit-r filter is the cyclic pulse block [r, ..., r+M-1] of length
    M * T_PRI; FCPI takes M = N, SPCPI M = 1, ACPI a caller-chosen M.  The
    target scene is revisited every T_PRI: output r's delay axis is measured
    from pulse r's transmission time, so a fixed target reappears at the
    same delay in every revisit.
    """
    n_p = len(pulses)
    if strategy == FCPI:
        m = n_p
    elif strategy == SPCPI:
        m = 1
    elif strategy == ACPI:
        if m_coherent is None:
            raise ValueError("ACPI needs the coherent pulse count M")
        m = m_coherent
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if m > n_p:
        raise ValueError("coherent pulse count M exceeds the train length")
    n_rev = n_p if n_revisits is None else n_revisits
    f_ref = pulses[0].carrier
    v_max = float(np.max(np.abs(velocities))) if len(velocities) else 0.0
    half = b_sys / 2.0 + f_ref * abs(velocity_to_eta(v_max, c) - 1.0) + 8.0 / t_pri
    rx, fs_env = _decimate_received(received, fs, f_ref, 8.0 * half)
    dt = 1.0 / fs_env
    revisits = []
    delays = None
    for r in range(n_rev):
        block = [pulses[(r + k) % n_p] for k in range(m)]
        filt = concat_train(block, t_pri)
        ft, _ = _decimate_received(filt.samples, fs, f_ref, 8.0 * half)
        L = 1 << int(np.ceil(np.log2(rx.size + ft.size)))
        rx_f = np.fft.fft(rx, L)
        rows = []
        for v in velocities:
            eta = float(velocity_to_eta(v, c))
            n_out = int(np.ceil(ft.size / min(eta, 1.0))) + 1
            y = np.sqrt(eta) * sinc_interp(ft, eta * np.arange(n_out))
            y = y * np.exp(2j * np.pi * f_ref * (eta - 1.0) * np.arange(y.size) * dt)
            corr = np.fft.ifft(rx_f * np.conj(np.fft.fft(y, L)))
            rows.append(np.abs(corr[: rx.size]) * dt)
        mat = np.vstack(rows)
        # delay axis relative to this revisit's transmit time
        start = int(round(r * t_pri / dt))
        if delays is None:
            n_keep = rx.size - int(round((n_rev - 1) * t_pri / dt))
            delays = np.arange(n_keep) * dt
        revisits.append(mat[:, start : start + len(delays)])
    return MfBankOutput(
        delays=delays,
        velocities=np.asarray(velocities, float),
        revisits=tuple(revisits),
        revisit_period=t_pri,
        strategy=strategy if strategy != ACPI else f"acpi({m})",
        m_coherent=m,
        ref_level_db=0.0,
    )


def detect_peaks(
    out: MfBankOutput,
    revisit: int,
    threshold_db: float,
    guard: float = 0.05,
) -> list[dict]:
    """Local maxima above the threshold (dB re the revisit's peak)."""
    mat = out.revisits[revisit]
    ref = mat.max()
    picks = []
    db = 20.0 * np.log10(np.maximum(mat / ref, 1e-12))
    flat = np.argsort(mat.ravel())[::-1]
    for idx in flat[:50000]:
        i, j = np.unravel_index(int(idx), mat.shape)
        if db[i, j] < threshold_db:
            break
        d, v = float(out.delays[j]), float(out.velocities[i])
        if all(abs(d - p["delay_s"]) > guard or abs(v - p["velocity_mps"]) > 1.0 for p in picks):
            picks.append(
                {"delay_s": d, "velocity_mps": v, "level_db": float(db[i, j])}
            )
    return picks


def revisit_to_csv(out: MfBankOutput, revisit: int) -> str:
    buf = io.StringIO()
    buf.write("delay_s,velocity_mps,magnitude_db\n")
    mat = out.revisits[revisit]
    ref = mat.max()
    db = 20.0 * np.log10(np.maximum(mat / max(ref, 1e-300), 1e-12))
    for i, v in enumerate(out.velocities):
        for j, d in enumerate(out.delays):
            buf.write(f"{d:.9g},{v:.9g},{db[i, j]:.3f}\n")
    return buf.getvalue()


def summary_json(out: MfBankOutput, peaks_per_revisit: list[list[dict]]) -> str:
    return json.dumps(
        {
            "strategy": out.strategy,
            "m_coherent": out.m_coherent,
            "revisit_period_s": out.revisit_period,
            "n_revisits": len(out.revisits),
            "peaks": peaks_per_revisit,
        },
        indent=2,
    )
