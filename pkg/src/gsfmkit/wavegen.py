"""Waveform generators: classic FM, SFM, GSFM family, Costas, BPSK/QPSK.

All generators return unit-energy analytic signals.  GSFM phases use exact
closed forms where they exist (rho = 1 elementary, rho = 2 via Fresnel
integrals) and cumulative Simpson integration of the instantaneous frequency
otherwise; the IF law, not the phase, is the generator contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence, Tuple

import numpy as np
from scipy import integrate, special

from .sigcore import (
    CENTERED,
    ZERO_START,
    TaperSpec,
    Waveform,
    default_sample_rate,
    normalize_energy,
    time_axis,
)

GSFI = "gsfi"
GCFI = "gcfi"
APPROX = "approx"
NONSYMMETRIC = "nonsymmetric"
EVEN = "even"


@dataclass(frozen=True)
class GsfmParams:
    """GSFM design parameters.

    Either ``alpha`` (s^-rho) or the cycle count ``cycles`` may be given; the
    other is derived.  For a nonsymmetric IF the waveform lives on [0, T] and
    C = alpha T^rho; for the even-symmetric IF it lives on [-T/2, T/2] with
    |t|^rho and C = 2 alpha (T/2)^rho.
    """

    duration: float
    carrier: float
    sweep: float
    rho: float
    alpha: float | None = None
    cycles: float | None = None
    variant: str = GCFI
    symmetry: str = NONSYMMETRIC

    def __post_init__(self):
        if self.rho < 1.0:
            raise ValueError("rho must be >= 1")
        if self.sweep <= 0.0:
            raise ValueError("sweep bandwidth must be positive")
        if self.variant not in (GSFI, GCFI, APPROX):
            raise ValueError(f"unknown GSFM variant {self.variant!r}")
        if self.symmetry not in (NONSYMMETRIC, EVEN):
            raise ValueError(f"unknown IF symmetry {self.symmetry!r}")
        if (self.alpha is None) == (self.cycles is None):
            raise ValueError("give exactly one of alpha or cycles")
        if self.alpha is None:
            object.__setattr__(self, "alpha", self._alpha_from_cycles(self.cycles))
        else:
            object.__setattr__(self, "cycles", self._cycles_from_alpha(self.alpha))
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")

    def _alpha_from_cycles(self, c: float) -> float:
        if self.symmetry == NONSYMMETRIC:
            return c / self.duration**self.rho
        return c / (2.0 * (self.duration / 2.0) ** self.rho)

    def _cycles_from_alpha(self, a: float) -> float:
        if self.symmetry == NONSYMMETRIC:
            return a * self.duration**self.rho
        return 2.0 * a * (self.duration / 2.0) ** self.rho

    @property
    def deviation_ratio(self) -> float:
        """Swept bandwidth over the IF's own bandwidth (Eq. for the
        approximate phase variant)."""
        return self.sweep / (2.0 * self.alpha * self.rho)


@dataclass(frozen=True)
class SfmParams:
    duration: float
    carrier: float
    sweep: float
    mod_freq: float
    phase: str = "sine"

    def __post_init__(self):
        if self.phase not in ("sine", "cosine"):
            raise ValueError("phase must be 'sine' or 'cosine'")
        if not (self.mod_freq > 0.0 and self.sweep > 0.0):
            raise ValueError("mod_freq and sweep must be positive")

    @property
    def mod_index(self) -> float:
        return self.sweep / (2.0 * self.mod_freq)


@dataclass(frozen=True)
class CodedParams:
    duration: float
    carrier: float
    n_chips: int
    code: Tuple[int, ...]
    chip_taper: TaperSpec = TaperSpec("rectangular")
    chip_spacing: float = 0.0

    def __post_init__(self):
        if self.n_chips != len(self.code):
            raise ValueError("n_chips must equal the code length")
        object.__setattr__(self, "code", tuple(int(c) for c in self.code))


# --------------------------------------------------------------------------
# GSFM instantaneous frequency / phase


def gsfm_if(p: GsfmParams, t: np.ndarray) -> np.ndarray:
    """Baseband IF law of the GSFM (carrier excluded)."""
    x = np.abs(t) ** p.rho if p.symmetry == EVEN else np.asarray(t, float) ** p.rho
    arg = 2.0 * np.pi * p.alpha * x
    half = p.sweep / 2.0
    if p.variant == GSFI:
        f = half * np.sin(arg)
    elif p.variant == GCFI:
        f = half * np.cos(arg)
    else:
        # sinc(0) limit handled by np.sinc
        f = half * (np.cos(arg) - ((p.rho - 1.0) / p.rho) * np.sinc(arg / np.pi))
    return f


def _gsfm_phase(p: GsfmParams, t: np.ndarray) -> np.ndarray:
    """Baseband phase modulation (2 pi * integral of the IF).

    The even-symmetric IF integrates to an odd phase; a constant offset is
    physically irrelevant and ignored.
    """
    t = np.asarray(t, float)
    pointwise = _gsfm_phase_pointwise(p, np.abs(t))
    if pointwise is not None:
        return np.sign(t) * pointwise if p.symmetry == EVEN else pointwise
    # general rho: cumulative Simpson on the (heavily oversampled) IF grid
    f = gsfm_if(p, t)
    ph = integrate.cumulative_simpson(2.0 * np.pi * f, x=t, initial=0.0)
    if p.symmetry == EVEN:
        ph = ph - ph[int(np.argmin(np.abs(t)))]
    return ph


def _gsfm_phase_pointwise(p: GsfmParams, t: np.ndarray) -> np.ndarray | None:
    """Exact phase on t >= 0 where a closed form exists, else None."""
    half = p.sweep / 2.0
    a = p.alpha
    if p.variant == APPROX:
        beta_dev = p.deviation_ratio
        arg = 2.0 * np.pi * a * t**p.rho
        with np.errstate(divide="ignore", invalid="ignore"):
            ph = beta_dev * np.sin(arg) / t ** (p.rho - 1.0)
        return np.where(t == 0.0, 0.0, ph)
    if p.rho == 1.0:
        w = 2.0 * np.pi * a
        if p.variant == GSFI:  # IF = half*sin -> phase = 2*pi*half*(1-cos)/w
            return (2.0 * np.pi * half / w) * (1.0 - np.cos(w * t))
        return (2.0 * np.pi * half / w) * np.sin(w * t)
    if p.rho == 2.0:
        # int_0^t sin(2 pi a x^2) dx = S(2 sqrt(a) x) / (2 sqrt(a)) under the
        # pi u^2/2 Fresnel convention; same with cos/C.
        sa = np.sqrt(a)
        s_f, c_f = special.fresnel(2.0 * sa * t)
        kern = s_f if p.variant == GSFI else c_f
        return 2.0 * np.pi * half * kern / (2.0 * sa)
    return None


def gen_gsfm(p: GsfmParams, sample_rate: float | None = None) -> Waveform:
    """Unit-energy GSFM waveform for the requested phase variant/symmetry."""
    fs = sample_rate or default_sample_rate(p.carrier, p.sweep)
    n = int(round(p.duration * fs))
    origin = CENTERED if p.symmetry == EVEN else ZERO_START
    t = time_axis(n, fs, origin, p.duration)
    phase = _gsfm_phase(p, t) + 2.0 * np.pi * p.carrier * t
    s = np.exp(1j * phase) / np.sqrt(p.duration)
    label = f"gsfm-{p.variant}-{p.symmetry}(rho={p.rho:g},C={p.cycles:g})"
    return normalize_energy(
        Waveform(s, fs, p.duration, p.carrier, time_origin=origin, label=label)
    )


def gen_sfm(p: SfmParams, sample_rate: float | None = None) -> Waveform:
    """Sinusoidal FM: phase beta*sin(2 pi f_m t) (or cosine counterpart)."""
    fs = sample_rate or default_sample_rate(p.carrier, p.sweep)
    n = int(round(p.duration * fs))
    t = np.arange(n) / fs
    beta = p.mod_index
    mod = np.sin if p.phase == "sine" else np.cos
    phase = beta * mod(2.0 * np.pi * p.mod_freq * t) + 2.0 * np.pi * p.carrier * t
    s = np.exp(1j * phase) / np.sqrt(p.duration)
    label = f"sfm-{p.phase}(fm={p.mod_freq:g})"
    return normalize_energy(Waveform(s, fs, p.duration, p.carrier, label=label))


def gen_classic(
    kind: str,
    duration: float,
    carrier: float,
    sweep: float = 0.0,
    sample_rate: float | None = None,
) -> Waveform:
    """CW, LFM, or HFM pulse with a rectangular taper."""
    fs = sample_rate or default_sample_rate(carrier, sweep)
    n = int(round(duration * fs))
    if kind == "cw":
        t = np.arange(n) / fs
        phase = 2.0 * np.pi * carrier * t
        origin = ZERO_START
    elif kind == "lfm":
        t = time_axis(n, fs, CENTERED, duration)
        phase = np.pi * (sweep / duration) * t**2 + 2.0 * np.pi * carrier * t
        origin = CENTERED
    elif kind == "hfm":
        if carrier - sweep / 2.0 <= 0.0:
            raise ValueError("HFM requires carrier - sweep/2 > 0")
        t = np.arange(n) / fs
        b = duration * (carrier - sweep / 2.0) / sweep
        a = (carrier + sweep / 2.0) * b
        phase = 2.0 * np.pi * a * np.log(t + b)
        origin = ZERO_START
    else:
        raise ValueError(f"unknown classic kind {kind!r}")
    s = np.exp(1j * phase) / np.sqrt(duration)
    return normalize_energy(
        Waveform(s, fs, duration, carrier, time_origin=origin, label=kind)
    )


# --------------------------------------------------------------------------
# coded waveforms


def is_costas(code: Sequence[int]) -> bool:
    """Distinct-difference-triangle check, brute force over all displacements."""
    c = list(code)
    n = len(c)
    if sorted(c) != list(range(1, n + 1)):
        return False
    for d in range(1, n):
        diffs = [c[i + d] - c[i] for i in range(n - d)]
        if len(set(diffs)) != len(diffs):
            return False
    return True


def welch_costas(prime: int, root: int) -> Tuple[int, ...]:
    """Welch construction: powers of a primitive root modulo a prime."""
    code = []
    x = 1
    for _ in range(prime - 1):
        x = (x * root) % prime
        code.append(x)
    if sorted(code) != list(range(1, prime)):
        raise ValueError(f"{root} is not a primitive root of {prime}")
    return tuple(code)


def costas_pool(prime: int, max_codes: int | None = None) -> list[Tuple[int, ...]]:
    """Validated Costas codes of order prime-1: Welch sequences for every
    primitive root plus their cyclic shifts (single-periodicity property)."""
    pool: list[Tuple[int, ...]] = []
    seen = set()
    for root in range(2, prime):
        try:
            base = welch_costas(prime, root)
        except ValueError:
            continue
        for shift in range(prime - 1):
            cand = base[shift:] + base[:shift]
            if cand not in seen and is_costas(cand):
                seen.add(cand)
                pool.append(cand)
                if max_codes and len(pool) >= max_codes:
                    return pool
    return pool


def min_costas_chips(duration: float, bandwidth: float) -> int:
    """Minimum chip count ceil(sqrt(T*B)) for a Costas design."""
    return math.ceil(math.sqrt(duration * bandwidth))


def gen_costas(p: CodedParams, sample_rate: float | None = None) -> Waveform:
    """Frequency-hopped chip train; chip start phases accumulate so each chip
    begins at the previous chip's ending phase."""
    if not is_costas(p.code):
        raise ValueError("code fails the Costas difference-triangle validator")
    if p.chip_spacing <= 0.0:
        raise ValueError("Costas generation needs a positive chip_spacing")
    span = p.n_chips * p.chip_spacing
    if min_costas_chips(p.duration, span) > p.n_chips:
        import warnings

        warnings.warn(
            f"{p.n_chips} chips is below the ceil(sqrt(TB)) = "
            f"{min_costas_chips(p.duration, span)} guideline",
            stacklevel=2,
        )
    fs = sample_rate or default_sample_rate(p.carrier, span)
    n = int(round(p.duration * fs))
    t_chip = p.duration / p.n_chips
    edges = np.minimum((np.arange(p.n_chips + 1) * t_chip * fs).round().astype(int), n)
    freqs = p.carrier + (np.asarray(p.code) - (p.n_chips + 1) / 2.0) * p.chip_spacing
    s = np.zeros(n, dtype=complex)
    theta = 0.0
    for i in range(p.n_chips):
        k = np.arange(edges[i], edges[i + 1])
        tau = k / fs - i * t_chip
        win = p.chip_taper.window(k.size)
        s[k] = win * np.exp(1j * (2.0 * np.pi * freqs[i] * tau + theta))
        theta += 2.0 * np.pi * freqs[i] * t_chip
    return normalize_energy(
        Waveform(s, fs, p.duration, p.carrier, label=f"costas(N={p.n_chips})")
    )


def mlsr_sequence(degree: int) -> np.ndarray:
    """Maximal-length shift register sequence as +/-1 chips, all-ones seed.

    Fibonacci recurrence s[n] = XOR of s[n - t] over the tabulated primitive
    polynomial exponents; the +/-1 form has the two-valued circular
    autocorrelation {N, -1} characteristic of m-sequences.
    """
    taps = {
        2: (2, 1),
        3: (3, 2),
        4: (4, 3),
        5: (5, 3),
        6: (6, 5),
        7: (7, 6),
        8: (8, 6, 5, 4),
        9: (9, 5),
        10: (10, 7),
        11: (11, 9),
        12: (12, 11, 8, 6),
    }
    if degree not in taps:
        raise ValueError(f"no primitive polynomial tabulated for degree {degree}")
    n_total = 2**degree - 1
    bits = [1] * degree
    for n in range(degree, n_total):
        fb = 0
        for t in taps[degree]:
            fb ^= bits[n - t]
        bits.append(fb)
    return 1 - 2 * np.asarray(bits)  # bit 0 -> +1, bit 1 -> -1


def qpsk_transform(code: Sequence[int], sign: int = +1) -> np.ndarray:
    """Binary-to-quadriphase chip amplitudes q_i = j^{+/-(i-1)} e^{j theta_i}."""
    theta = np.where(np.asarray(code) > 0, 0.0, np.pi)
    i = np.arange(len(theta))
    return np.exp(1j * (np.pi / 2.0) * sign * i) * np.exp(1j * theta)


def gen_psk(
    kind: str,
    p: CodedParams,
    sample_rate: float | None = None,
    qpsk_sign: int = +1,
    bandwidth_hint: float | None = None,
    qpsk_transition: float = 0.25,
) -> Waveform:
    """BPSK or QPSK chip train at constant carrier frequency.

    BPSK keys the phase hard at chip edges.  QPSK chips step by +/-90
    degrees, so the quadriphase train is realized at constant envelope with
    a linear phase ramp spanning the qpsk_transition fraction of each chip
    boundary (the overlapped-subpulse structure of the binary-to-quadriphase
    construction); hard-keyed rectangular chips would have the same spectral
    envelope as the BPSK, which contradicts the containment this family is
    chosen for.
    """
    code = np.asarray(p.code)
    if not np.all(np.abs(code) == 1):
        raise ValueError("PSK code entries must be +/-1")
    chip_rate = p.n_chips / p.duration
    fs = sample_rate or default_sample_rate(p.carrier, bandwidth_hint or 4.0 * chip_rate)
    n = int(round(p.duration * fs))
    t = np.arange(n) / fs
    t_chip = p.duration / p.n_chips
    edges = np.minimum((np.arange(p.n_chips + 1) * t_chip * fs).round().astype(int), n)
    if kind == "bpsk":
        q = code.astype(complex)
        s = np.zeros(n, dtype=complex)
        for i in range(p.n_chips):
            k = np.arange(edges[i], edges[i + 1])
            win = p.chip_taper.window(k.size)
            s[k] = q[i] * win
    elif kind == "qpsk":
        q = qpsk_transform(code, sign=qpsk_sign)
        chip_phase = np.unwrap(np.angle(q))
        phase = np.empty(n)
        for i in range(p.n_chips):
            phase[edges[i] : edges[i + 1]] = chip_phase[i]
        half = max(1, int(round(0.5 * qpsk_transition * t_chip * fs)))
        for i in range(p.n_chips - 1):
            e = edges[i + 1]
            lo, hi = max(0, e - half), min(n, e + half)
            ramp = np.linspace(0.0, 1.0, hi - lo, endpoint=False)
            phase[lo:hi] = chip_phase[i] + ramp * (chip_phase[i + 1] - chip_phase[i])
        s = np.exp(1j * phase)
        if p.chip_taper.kind != "rectangular":
            for i in range(p.n_chips):
                k = np.arange(edges[i], edges[i + 1])
                s[k] = s[k] * p.chip_taper.window(k.size)
    else:
        raise ValueError(f"unknown PSK kind {kind!r}")
    s = s * np.exp(2j * np.pi * p.carrier * t)
    return normalize_energy(
        Waveform(s, fs, p.duration, p.carrier, label=f"{kind}(N={p.n_chips})")
    )


# --------------------------------------------------------------------------
# GSFM reflections and Fourier coefficients


def gsfm_reflections(p: GsfmParams, sample_rate: float | None = None) -> dict[str, Waveform]:
    """Six in-band reflections of one GSFM design.

    forward / reverse (time-reversed) / their frequency-flipped conjugates on
    [0, T], plus the even-symmetric waveform and its conjugate on
    [-T/2, T/2]; all unit energy in the same band.
    """
    if p.symmetry != NONSYMMETRIC:
        raise ValueError("reflections are derived from a nonsymmetric design")
    fs = sample_rate or default_sample_rate(p.carrier, p.sweep)
    base = gen_gsfm(p, fs)
    env = base.baseband()
    # The even member keeps the cycle count, not alpha: with alpha held
    # fixed the even waveform's positive-time half would duplicate the
    # forward waveform's first half exactly (a -6 dB cross-correlation).
    even = gen_gsfm(replace(p, symmetry=EVEN, alpha=None), fs)
    env_e = even.baseband()

    def build(envelope, origin, tag):
        t = time_axis(envelope.size, fs, origin, p.duration)
        s = envelope * np.exp(2j * np.pi * p.carrier * t)
        return normalize_energy(
            Waveform(s, fs, p.duration, p.carrier, time_origin=origin,
                     label=f"gsfm-{tag}")
        )

    return {
        "forward": build(env, ZERO_START, "forward"),
        "reverse": build(env[::-1], ZERO_START, "reverse"),
        "forward_flip": build(np.conj(env), ZERO_START, "forward_flip"),
        "reverse_flip": build(np.conj(env[::-1]), ZERO_START, "reverse_flip"),
        "even": build(env_e, CENTERED, "even"),
        "even_flip": build(np.conj(env_e), CENTERED, "even_flip"),
    }


def _if_hat(p: GsfmParams, t: np.ndarray) -> np.ndarray:
    """Normalized IF (gsfm_if / (sweep/2)), the function whose Fourier series
    is reported."""
    return gsfm_if(p, t) / (p.sweep / 2.0)


def gsfm_fourier_coeffs(
    p: GsfmParams, n_harmonics: int, force_quadrature: bool = False
) -> tuple[float, np.ndarray, np.ndarray]:
    """Fourier series of the normalized IF over the pulse period.

    Convention: if_hat(t) = a0/2 + sum_m a_m cos(2 pi m t / T) + b_m sin(...).
    rho = 2 with the sine IF has Fresnel closed forms; everything else falls
    back to adaptive quadrature with oscillatory weights.
    """
    if n_harmonics <= 0:
        raise ValueError("harmonic count must be positive")
    T = p.duration
    closed = (not force_quadrature) and p.rho == 2.0 and p.variant == GSFI
    if closed:
        return _fourier_closed_rho2(p, n_harmonics)
    if p.symmetry == NONSYMMETRIC:
        lo, hi = 0.0, T
    else:
        lo, hi = -T / 2.0, T / 2.0
    f = lambda t: _if_hat(p, np.asarray(t))

    def osc(m, kind):
        import warnings

        w = 2.0 * np.pi * m / T
        with warnings.catch_warnings():
            # the oscillatory-weight rule reports roundoff near machine
            # precision; accuracy is cross-checked against the closed forms
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(f, lo, hi, weight=kind, wvar=w, limit=400)
        return 2.0 * val / T

    a0 = 2.0 / T * integrate.quad(f, lo, hi, limit=400)[0]
    am = np.array([osc(m, "cos") for m in range(1, n_harmonics + 1)])
    if p.symmetry == EVEN:
        bm = np.zeros(n_harmonics)
    else:
        bm = np.array([osc(m, "sin") for m in range(1, n_harmonics + 1)])
    return a0, am, bm


def _fourier_closed_rho2(p: GsfmParams, n_harmonics: int):
    """Fresnel closed forms of the rho=2 sine-IF Fourier coefficients."""
    T = p.duration
    a = p.alpha
    sa = np.sqrt(a)
    m = np.arange(1, n_harmonics + 1, dtype=float)
    k = m / (2.0 * T * a)
    theta = 2.0 * np.pi * a * k**2
    if p.symmetry == NONSYMMETRIC:
        s_T, _ = special.fresnel(2.0 * sa * T)
        a0 = s_T / (sa * T)
        z1, z2 = T + k, T - k
        s1, c1 = special.fresnel(2.0 * sa * z1)
        s2, c2 = special.fresnel(2.0 * sa * z2)
        sk, ck = special.fresnel(2.0 * sa * k)
        pref = 1.0 / (2.0 * sa * T)
        am = pref * (np.cos(theta) * (s1 + s2) - np.sin(theta) * (c1 + c2))
        bm = pref * (np.cos(theta) * (c2 - c1 + 2.0 * ck) + np.sin(theta) * (s2 - s1 + 2.0 * sk))
        return float(a0), am, bm
    s_T, _ = special.fresnel(sa * T)
    a0 = 2.0 * s_T / (sa * T)
    z1, z2 = T / 2.0 + k, T / 2.0 - k
    s1, c1 = special.fresnel(2.0 * sa * z1)
    s2, c2 = special.fresnel(2.0 * sa * z2)
    pref = 1.0 / (sa * T)
    am = pref * (np.cos(theta) * (s1 + s2) - np.sin(theta) * (c1 + c2))
    return float(a0), am, np.zeros(n_harmonics)
