"""Mainlobe ellipse characterization: RMS bandwidth, Doppler sensitivities,
range-Doppler coupling, estimation-variance bounds, and Woodward ratios.

The broadband terms include the carrier; the RMS bandwidth is evaluated on
the baseband modulation (it is carrier-invariant in its centroid-subtracted
form, and baseband evaluation is the better-conditioned route).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .specfun import _gen_fresnel_any
from .sigcore import Waveform
from .wavegen import APPROX, EVEN, GSFI, GsfmParams

BROADBAND = "broadband"
NARROWBAND = "narrowband"


@dataclass(frozen=True)
class EoaParams:
    """Second-order mainlobe (ellipse-of-ambiguity) coefficients.

    beta_rms_sq in rad^2/s^2; lambda_b_sq in rad^2; lambda_n_sq in
    rad^2 s^2; gamma_b in rad^2/s; gamma_n in rad^2.
    """

    beta_rms_sq: float
    lambda_b_sq: float
    lambda_n_sq: float
    gamma_b: float
    gamma_n: float

    def __post_init__(self):
        if self.beta_rms_sq < 0 or self.lambda_b_sq < 0 or self.lambda_n_sq < 0:
            raise ValueError("diagonal ellipse terms must be nonnegative")

    def pair(self, model: str):
        """(lambda^2, gamma) for the requested Doppler model."""
        if model == BROADBAND:
            return self.lambda_b_sq, self.gamma_b
        if model == NARROWBAND:
            return self.lambda_n_sq, self.gamma_n
        raise ValueError(f"unknown model {model!r}")

    def determinant(self, model: str) -> float:
        lam, gam = self.pair(model)
        return self.beta_rms_sq * lam - gam**2


def _spectral_derivative(y: np.ndarray, dt: float) -> np.ndarray:
    """FFT derivative after removing the linear trend, so the periodic
    extension is continuous."""
    n = y.size
    slope = (y[-1] - y[0]) / ((n - 1) * dt)
    resid = y - slope * dt * np.arange(n)
    freq = np.fft.fftfreq(n, d=dt)
    dres = np.fft.ifft(2j * np.pi * freq * np.fft.fft(resid))
    return np.real(dres) + slope


def eoa_numeric(w: Waveform, model: str | None = None) -> EoaParams:
    """Ellipse coefficients from the time-domain integrals of the samples.

    The derivative fields come from spectral differentiation of the envelope
    magnitude and unwrapped baseband phase.  Phase-coded inputs (chip-edge
    phase jumps) are flagged: the derivative there is grid-dependent.
    """
    u = w.baseband()
    t = w.times()
    dt = w.dt
    a = np.abs(u)
    phase = np.unwrap(np.angle(u))
    dphase = np.diff(phase)
    if np.max(np.abs(dphase)) > 1.0:
        warnings.warn(
            "phase steps exceed 1 rad/sample (phase-coded input?); "
            "EOA derivative terms are ill-defined at chip edges",
            stacklevel=2,
        )
    psi_dot = _spectral_derivative(phase, dt)
    a_dot = _spectral_derivative(a, dt)

    def integ(x):
        return float(np.trapezoid(x, dx=dt))

    # carrier-inclusive instantaneous angular frequency
    om = psi_dot + 2.0 * np.pi * w.carrier
    e = integ(a**2)
    a2 = a**2 / e  # guard: unit-energy normalization under trapezoid
    beta2 = (
        integ(a_dot**2 / e + a2 * psi_dot**2)
        - integ(a * a_dot / e) ** 2
        - integ(a2 * psi_dot) ** 2
    )
    t0 = integ(t * a2)
    lam_n = 4.0 * np.pi**2 * integ((t - t0) ** 2 * a2)
    lam_b = (
        integ(t**2 * (a_dot**2 / e + a2 * om**2))
        - integ(t * a * a_dot / e) ** 2
        - integ(t * a2 * om) ** 2
    )
    gam_n = 2.0 * np.pi * integ(t * a2 * om)
    gam_b = integ(t * (a_dot**2 / e + a2 * om**2)) - (
        integ(a * a_dot / e) * integ(t * a * a_dot / e)
        + integ(a2 * om) * integ(t * a2 * om)
    )
    return EoaParams(
        beta_rms_sq=beta2,
        lambda_b_sq=max(lam_b, 0.0),
        lambda_n_sq=lam_n,
        gamma_b=gam_b,
        gamma_n=gam_n,
    )


def eoa_gsfm_closed(p: GsfmParams) -> EoaParams:
    """Generalized-Fresnel closed forms for the even-symmetric GSFI/GCFI GSFM.

    gamma is exactly zero (odd integrands over a symmetric interval); the
    lambda_B cross term carries the carrier.
    """
    if p.symmetry != EVEN:
        raise ValueError("closed forms hold for the even-symmetric IF")
    if p.variant == APPROX:
        raise ValueError("no closed form for the approximate phase variant")
    T, fc, df, rho, al = p.duration, p.carrier, p.sweep, p.rho, p.alpha
    x1 = 4.0 * np.pi * al * (T / 2.0) ** rho
    x2 = 2.0 * np.pi * al * (T / 2.0) ** rho
    c1, s1 = _gen_fresnel_any(x1, 1.0 / rho)
    c2, s2 = _gen_fresnel_any(x2, 1.0 / rho)
    c13, s13 = _gen_fresnel_any(x1, 3.0 / rho)
    c23, s23 = _gen_fresnel_any(x2, 3.0 / rho)
    k1 = rho * T * (4.0 * np.pi * al) ** (1.0 / rho)
    k2 = (rho * T) ** 2 * (2.0 * np.pi * al) ** (2.0 / rho)
    k13 = rho * T * (4.0 * np.pi * al) ** (3.0 / rho)
    k23 = rho * T * (2.0 * np.pi * al) ** (3.0 / rho)
    lead = np.pi**2 * df**2 / 2.0
    base_b = np.pi**2 * fc**2 * T**2 / 3.0 + np.pi**2 * df**2 * T**2 / 24.0
    if p.variant == GSFI:
        beta2 = lead * (1.0 - 2.0 * c1 / k1 - 8.0 * s2**2 / k2)
        lam_b = base_b - np.pi**2 * df**2 * c13 / k13 + 8.0 * np.pi**2 * df * fc * s23 / k23
    else:
        beta2 = lead * (1.0 + 2.0 * c1 / k1 - 8.0 * c2**2 / k2)
        lam_b = base_b + np.pi**2 * df**2 * c13 / k13 + 8.0 * np.pi**2 * df * fc * c23 / k23
    return EoaParams(
        beta_rms_sq=beta2,
        lambda_b_sq=lam_b,
        lambda_n_sq=np.pi**2 * T**2 / 3.0,
        gamma_b=0.0,
        gamma_n=0.0,
    )


def estimation_variances(
    e: EoaParams, snr: float, model: str = BROADBAND
) -> tuple[float, float]:
    """Delay and Doppler estimation variance bounds at the given MF output SNR."""
    lam, gam = e.pair(model)
    det = e.beta_rms_sq * lam - gam**2
    if det <= 0.0 or e.beta_rms_sq <= 0.0 or lam <= 0.0:
        raise ValueError("degenerate mainlobe ellipse")
    pre = (1.0 + snr) / (2.0 * snr**2)
    return pre * lam / det, pre * e.beta_rms_sq / det


def eoa_contour(
    e: EoaParams, epsilon: float, model: str = BROADBAND, n_points: int = 361
) -> np.ndarray:
    """Parametric (tau, doppler) ellipse at mainlobe height 1 - epsilon.

    Points satisfy epsilon = beta^2 tau^2 + 2 gamma tau d + lambda^2 d^2;
    broadband doppler is (eta - 1), narrowband is the shift in Hz.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError("epsilon must be in (0, 1)")
    lam, gam = e.pair(model)
    q = np.array([[e.beta_rms_sq, gam], [gam, lam]])
    vals, vecs = np.linalg.eigh(q)
    if np.any(vals <= 0.0):
        raise ValueError("degenerate mainlobe ellipse")
    theta = np.linspace(0.0, 2.0 * np.pi, n_points)
    circ = np.stack([np.cos(theta), np.sin(theta)])
    pts = vecs @ (np.sqrt(epsilon) / np.sqrt(vals)[:, None] * circ)
    return pts.T  # columns: (tau, doppler)


def woodward_ratios(
    w: Waveform,
    velocities: np.ndarray | None = None,
    c: float = 1500.0,
) -> dict:
    """Woodward resolution constants and their mainlobe ratios.

    A_tau integrates the squared zero-Doppler cut (the ACF); A_eta the
    squared zero-delay cut over the Doppler scale axis.  The mainlobe areas
    integrate the same cuts out to the first null, so the ratios grow with
    the share of energy pushed into sidelobes (i.e. with the RMS widths).
    """
    from .ambiguity import velocity_to_eta, xaf

    velocities = (
        np.arange(-20.0, 20.0 + 0.125, 0.125) if velocities is None else velocities
    )
    surf = xaf(w, w, model="broadband", velocities=velocities, c=c)
    zero_dop = surf.row(0.0)
    a_tau = float(np.trapezoid(zero_dop**2, surf.delay))
    i0 = int(np.argmin(np.abs(surf.delay)))
    zero_delay = surf.mag[:, i0]
    eta = velocity_to_eta(surf.velocity, c)
    a_eta = float(np.trapezoid(zero_delay**2, eta))
    tau_area = _mainlobe_area(surf.delay, zero_dop)
    eta_area = _mainlobe_area(eta, zero_delay)
    return {
        "a_tau": a_tau,
        "a_eta": a_eta,
        "mainlobe_tau": tau_area,
        "mainlobe_eta": eta_area,
        "ratio_tau": a_tau / tau_area,
        "ratio_eta": a_eta / eta_area,
    }


def _mainlobe_area(axis: np.ndarray, cut: np.ndarray) -> float:
    """Integral of the squared cut between the first nulls around the peak."""
    i_peak = int(np.argmax(cut))
    left = i_peak
    while left > 0 and cut[left - 1] < cut[left]:
        left -= 1
    right = i_peak
    while right < cut.size - 1 and cut[right + 1] < cut[right]:
        right += 1
    return float(np.trapezoid(cut[left : right + 1] ** 2, axis[left : right + 1]))


def fit_mainlobe_ellipse(surface, model: str = BROADBAND) -> EoaParams:
    """Least-squares quadratic fit of the mainlobe half-power region.

    Grid points with |chi|^2 in [0.4, 0.6] are fit to
    1 - |chi|^2 = beta^2 tau^2 + 2 gamma tau d + lambda^2 d^2 with d the
    model's Doppler coordinate; used to validate the integral-based
    parameters against the surfaces themselves.
    """
    from .sigcore import sinc_interp

    mag2 = (surface.mag / surface.mag.max()) ** 2
    # the surface's converted doppler axis: eta (broadband) or phi (narrowband)
    dop = surface.doppler - 1.0 if model == BROADBAND else surface.doppler
    # |chi|^2 is oversampled along delay; refine the half-power ring on an
    # 8x sinc-interpolated grid so the quadratic fit is not grid-quantized
    i0 = int(np.argmax(mag2.max(axis=1)))
    j0 = int(np.argmax(mag2[i0]))
    row_peak = mag2.max(axis=1)
    rows = np.nonzero(row_peak >= 0.35)[0]
    half_w = max(2, int(np.count_nonzero(mag2[i0] >= 0.4)))
    jlo, jhi = max(0, j0 - 4 * half_w), min(mag2.shape[1], j0 + 4 * half_w)
    d_grid = surface.delay[jlo:jhi]
    dt = d_grid[1] - d_grid[0]
    fine = np.linspace(d_grid[0], d_grid[-1], 8 * d_grid.size)
    pos = (fine - d_grid[0]) / dt
    taus, ds, rhs = [], [], []
    for i in rows:
        vals = np.clip(sinc_interp(mag2[i, jlo:jhi].astype(complex), pos).real, 0.0, 1.0)
        sel = (vals >= 0.4) & (vals <= 0.6)
        taus.append(fine[sel])
        ds.append(np.full(sel.sum(), dop[i]))
        rhs.append(1.0 - vals[sel])
    tau = np.concatenate(taus)
    d = np.concatenate(ds)
    rhs = np.concatenate(rhs)
    if tau.size < 8:
        raise ValueError("not enough half-power grid points for the ellipse fit")
    a_mat = np.stack([tau**2, 2.0 * tau * d, d**2], axis=1)
    coef, *_ = np.linalg.lstsq(a_mat, rhs, rcond=None)
    beta2, gam, lam2 = (float(x) for x in coef)
    return EoaParams(
        beta_rms_sq=max(beta2, 0.0),
        lambda_b_sq=max(lam2, 0.0),
        lambda_n_sq=max(lam2, 0.0),
        gamma_b=gam,
        gamma_n=gam,
    )


def _crossing_width(axis: np.ndarray, cut: np.ndarray, threshold: float) -> float:
    """Linear-interpolated width of the central lobe above the threshold."""
    i_peak = int(np.argmax(cut))
    left = right = None
    for i in range(i_peak, 0, -1):
        if cut[i - 1] < threshold <= cut[i]:
            frac = (cut[i] - threshold) / (cut[i] - cut[i - 1])
            left = axis[i] - frac * (axis[i] - axis[i - 1])
            break
    for i in range(i_peak, cut.size - 1):
        if cut[i + 1] < threshold <= cut[i]:
            frac = (cut[i] - threshold) / (cut[i] - cut[i + 1])
            right = axis[i] + frac * (axis[i + 1] - axis[i])
            break
    if left is None or right is None:
        raise ValueError("threshold not crossed inside the grid (grid too small)")
    return float(right - left)
