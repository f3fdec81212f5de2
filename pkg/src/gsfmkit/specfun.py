"""Special functions for closed-form spectra and ambiguity functions.

Fresnel integrals follow the pi*u^2/2 normalization:

    C(x) = int_0^x cos(pi u^2 / 2) du,   S(x) = int_0^x sin(pi u^2 / 2) du

which is the convention under which the change of variables
int_0^T sin(2 pi a t^2) dt = S(2 sqrt(a) T) / (2 sqrt(a)) closes.  Other
conventions (argument x^2 without the pi/2 factor) exist in the wild; all
closed forms in this package assume the one above.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import integrate, special


@dataclass(frozen=True)
class GbfArgs:
    """Harmonic arguments of a mixed-type generalized Bessel function.

    ``a[m-1]`` multiplies sin(2 pi m theta) and ``b[m-1]`` multiplies
    cos(2 pi m theta) in the phase exponential; both sequences share the
    truncation order M.
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if a.shape != b.shape or a.ndim != 1 or a.size < 1:
            raise ValueError("a and b must be 1-D sequences of equal length M >= 1")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("GBF arguments must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def order(self) -> int:
        return self.a.size


def fresnel(x: float | np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Fresnel integral pair (C, S) under the pi*u^2/2 convention.

    Odd in x: C(-x) = -C(x), S(-x) = -S(x).
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("fresnel: non-finite input")
    s, c = special.fresnel(x)
    return c, s


def gen_fresnel(x: float, a: float) -> Tuple[float, float]:
    """Generalized Fresnel integrals C{x,a} and S{x,a}.

    C{x,a} = int_0^x u^(a-1) cos(u) du,  S{x,a} = int_0^x u^(a-1) sin(u) du,
    for x >= 0 and 0 < a <= 1.  The endpoint singularity u^(a-1) at u = 0 is
    removed exactly by the substitution u = v^(1/a) before quadrature.
    """
    if not (np.isfinite(x) and np.isfinite(a)):
        raise ValueError("gen_fresnel: non-finite input")
    if x < 0:
        raise ValueError("gen_fresnel: x must be >= 0")
    if not (0.0 < a <= 1.0):
        raise ValueError("gen_fresnel: a must be in (0, 1]")
    return _gen_fresnel_any(x, a)


def _gen_fresnel_any(x: float, a: float) -> Tuple[float, float]:
    """gen_fresnel without the public-domain restriction on ``a``.

    The mainlobe closed forms need exponents a = 3/rho which exceed 1 for
    rho < 3; the integrand u^(a-1) is then bounded and the same transformed
    quadrature applies.
    """
    if x == 0.0:
        return 0.0, 0.0
    if a == 1.0:
        return float(np.sin(x)), float(1.0 - np.cos(x))
    # u = v^(1/a) maps u^(a-1) du -> dv / a exactly.
    inv_a = 1.0 / a
    upper = x**a
    limit = max(200, int(20 + upper / np.pi))
    c, _ = integrate.quad(lambda v: np.cos(v**inv_a), 0.0, upper, limit=limit)
    s, _ = integrate.quad(lambda v: np.sin(v**inv_a), 0.0, upper, limit=limit)
    return c / a, s / a


def bessel_j(n: int | np.ndarray, x: float | np.ndarray) -> np.ndarray:
    """Cylindrical Bessel function of the first kind J_n(x), integer order."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("bessel_j: non-finite input")
    return special.jv(n, x)


def gbf_grid_size(args: GbfArgs) -> int:
    """FFT grid length for gbf_mixed.

    The phase exponential's spectral extent is governed by the
    harmonic-index-weighted argument magnitudes sum_m m*(|a_m| + |b_m|) (the
    peak instantaneous harmonic rate), not the plain magnitude sum: a single
    harmonic at index m spreads Bessel orders out to ~m*(|arg| + tail).  The
    8x headroom plus a flat tail allowance keeps aliasing below ~1e-10.
    """
    m = np.arange(1, args.order + 1)
    rate = float(np.sum(m * (np.abs(args.a) + np.abs(args.b))))
    weight = max(8.0 * (args.order + rate) + 64.0, 4.0 * args.order + 128.0)
    return int(2 ** np.ceil(np.log2(weight)))


def gbf_mixed_all(args: GbfArgs) -> tuple[np.ndarray, np.ndarray]:
    """All available orders of the mixed-type GBF in one pass.

    Evaluates the n-th Fourier coefficient of
    exp{j [sum_m a_m sin(2 pi m theta) - b_m cos(2 pi m theta)]} over one
    period via an FFT.  Returns (orders, values) with orders symmetric about
    zero; the grid length follows gbf_grid_size so the aliasing error sits
    below ~1e-10.
    """
    n_grid = gbf_grid_size(args)
    theta = np.arange(n_grid) / n_grid
    m = np.arange(1, args.order + 1)[:, None]
    phase = args.a[:, None] * np.sin(2 * np.pi * m * theta) - args.b[:, None] * np.cos(
        2 * np.pi * m * theta
    )
    f = np.exp(1j * phase.sum(axis=0))
    # For f(theta) = sum_n c_n e^{+j 2 pi n theta}, FFT bin k holds N*c_n with
    # n the signed frequency of bin k.
    coeffs = np.fft.fft(f) / n_grid
    orders = np.fft.fftfreq(n_grid, d=1.0 / n_grid).astype(int)
    return orders, coeffs


def gbf_mixed(n: int, args: GbfArgs) -> complex:
    """Mixed-type generalized Bessel function of integer order n.

    Defined by the Jacobi-Anger type expansion
    exp{j [sum a_m sin(m psi) - b_m cos(m psi)]} = sum_n J^{1:M}_n e^{j n psi}.
    Reduces to J_n(x) for args (a=[x], b=[0]).
    """
    orders, coeffs = gbf_mixed_all(args)
    n_grid = orders.size
    if abs(n) > n_grid // 2 - 1:
        raise ValueError(
            f"gbf_mixed: order {n} outside the FFT grid (max {n_grid // 2 - 1}); "
            "increase the argument truncation"
        )
    idx = np.nonzero(orders == n)[0]
    return complex(coeffs[idx[0]])


def truncate_harmonics(
    a: Sequence[float], b: Sequence[float], rel_tol: float = 1e-9, m_cap: int = 512
) -> GbfArgs:
    """Default harmonic truncation for GBF arguments.

    Drops the tail once |a_m| + |b_m| falls below rel_tol times the largest
    combined magnitude, capped at m_cap harmonics.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    mag = np.abs(a) + np.abs(b)
    if mag.size == 0 or np.max(mag) == 0.0:
        return GbfArgs(a=np.zeros(1), b=np.zeros(1))
    keep = np.nonzero(mag >= rel_tol * np.max(mag))[0]
    m_last = min(int(keep[-1]) + 1, m_cap, a.size)
    return GbfArgs(a=a[:m_last], b=b[:m_last])
