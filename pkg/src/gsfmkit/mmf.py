"""Mismatched-filter design and evaluation.

The filter is the matched replica tapered in frequency (Kaiser, about the
spectral centroid) to pull down delay sidelobes, then in time (Tukey) for
Doppler sidelobes, renormalized to unit energy so the SNRL reported by
mmf_report isolates shape mismatch.
"""

from __future__ import annotations

import io
import json
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .ambiguity import BROADBAND, xaf
from .metrics import caf_psl, mainlobe_width, psl
from .sigcore import TaperSpec, Waveform, apply_taper, normalize_energy


@dataclass(frozen=True)
class MmfReport:
    psl_db: float
    snrl_db: float
    widen_delay: float
    widen_doppler: float
    widen_product: float
    alpha_k: float | None = None
    alpha_t: float | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def design_mmf(
    w: Waveform, alpha_k: float, alpha_t: float, span_factor: float = 1.6
) -> Waveform:
    """Kaiser-in-frequency then Tukey-in-time tapered replica, unit energy.

    The Kaiser window spans span_factor times the occupied 99.9% band about
    the spectral centroid; for a rectangular-tapered GSFM the default of 1.6
    puts the support at roughly [f_c - sweep, f_c + sweep], leaving the
    mid-band nearly flat and rolling off the band edges.  (A window confined
    to the occupied band itself guts the GSFM's edge-concentrated spectrum:
    alpha_K = 14 then costs ~4 dB of SNR instead of ~1 dB.)  alpha_k =
    alpha_t = 0 returns the matched filter unchanged.
    """
    if alpha_k < 0.0 or not (0.0 <= alpha_t <= 1.0):
        raise ValueError("need alpha_k >= 0 and alpha_t in [0, 1]")
    out = w
    if alpha_k > 0.0:
        out = apply_taper(out, TaperSpec("kaiser", alpha_k), "frequency", span_factor)
    if alpha_t > 0.0:
        out = apply_taper(out, TaperSpec("tukey", alpha_t), "time")
    out = normalize_energy(out)
    return out.with_samples(out.samples, label=f"{w.label}-mmf(k={alpha_k:g},t={alpha_t:g})")


def mmf_report(
    w: Waveform,
    filt: Waveform,
    model: str = BROADBAND,
    velocities: np.ndarray | None = None,
    c: float = 1500.0,
    mf_baseline=None,
) -> MmfReport:
    """Cross-AF figures of the waveform against a detection filter.

    SNRL is the mainlobe-peak reduction -20 log10 |chi(0, v=0)|.  Widths are
    ratios to the matched-filter baseline; the Doppler cut is re-measured on
    a dedicated fine velocity grid because the lobe is far narrower than the
    default surface rows.
    """
    caf = xaf(w, filt, model=model, velocities=velocities, c=c)
    i0 = int(np.argmin(np.abs(caf.velocity)))
    j0 = int(np.argmin(np.abs(caf.delay)))
    snrl = -20.0 * np.log10(max(caf.mag[i0, j0], 1e-12))
    rep = caf_psl(caf)
    fine_v = np.arange(-2.0, 2.0 + 1e-9, 0.02)
    span = 8.0 * rep.width_delay
    caf_f = xaf(w, filt, model=model, velocities=fine_v, c=c, max_delay=span)
    mf_f = xaf(w, w, model=model, velocities=fine_v, c=c, max_delay=span)
    wd = mainlobe_width(caf_f, "delay") / mainlobe_width(mf_f, "delay")
    wv = mainlobe_width(caf_f, "doppler") / mainlobe_width(mf_f, "doppler")
    return MmfReport(
        psl_db=rep.psl_db,
        snrl_db=float(snrl),
        widen_delay=float(wd),
        widen_doppler=float(wv),
        widen_product=float(wd * wv),
    )


def mmf_grid_search(
    w: Waveform,
    alpha_ks: Sequence[float] | None = None,
    alpha_ts: Sequence[float] | None = None,
    model: str = BROADBAND,
    velocities: np.ndarray | None = None,
    c: float = 1500.0,
) -> tuple[MmfReport, list[MmfReport]]:
    """Minimum-PSL (alpha_K, alpha_T) over a design grid.

    Defaults follow the published table methodology: alpha_K in 0..20 step 2,
    alpha_T in 0..1 step 0.1.  Returns (best, full trace); ties break toward
    the smaller SNRL.
    """
    alpha_ks = np.arange(0.0, 20.0 + 1e-9, 2.0) if alpha_ks is None else alpha_ks
    alpha_ts = np.arange(0.0, 1.0 + 1e-9, 0.1) if alpha_ts is None else alpha_ts
    mf = xaf(w, w, model=model, velocities=velocities, c=c)
    trace: list[MmfReport] = []
    for ak in alpha_ks:
        for at in alpha_ts:
            filt = design_mmf(w, float(ak), float(at))
            rep = mmf_report(w, filt, model=model, velocities=velocities, c=c, mf_baseline=mf)
            trace.append(
                MmfReport(
                    psl_db=rep.psl_db,
                    snrl_db=rep.snrl_db,
                    widen_delay=rep.widen_delay,
                    widen_doppler=rep.widen_doppler,
                    widen_product=rep.widen_product,
                    alpha_k=float(ak),
                    alpha_t=float(at),
                )
            )
    best = min(trace, key=lambda r: (r.psl_db, r.snrl_db))
    return best, trace


def trace_to_csv(trace: Sequence[MmfReport]) -> str:
    buf = io.StringIO()
    buf.write("alpha_k,alpha_t,psl_db,snrl_db,widen_delay,widen_doppler\n")
    for r in trace:
        buf.write(
            f"{r.alpha_k:g},{r.alpha_t:g},{r.psl_db:.4f},{r.snrl_db:.4f},"
            f"{r.widen_delay:.4f},{r.widen_doppler:.4f}\n"
        )
    return buf.getvalue()
