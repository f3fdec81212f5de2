"""Scalar figures of merit: peak sidelobe level, mainlobe widths, Q-function
notch depth, Carson bandwidth estimates, and the (cycles, rho) PSL sweep.

PSLs are reported as signed dB relative to the mainlobe peak (negative for
auto surfaces); published tables that print them as positive magnitudes are
the same numbers with the sign dropped.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy import ndimage

from .ambiguity import BROADBAND, AmbiguitySurface, xaf
from .mainlobe import _crossing_width
from .wavegen import GsfmParams, SfmParams, gen_gsfm


@dataclass(frozen=True)
class PslReport:
    psl_db: float
    psl_delay: float
    psl_velocity: float
    width_delay: float
    width_doppler: float
    mainlobe_cells: int

    def __post_init__(self):
        if self.width_delay <= 0 or self.width_doppler <= 0:
            raise ValueError("mainlobe widths must be positive")


def _mainlobe_mask(surface: AmbiguitySurface, dilate: int = 2) -> np.ndarray:
    """Mainlobe exclusion region for sidelobe measurements.

    Starts from the -3 dB superlevel connected component containing the
    origin, then floods outward along monotone descent so the whole skirt
    down to the enclosing null ring is excluded, and finally dilates by a
    fixed cell count.  A cell-count dilation alone is resolution-dependent:
    on fine grids it ends on the mainlobe skirt, which then masquerades as
    the peak sidelobe.
    """
    mag = surface.mag / surface.mag.max()
    above = mag >= 10.0 ** (-3.0 / 20.0)
    structure = ndimage.generate_binary_structure(2, 2)
    labels, _ = ndimage.label(above, structure=structure)
    i0 = int(np.argmin(np.abs(surface.velocity)))
    j0 = int(np.argmin(np.abs(surface.delay)))
    lobe = labels == labels[i0, j0]
    if (
        lobe[0, :].any()
        or lobe[-1, :].any()
        or lobe[:, 0].any()
        or lobe[:, -1].any()
    ):
        raise ValueError("-3 dB mainlobe touches the grid boundary (grid too small)")
    mask = lobe | _ascent_basin(mag)
    return ndimage.binary_dilation(mask, structure=structure, iterations=dilate)


def _ascent_basin(mag: np.ndarray) -> np.ndarray:
    """Cells whose steepest-ascent path terminates at the global peak.

    This is the watershed basin of the mainlobe: it covers the skirt exactly
    to the enclosing ridge/null ring at any grid resolution, while every
    sidelobe peak keeps its own basin and stays measurable.
    """
    nv, nd = mag.shape
    padded = np.full((nv + 2, nd + 2), -np.inf)
    padded[1:-1, 1:-1] = mag
    idx = np.arange(nv * nd).reshape(nv, nd)
    best_val = mag.copy()
    parent = idx.copy()
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            nb = padded[1 + di : 1 + di + nv, 1 + dj : 1 + dj + nd]
            take = nb > best_val
            if take.any():
                ii, jj = np.nonzero(take)
                best_val[ii, jj] = nb[ii, jj]
                parent[ii, jj] = idx[
                    np.clip(ii + di, 0, nv - 1), np.clip(jj + dj, 0, nd - 1)
                ]
    parent = parent.ravel()
    for _ in range(40):  # pointer doubling: paths longer than 2^40 impossible
        hop = parent[parent]
        if np.array_equal(hop, parent):
            break
        parent = hop
    peak = int(np.argmax(mag))
    return (parent == parent[peak]).reshape(nv, nd)


def psl(surface: AmbiguitySurface) -> PslReport:
    """Peak sidelobe level of an auto surface with the mainlobe at the origin."""
    if not surface.auto:
        raise ValueError("PSL is defined for auto (or matched-pair CAF) surfaces")
    return caf_psl(surface)


def caf_psl(surface: AmbiguitySurface) -> PslReport:
    """PSL machinery shared by auto surfaces and mismatched-filter CAFs."""
    mask = _mainlobe_mask(surface)
    mag = surface.mag / surface.mag.max()
    side = np.where(mask, 0.0, mag)
    iv, it = np.unravel_index(int(np.argmax(side)), side.shape)
    psl_db = 20.0 * np.log10(max(side[iv, it], 1e-12))
    return PslReport(
        psl_db=float(psl_db),
        psl_delay=float(surface.delay[it]),
        psl_velocity=float(surface.velocity[iv]),
        width_delay=mainlobe_width(surface, "delay"),
        width_doppler=mainlobe_width(surface, "doppler"),
        mainlobe_cells=int(mask.sum()),
    )


def mainlobe_width(
    surface: AmbiguitySurface, axis: str, level_db: float = -3.0
) -> float:
    """Linear-interpolated width of the mainlobe cut at the stated level.

    axis='delay' cuts along delay through the peak velocity row;
    axis='doppler' cuts along velocity (m/s) through the zero-delay column.
    """
    mag = surface.mag / surface.mag.max()
    thr = 10.0 ** (level_db / 20.0)
    iv, it = np.unravel_index(int(np.argmax(mag)), mag.shape)
    if axis == "delay":
        return _crossing_width(surface.delay, mag[iv, :], thr)
    if axis == "doppler":
        return _crossing_width(surface.velocity, mag[:, it], thr)
    raise ValueError("axis must be 'delay' or 'doppler'")


@dataclass(frozen=True)
class SweepResult:
    rho: np.ndarray
    cycles: np.ndarray
    psl_db: np.ndarray  # (rho, cycles)
    best_rho: float
    best_cycles: float
    best_psl_db: float
    tbp: float


def psl_sweep(
    base: GsfmParams,
    cycles_grid: Sequence[float],
    rho_grid: Sequence[float],
    model: str = BROADBAND,
    velocities: np.ndarray | None = None,
    c: float = 1500.0,
) -> SweepResult:
    """PSL over the (cycles, rho) design plane for a fixed (T, f_c, sweep).

    Ties at the minimum break deterministically toward the smallest rho, then
    the smallest cycle count.
    """
    rho_grid = np.asarray(sorted(rho_grid), float)
    cycles_grid = np.asarray(sorted(cycles_grid), float)
    if velocities is None:
        velocities = np.arange(-20.0, 20.0 + 0.5, 0.5)
    out = np.empty((rho_grid.size, cycles_grid.size))
    for i, rho in enumerate(rho_grid):
        for j, cyc in enumerate(cycles_grid):
            p = replace(base, rho=float(rho), cycles=float(cyc), alpha=None)
            w = gen_gsfm(p)
            surf = xaf(w, w, model=model, velocities=velocities, c=c)
            out[i, j] = psl(surf).psl_db
    flat = np.round(out, 12)
    best = np.min(flat)
    ties = np.argwhere(flat == best)
    i_best, j_best = min((int(i), int(j)) for i, j in ties)
    return SweepResult(
        rho=rho_grid,
        cycles=cycles_grid,
        psl_db=out,
        best_rho=float(rho_grid[i_best]),
        best_cycles=float(cycles_grid[j_best]),
        best_psl_db=float(out[i_best, j_best]),
        tbp=base.duration * base.sweep,
    )


def sweep_to_csv(res: SweepResult) -> str:
    buf = io.StringIO()
    buf.write("rho,cycles,tbp,psl_db\n")
    for i, rho in enumerate(res.rho):
        for j, cyc in enumerate(res.cycles):
            buf.write(f"{rho:.6g},{cyc:.6g},{res.tbp:.6g},{res.psl_db[i, j]:.4f}\n")
    return buf.getvalue()


def sweep_summary(res: SweepResult) -> str:
    return json.dumps(
        {
            "tbp": res.tbp,
            "best_rho": res.best_rho,
            "best_cycles": res.best_cycles,
            "best_psl_db": res.best_psl_db,
            "rho_grid": res.rho.tolist(),
            "cycles_grid": res.cycles.tolist(),
        },
        indent=2,
    )


def notch_depth(
    velocities: np.ndarray, q_db: np.ndarray, v_exclude: float = 1.0
) -> tuple[float, float]:
    """Q-function notch depth: median level beyond the exclusion speed minus
    the minimum there; returns (depth_db, velocity_of_minimum)."""
    velocities = np.asarray(velocities, float)
    q_db = np.asarray(q_db, float)
    outside = np.abs(velocities) > v_exclude
    if not outside.any():
        raise ValueError("velocity grid does not extend beyond v_exclude")
    med = float(np.median(q_db[outside]))
    i_min = int(np.argmin(np.where(outside, q_db, np.inf)))
    return med - float(q_db[i_min]), float(velocities[i_min])


def carson_bandwidth(spec: SfmParams | GsfmParams) -> float:
    """Carson 98%-bandwidth estimate Delta_f + 2 B_m.

    For the GSFM, B_m = alpha rho T^(rho-1) (the IF's own peak rate); at
    rho = 1 this is Delta_f + 2 f_m.  (One printed statement of the SFM rule
    reads Delta_f + f_m, which contradicts the general 2(beta+1) B_m form it
    abbreviates; the factor-2 version is implemented.)
    """
    if isinstance(spec, SfmParams):
        return spec.sweep + 2.0 * spec.mod_freq
    return spec.sweep + 2.0 * spec.alpha * spec.rho * spec.duration ** (spec.rho - 1.0)


def thumbtack_average_sidelobe(duration: float, sweep: float) -> float:
    """Uniform-volume average sidelobe power 1/(4 T B) for a thumbtack AF."""
    return 1.0 / (4.0 * duration * sweep)
