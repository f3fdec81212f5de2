"""Figure rendering for the CLI report paths.

Every CSV-emitting command renders a companion PNG next to its delimited
output; these helpers own the matplotlib side so the numerics modules stay
plot-free.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FLOOR_DB = -60.0


def render_surface(surface, path: str, floor_db: float = FLOOR_DB, title: str = ""):
    db = surface.db(floor=floor_db)
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    pcm = ax.pcolormesh(
        surface.delay * 1e3,
        surface.velocity,
        db,
        cmap="viridis",
        vmin=floor_db,
        vmax=0.0,
        shading="auto",
    )
    fig.colorbar(pcm, ax=ax, label="|chi| (dB)")
    ax.set_xlabel("delay (ms)")
    ax.set_ylabel("velocity (m/s)")
    ax.set_title(title or surface.label)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_curve(x, y, path: str, xlabel: str, ylabel: str, title: str = ""):
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(x, y, lw=1.2)
    ax.grid(True, alpha=0.3)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_sweep(result, path: str, title: str = ""):
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    pcm = ax.pcolormesh(result.cycles, result.rho, result.psl_db, cmap="magma", shading="auto")
    fig.colorbar(pcm, ax=ax, label="PSL (dB)")
    ax.plot(result.best_cycles, result.best_rho, "c*", ms=12, mec="k")
    ax.set_xlabel("cycles C")
    ax.set_ylabel("rho")
    ax.set_title(title or f"PSL sweep, TBP={result.tbp:g}")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_spectrogram(t, f, power_db, path: str, title: str = ""):
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    pcm = ax.pcolormesh(t, f, power_db, cmap="viridis", shading="auto")
    fig.colorbar(pcm, ax=ax, label="power (dB)")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("frequency (Hz)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_revisit(out, revisit: int, path: str, floor_db: float = -80.0, title: str = ""):
    mat = out.revisits[revisit]
    db = 20.0 * np.log10(np.maximum(mat / mat.max(), 10 ** (floor_db / 20.0)))
    fig, ax = plt.subplots(figsize=(7.5, 4.2))
    pcm = ax.pcolormesh(out.delays, out.velocities, db, cmap="viridis",
                        vmin=floor_db, vmax=0.0, shading="auto")
    fig.colorbar(pcm, ax=ax, label="output (dB)")
    ax.set_xlabel("delay (s)")
    ax.set_ylabel("velocity (m/s)")
    ax.set_title(title or f"{out.strategy} revisit {revisit}")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
