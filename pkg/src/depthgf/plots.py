"""Figure rendering for the CLI report paths.

Only the CLI imports this module (lazily), keeping matplotlib out of the
numeric core. Every function writes a PNG next to the delimited text output
it illustrates.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_spectrum_figure(
    path: str | Path,
    clean_table: np.ndarray,
    noisy_table: np.ndarray | None = None,
    band_fraction: float | None = None,
) -> Path:
    """Plot |spectral coefficient| against graph frequency (log magnitude)."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4))
    floor = 1e-12
    ax.semilogy(
        clean_table[:, 0],
        np.maximum(clean_table[:, 1], floor),
        lw=0.6,
        label="clean",
    )
    if noisy_table is not None:
        ax.semilogy(
            noisy_table[:, 0],
            np.maximum(noisy_table[:, 1], floor),
            lw=0.6,
            alpha=0.7,
            label="noisy",
        )
    if band_fraction is not None:
        edge_index = max(int(math.ceil(band_fraction * len(clean_table))) - 1, 0)
        ax.axvline(
            clean_table[edge_index, 0],
            color="gray",
            ls="--",
            lw=0.8,
            label=f"low-band edge ({band_fraction:g})",
        )
    ax.set_xlabel("graph frequency")
    ax.set_ylabel("|spectral coefficient|")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_filter_design_figure(path: str | Path, table: np.ndarray) -> Path:
    """Plot target response vs fitted polynomial over the fit grid."""
    path = Path(path)
    fig, (ax, ax_err) = plt.subplots(
        2, 1, figsize=(7, 5), sharex=True, height_ratios=[3, 1]
    )
    ax.plot(table[:, 0], table[:, 1], label="target response", lw=1.2)
    ax.plot(table[:, 0], table[:, 2], label="fitted polynomial", lw=1.0, ls="--")
    ax.set_ylabel("gain")
    ax.legend(loc="upper right")
    ax_err.plot(table[:, 0], table[:, 2] - table[:, 1], lw=0.8, color="firebrick")
    ax_err.axhline(0.0, color="gray", lw=0.5)
    ax_err.set_xlabel("graph frequency")
    ax_err.set_ylabel("error")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_benchmark_figures(out_dir: str | Path, report) -> list[Path]:
    """Render PSNR-vs-sigma curves and per-stage timing bars for a report."""
    out_dir = Path(out_dir)
    written: list[Path] = []
    ok_cells = [c for c in report.cells if c.status == "ok"]
    if not ok_cells:
        return written

    fig, ax = plt.subplots(figsize=(7, 4))
    names = sorted({c.image_name for c in ok_cells})
    for name in names:
        cells = sorted(
            (c for c in ok_cells if c.image_name == name), key=lambda c: c.sigma
        )
        sigmas = [c.sigma for c in cells]
        ax.plot(sigmas, [c.denoised_psnr for c in cells], "o-", label=f"{name} denoised")
        ax.plot(
            sigmas,
            [c.noisy_psnr for c in cells],
            "s--",
            alpha=0.6,
            label=f"{name} noisy",
        )
    ax.set_xlabel("noise standard deviation")
    ax.set_ylabel("PSNR (dB)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    psnr_path = out_dir / "psnr_vs_sigma.png"
    fig.savefig(psnr_path, dpi=150)
    plt.close(fig)
    written.append(psnr_path)

    fig, ax = plt.subplots(figsize=(7, 4))
    labels = [f"{c.image_name}\nsigma={c.sigma:g}" for c in ok_cells]
    x = np.arange(len(ok_cells))
    bottom = np.zeros(len(ok_cells))
    for stage, attr in (
        ("graph", "seconds_graph"),
        ("fit", "seconds_fit"),
        ("filter", "seconds_filter"),
    ):
        values = np.array([getattr(c, attr) for c in ok_cells])
        ax.bar(x, values, bottom=bottom, label=stage)
        bottom += values
    ax.set_xticks(x, labels, fontsize=7)
    ax.set_ylabel("seconds (median)")
    ax.legend()
    fig.tight_layout()
    timing_path = out_dir / "timing_stages.png"
    fig.savefig(timing_path, dpi=150)
    plt.close(fig)
    written.append(timing_path)
    return written
