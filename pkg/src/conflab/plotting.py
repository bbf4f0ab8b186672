"""Figure rendering for the command-line reports.

Everything drawn here is also available in the delimited output; figures
are a convenience layer on top of it, written next to the CSV they
illustrate.  The Agg backend keeps this usable in headless runs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .geodesic import GeodesicPath
from .quotient import EssentialityWitness


def plot_witness(witness: EssentialityWitness, out_path: str | Path) -> Path:
    """Decay of the Hausdorff distance against flow time, log scale, with
    the sampling resolution drawn as the floor of meaningful values."""
    out = Path(out_path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(witness.t_values, witness.distances, "o-", label="Hausdorff distance")
    ax.axhline(
        witness.resolution, color="gray", linestyle="--", label="sampling resolution"
    )
    ax.set_xlabel("flow time t")
    ax.set_ylabel("distance")
    ax.set_title(
        f"Box-to-segment contraction (grid {witness.grid_per_axis}, "
        f"window {witness.window})"
    )
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def plot_trajectory(path: GeodesicPath, out_path: str | Path) -> Path:
    """Coordinates along the parameter plus the null-norm drift; a third
    panel shows the projective parameter when the path carries one."""
    out = Path(out_path)
    panels = 3 if path.p is not None else 2
    fig, axes = plt.subplots(panels, 1, figsize=(6.5, 2.6 * panels), sharex=True)
    n = path.x.shape[1]
    for i in range(n):
        axes[0].plot(path.s, path.x[:, i], label=f"x{i + 1}")
    axes[0].set_ylabel("coordinates")
    axes[0].legend(ncol=min(n, 4), fontsize="small")
    drift = path.null_norm - path.null_norm[0]
    axes[1].plot(path.s, drift, color="tab:red")
    axes[1].set_ylabel("norm drift")
    if path.p is not None:
        axes[2].plot(path.s, path.p, color="tab:green")
        axes[2].set_ylabel("projective p")
        for idx in path.chart_ends:
            axes[2].axvline(path.s[idx], color="gray", linestyle=":")
    axes[-1].set_xlabel("affine parameter s")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
