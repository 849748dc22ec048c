"""Line and heat-map images of scan results."""
from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .scan import ScanRecord, ScanSpec  # noqa: E402

__all__ = ["plot_scan"]


def _grid_values(spec, records, observable):
    shape = tuple(len(g) for g in spec.grids())
    z = np.full(shape, np.nan)
    for r in records:
        v = r.get(observable)
        if v is not None and not r.error:
            z[r.index] = v
    return z


def plot_scan(spec: ScanSpec, records: Sequence[ScanRecord], path,
              observable: str = "Pf") -> None:
    """One axis: a line; two axes: a heat map over the grid."""
    fig, ax = plt.subplots(figsize=(6, 4.2), dpi=120)
    z = _grid_values(spec, records, observable)
    a0 = spec.axes[0]
    x = np.array([r.values[a0.name] for r in records]).reshape(z.shape)
    if len(spec.axes) == 1:
        ax.plot(x, z, marker=".", lw=1)
        if a0.spacing == "log":
            ax.set_xscale("log")
        ax.set_xlabel(a0.name)
        ax.set_ylabel(observable)
    else:
        a1 = spec.axes[1]
        y = np.array([r.values[a1.name] for r in records]).reshape(z.shape)
        mesh = ax.pcolormesh(x, y, z, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label=observable)
        if a0.spacing == "log":
            ax.set_xscale("log")
        if a1.spacing == "log":
            ax.set_yscale("log")
        ax.set_xlabel(a0.name)
        ax.set_ylabel(a1.name)
    ax.set_title(spec.preset)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
