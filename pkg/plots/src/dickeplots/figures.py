"""The five figure kinds, all reading pre-computed artifacts only."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from dickeplots.tables import (
    ContributionArtifact,
    SpectrumArtifact,
    SweepArtifact,
    DynamicsArtifact,
)

PNG_METADATA = {"Software": "dickeplots"}


def save(fig, output: str, dpi: int = 150) -> None:
    fig.savefig(output, dpi=dpi, metadata=PNG_METADATA)
    plt.close(fig)


def heatmap(sweep: SweepArtifact, output: str, axes: dict | None = None) -> None:
    """Lifetime map: -Re lambda_1 over the (drive, broadening) grid."""
    axes = axes or {}
    rates = sweep.grid_rates()
    fig, ax = plt.subplots(figsize=(5.0, 3.8), constrained_layout=True)
    mesh = ax.pcolormesh(
        sweep.drives, sweep.half_widths, rates, shading="nearest", cmap="inferno"
    )
    ax.set_xscale(axes.get("xscale", "log"))
    ax.set_xlabel("drive / decay rate")
    ax.set_ylabel("broadening / decay rate")
    fig.colorbar(mesh, ax=ax, label="slowest nonzero decay rate")
    save(fig, output)


def scatter(spec: SpectrumArtifact, output: str, axes: dict | None = None) -> None:
    """Eigenvalues in the complex plane with the near-zero cluster marked."""
    axes = axes or {}
    vals = spec.eigenvalues
    near = -vals.real < spec.threshold
    fig, ax = plt.subplots(figsize=(5.0, 3.8), constrained_layout=True)
    ax.scatter(vals.real[~near], vals.imag[~near], s=14, c="#707070", label="bulk")
    ax.scatter(
        vals.real[near],
        vals.imag[near],
        s=26,
        c="#c62828",
        marker="o",
        label=f"near-zero cluster ({int(near.sum())})",
    )
    ax.axvline(0.0, lw=0.5, color="k")
    ax.axhline(0.0, lw=0.5, color="k")
    ax.set_xlabel("Re eigenvalue / decay rate")
    ax.set_ylabel("Im eigenvalue / decay rate")
    if "xlim" in axes:
        ax.set_xlim(axes["xlim"])
    if "ylim" in axes:
        ax.set_ylim(axes["ylim"])
    ax.legend(loc="upper left", fontsize=8)
    save(fig, output)


def continue_branches(rows: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Order eigenvalues into branches by nearest-neighbour continuation.

    Returns (branches, jumps): branches[k, i] is branch k at grid index i;
    jumps marks continuation distances far beyond the local scale, where a
    crossing could not be followed reliably.
    """
    count = min(len(r) for r in rows)
    branches = np.zeros((count, len(rows)), dtype=complex)
    branches[:, 0] = rows[0][:count]
    jumps = np.zeros_like(branches, dtype=bool)
    for i, row in enumerate(rows[1:], start=1):
        pool = list(row)
        scale = max(np.abs(np.diff(branches[:, i - 1])).max(initial=0.0), 1e-6)
        for k in range(count):
            prev = branches[k, i - 1]
            dist = [abs(prev - v) for v in pool]
            pick = int(np.argmin(dist))
            branches[k, i] = pool.pop(pick)
            jumps[k, i] = dist[pick] > 5.0 * scale
    return branches, jumps


def branches(
    sweep: SweepArtifact, output: str, axes: dict | None = None
) -> None:
    """Decay-rate branches against drive at one broadening value."""
    axes = axes or {}
    half_width = float(axes.get("half_width", sweep.half_widths[0]))
    rows = sweep.eigenvalue_rows(half_width)
    lines, jumps = continue_branches(rows)
    fig, ax = plt.subplots(figsize=(5.0, 3.8), constrained_layout=True)
    for k in range(lines.shape[0]):
        rates = -lines[k].real
        ax.plot(sweep.drives, rates, lw=1.0)
        bad = jumps[k]
        if bad.any():
            ax.plot(
                sweep.drives[bad], rates[bad], "x", ms=5, c="k", label="_joints"
            )
    ax.set_xscale("log")
    ax.set_yscale(axes.get("yscale", "log"))
    ax.set_xlabel("drive / decay rate")
    ax.set_ylabel("decay rate of eigenvalue branch")
    ax.set_title(f"broadening = {half_width:g}")
    save(fig, output)


def timeseries(
    dynamics: DynamicsArtifact, output: str, axes: dict | None = None
) -> None:
    """|correlation| against time for every recorded pair."""
    axes = axes or {}
    t = dynamics.table["t"]
    fig, ax = plt.subplots(figsize=(5.4, 3.8), constrained_layout=True)
    for pair in dynamics.pairs:
        ax.plot(t, dynamics.magnitude(pair), lw=1.0, label=f"({pair[0]},{pair[1]})")
    ax.set_xscale("log")
    ax.set_yscale(axes.get("yscale", "log"))
    ax.set_xlabel("time x decay rate")
    ax.set_ylabel("|two-point correlation|")
    ax.legend(fontsize=7, ncols=2)
    save(fig, output)


def contribution_grid(
    contrib: ContributionArtifact, output: str, axes: dict | None = None
) -> None:
    """Per-eigenvector observable magnitudes as a labelled grid."""
    fig, ax = plt.subplots(figsize=(5.4, 4.2), constrained_layout=True)
    mesh = ax.imshow(contrib.magnitudes, aspect="auto", cmap="viridis")
    ax.set_xticks(range(len(contrib.pairs)))
    ax.set_xticklabels([f"({a},{b})" for a, b in contrib.pairs], fontsize=7)
    ax.set_yticks(range(contrib.magnitudes.shape[0]))
    ax.set_yticklabels(
        [f"{-v.real:.2e}" for v in contrib.eigenvalues], fontsize=6
    )
    ax.set_xlabel("atom pair")
    ax.set_ylabel("eigenmode decay rate")
    fig.colorbar(mesh, ax=ax, label="|correlation| of eigenmode")
    save(fig, output)
