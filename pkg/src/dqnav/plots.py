"""Figure rendering for run reports (file output only, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_STATE_PANELS = [
    ("attitude quaternion", slice(0, 4), ["qw", "qx", "qy", "qz"], ""),
    ("relative position", slice(4, 7), ["rx", "ry", "rz"], "m"),
    ("angular velocity", slice(7, 10), ["wx", "wy", "wz"], "rad/s"),
    ("translational velocity", slice(10, 13), ["vx", "vy", "vz"], "m/s"),
]


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def render_state_figure(report, out_dir: Path) -> Path:
    fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
    for ax, (title, cols, labels, unit) in zip(axes.flat, _STATE_PANELS):
        for j, label in enumerate(labels):
            ax.plot(report.times, report.states[:, cols][:, j], label=label, lw=1.0)
        ax.set_title(title)
        ax.set_ylabel(unit)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8, ncol=2)
    for ax in axes[-1]:
        ax.set_xlabel("t [s]")
    fig.suptitle("relative state")
    fig.tight_layout()
    return _save(fig, out_dir / "states.png")


def render_measurement_figure(report, out_dir: Path) -> Path:
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
    labels_r = ["y_rw", "y_rx", "y_ry", "y_rz"]
    labels_d = ["y_dw", "y_dx", "y_dy", "y_dz"]
    for j, label in enumerate(labels_r):
        axes[0].plot(report.times, report.measurements[:, j], label=label, lw=1.0)
    for j, label in enumerate(labels_d):
        axes[1].plot(report.times, report.measurements[:, 4 + j], label=label, lw=1.0)
    axes[0].set_title("measurement, real part")
    axes[1].set_title("measurement, dual part")
    for ax in axes:
        ax.set_xlabel("t [s]")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8, ncol=2)
    fig.tight_layout()
    return _save(fig, out_dir / "measurement.png")


def render_singular_value_figure(report, out_dir: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for epoch in report.epochs:
        ax.semilogy(
            np.arange(1, len(epoch.report.singular_values) + 1),
            epoch.report.singular_values,
            marker="o", ms=4, lw=1.0,
            label=f"t = {epoch.time:g} s (rank {epoch.report.numeric_rank})",
        )
    ax.set_xlabel("singular value index")
    ax.set_ylabel("sigma")
    ax.set_title("observability matrix spectrum per epoch")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, out_dir / "singular_values.png")


def render_gramian_figure(report, out_dir: Path) -> Path:
    eigs = report.gramian.eigenvalues[::-1]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogy(np.arange(1, len(eigs) + 1), np.maximum(eigs, 1e-300), marker="s", ms=4, lw=1.0)
    ax.set_xlabel("eigenvalue index")
    ax.set_ylabel("eigenvalue")
    ax.set_title(
        f"empirical gramian spectrum (horizon {report.gramian.horizon:g} s, "
        f"rank {report.gramian.numeric_rank()})"
    )
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return _save(fig, out_dir / "gramian.png")


def render_run_figures(report, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    written = [
        render_state_figure(report, out_dir),
        render_measurement_figure(report, out_dir),
    ]
    if report.epochs:
        written.append(render_singular_value_figure(report, out_dir))
    if report.gramian is not None:
        written.append(render_gramian_figure(report, out_dir))
    return written


def render_sweep_figure(sweep, out_dir) -> Path:
    out_dir = Path(out_dir)
    ratios = sweep.sigma_min / sweep.sigma_max
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.hist(np.log10(ratios), bins=40, color="tab:blue", alpha=0.8)
    ax.set_xlabel("log10(sigma_min / sigma_max)")
    ax.set_ylabel("samples")
    ax.set_title(
        f"rank sweep: {sweep.full_rank_count}/{sweep.samples} full rank "
        f"(tol {sweep.rank_tol:g})"
    )
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save(fig, out_dir / "sweep.png")
