"""Figures written next to the CLI's JSON/CSV output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "savefig.dpi": 150,
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_comparison_rows(self_row: np.ndarray, cross_row: np.ndarray, n: int, path, title: str = "") -> Path:
    """Side-by-side n x n match maps for one reference pair: self table and cross table.

    Rows index the first vertex of the compared pair, columns the second; a
    filled cell is a match.
    """
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, 2, figsize=(7, 3.4))
        for ax, row, label in zip(axes, (self_row, cross_row), ("A vs A", "A vs B")):
            grid = np.asarray(row, dtype=float).reshape(n, n)
            ax.imshow(grid, cmap="Greys", vmin=0, vmax=1, interpolation="nearest")
            ax.set_title(f"{label}: {int(grid.sum())} matches")
            ax.set_xlabel("second reference vertex")
            ax.set_ylabel("first reference vertex")
        if title:
            fig.suptitle(title)
        return _save(fig, path)


def plot_traces(values: np.ndarray, path, labels=None, title: str = "") -> Path:
    """Real and imaginary parts of a few amplitude traces against step."""
    values = np.atleast_2d(values)
    steps = np.arange(1, values.shape[1] + 1)
    with plt.rc_context(_RC):
        fig, (ax_re, ax_im) = plt.subplots(2, 1, figsize=(6, 4), sharex=True)
        for i, vals in enumerate(values):
            lab = None if labels is None else labels[i]
            ax_re.plot(steps, vals.real, marker=".", lw=1, label=lab)
            ax_im.plot(steps, vals.imag, marker=".", lw=1)
        ax_re.set_ylabel("Re amplitude")
        ax_im.set_ylabel("Im amplitude")
        ax_im.set_xlabel("step")
        if labels is not None:
            ax_re.legend(loc="best")
        if title:
            ax_re.set_title(title)
        return _save(fig, path)


def plot_detection_curves(m, exact, approx, p: float, path) -> Path:
    with plt.rc_context(_RC):
        fig, (ax, ax_d) = plt.subplots(2, 1, figsize=(6, 4.4), sharex=True,
                                       gridspec_kw={"height_ratios": [3, 1]})
        ax.plot(m, exact, lw=1.5, label="exact geometric")
        ax.plot(m, approx, lw=1, ls="--", label=r"$1-e^{-m/p}$")
        ax.set_ylabel("P(detection within m)")
        ax.set_title(f"p = {p:g}")
        ax.legend(loc="lower right")
        ax_d.plot(m, np.asarray(exact) - np.asarray(approx), lw=1, color="k")
        ax_d.axhline(0, color="0.7", lw=0.5)
        ax_d.set_xlabel("m")
        ax_d.set_ylabel("difference")
        return _save(fig, path)


def plot_certificates(certificates, path, title: str = "") -> Path:
    """Certificate value per input graph; shared values show up as flat runs."""
    certs = np.asarray([c if c is not None else np.nan for c in certificates], dtype=float)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 3))
        ax.plot(np.arange(1, len(certs) + 1), certs, ls="none", marker="o", ms=3)
        ax.set_xlabel("input line")
        ax.set_ylabel("certificate")
        if title:
            ax.set_title(title)
        return _save(fig, path)
