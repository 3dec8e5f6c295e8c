"""Matplotlib figures written next to the CLI's JSON/CSV reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .channel import BmsChannel  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.dpi": 120,
}


def _new(width=4.5, height=3.6):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(width, height))
    return fig, ax


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _cdf_xy(W: BmsChannel):
    order = np.argsort(W.x, kind="stable")
    xs = np.concatenate(([0.0], W.x[order], [1.0]))
    ys = np.concatenate(([0.0], np.cumsum(W.mass[order]), [1.0]))
    return xs, ys


def plot_quantization(W: BmsChannel, D: BmsChannel, U: BmsChannel, pavement, path):
    """Tile picture: cdf of ``W`` in entropy coordinates, pavement shaded, D and U staircases."""
    n = pavement.n
    fig, ax = _new(4.2, 4.2)
    for a, r in pavement.tiles():
        ax.add_patch(plt.Rectangle((a / n, r / n), 1 / n, 1 / n, color="0.88", zorder=0))
    ticks = np.linspace(0, 1, n + 1)
    ax.set_xticks(ticks)
    ax.set_yticks(ticks)
    ax.grid(True, linestyle=":", color="0.6")
    for ch, color, label, lw in ((D, "saddlebrown", "D", 1.2), (U, "teal", "U", 1.2), (W, "firebrick", "W", 2.0)):
        xs, ys = _cdf_xy(ch)
        ax.step(xs, ys, where="post", color=color, lw=lw, label=f"{label}  H={ch.entropy:.3f}")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.02)
    ax.set_xlabel("x = h2(p)")
    ax.set_ylabel("cdf")
    ax.set_title(f"n = {n}, pavement {pavement.steps}")
    ax.legend(loc="lower right")
    return _save(fig, path)


def plot_simulation(report, path):
    """Per-level good/bad fractions with their brackets, plus mean entropies."""
    lv = [s.level for s in report.levels]
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(8, 3.4))
    good = np.array([s.good for s in report.levels])
    good_hi = np.array([s.good_upper for s in report.levels])
    bad = np.array([s.bad for s in report.levels])
    bad_hi = np.array([s.bad_upper for s in report.levels])
    ax.fill_between(lv, good, good_hi, color="tab:green", alpha=0.25)
    ax.plot(lv, good, "o-", color="tab:green", label=f"H(D) < {report.delta:g}")
    ax.fill_between(lv, bad, bad_hi, color="tab:red", alpha=0.25)
    ax.plot(lv, bad, "s-", color="tab:red", label=f"H(U) > 1 - {report.delta:g}")
    ax.set_xlabel("level")
    ax.set_ylabel("fraction of leaves")
    ax.set_ylim(0, 1)
    ax.legend()
    ax2.plot(lv, [s.mean_H_D for s in report.levels], "v-", label="mean H(D)")
    ax2.plot(lv, [s.mean_H_U for s in report.levels], "^-", label="mean H(U)")
    ax2.set_xlabel("level")
    ax2.set_ylabel("bits")
    ax2.legend()
    fig.suptitle(f"ell = {report.ell}, grid n = {report.n}")
    return _save(fig, path)


def plot_exponents(e0_rows, er_rows, capacity: float, path):
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(8, 3.2))
    r, e = zip(*e0_rows)
    ax.plot(r, e, color="tab:blue")
    ax.plot([0, max(r)], [0, capacity * max(r)], "--", color="0.5", lw=0.8, label="slope I(W)")
    ax.set_xlabel("rho")
    ax.set_ylabel("E0 (bits)")
    ax.legend()
    R, er = zip(*er_rows)
    ax2.plot(R, er, color="tab:orange")
    ax2.axvline(capacity, color="0.5", ls=":", lw=0.8)
    ax2.set_xlabel("rate")
    ax2.set_ylabel("Er (bits)")
    return _save(fig, path)


def plot_bounds(rows, path):
    """Kernel-count scaling ``ell^(3/mu-1)`` against ``ell``, one line per mu."""
    fig, ax = _new(4.8, 3.4)
    for mu in sorted({r["mu"] for r in rows}):
        sel = sorted((r for r in rows if r["mu"] == mu), key=lambda r: r["ell"])
        ax.loglog([r["ell"] for r in sel], [r["scaling"] for r in sel], "o-", label=f"mu = {mu:g}")
    ax.set_xlabel("kernel size ell")
    ax.set_ylabel("ell^(3/mu - 1)")
    ax.legend()
    return _save(fig, path)


def plot_badness(matrix, selected, path):
    fig, ax = _new(6.0, 2.4 + 0.15 * len(matrix.bundles))
    ax.imshow(matrix.bad, aspect="auto", cmap="Greys", interpolation="nearest")
    for k in selected:
        ax.axvline(k, color="tab:red", lw=0.8)
    ax.set_yticks(range(len(matrix.bundles)))
    ax.set_yticklabels(matrix.bundles, fontsize=6)
    ax.set_xlabel("kernel index (red: selected)")
    ax.set_ylabel("bundle")
    return _save(fig, path)
