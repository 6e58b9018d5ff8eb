"""Matplotlib rendering of bench results (BER curves per attack kind).

Imported only when figures are requested, so the core library never needs
a plotting backend.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import TITLES, summarize  # noqa: E402

STYLE = {"dp": dict(marker="o", color="tab:blue"), "normal": dict(marker="s", color="tab:orange")}
LABELS = {"dp": "DP (two-layer)", "normal": "Normal (8x8 layer)"}


def _x(params: str) -> float:
    # first numeric parameter: qf, k, var, pct or f
    return float(params.split(",")[0].split("=")[1])


def render_figures(records, outdir) -> list[Path]:
    """One PNG per attack kind; the JPEG one is ``jpeg_ber.png``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    curves = {}
    for s in summarize(records):
        if s.attack != "none":
            curves.setdefault(s.attack, {}).setdefault(s.method, []).append((_x(s.params), s.mean_ber, s.std_ber))

    paths = []
    for kind, by_method in curves.items():
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for method, pts in by_method.items():
            pts.sort()
            xs, ys, es = zip(*pts)
            ax.errorbar(xs, ys, yerr=es, capsize=3, label=LABELS.get(method, method), **STYLE.get(method, {}))
        if kind in ("gnoise",):
            ax.set_xscale("log")
        if kind == "jpeg":
            ax.invert_xaxis()
        ax.set_xlabel(TITLES.get(kind, kind))
        ax.set_ylabel("BER (%)")
        ax.set_ylim(bottom=0)
        ax.grid(alpha=0.3)
        ax.legend(frameon=False)
        fig.tight_layout()
        name = "jpeg_ber.png" if kind == "jpeg" else f"ber_{kind}.png"
        path = outdir / name
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths
