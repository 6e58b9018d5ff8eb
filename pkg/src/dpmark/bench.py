"""Embed -> attack -> extract -> measure over an image set, and report it.

A suite produces one no-attack record per (image, method), carrying the
embedding PSNR and the clean round-trip BER, and one record per
(image, attack, method).
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import watermark as wm
from .attacks import parse_attack_list
from .pixelcore import PgmError, binarize, ber, format_db, psnr, read_pgm, write_pgm
from .samples import default_logo

log = logging.getLogger(__name__)

METHODS = ("dp", "normal")
CSV_COLUMNS = ["image", "method", "attack", "params", "ber_percent", "psnr_embed_db", "psnr_attack_db", "seed"]
NO_ATTACK = "none"

TITLES = {
    "jpeg": "JPEG compression (quality factor)",
    "avg": "Average filter (kernel size)",
    "median": "Median filter (kernel size)",
    "gauss": "Gaussian filter (kernel size, sigma)",
    "gnoise": "Gaussian noise (variance, [0,1] intensity scale)",
    "spnoise": "Salt and pepper noise (percent of pixels)",
    "resize": "Resize down and back (scale factor)",
}

NOTES = {
    "gnoise": "Noise level is a variance on the [0,1] intensity scale: std = 255*sqrt(var) grey levels.",
    "gauss": "Kernel size and sigma grow together; the 3x3 row uses sigma 0.5.",
}


@dataclass
class BenchConfig:
    images: Path
    logo: Path | None = None
    methods: tuple = METHODS
    dp: wm.DpParams = field(default_factory=wm.DpParams)
    normal: wm.NormalParams = field(default_factory=wm.NormalParams)
    attacks: list = field(default_factory=list)
    seed: int = 0
    workers: int = 1
    out_csv: Path | None = None
    out_md: Path | None = None
    out_jpeg_curve: Path | None = None
    fig_dir: Path | None = None
    save_attacked: Path | None = None

    def params(self, method):
        return self.dp if method == "dp" else self.normal


@dataclass(frozen=True)
class BenchRecord:
    image: str
    method: str
    attack: str
    params: str
    ber_percent: float
    psnr_embed_db: float
    psnr_attack_db: float
    seed: int | None = None
    attack_index: int = 0

    def row(self) -> list:
        return [
            self.image,
            self.method,
            self.attack,
            self.params,
            f"{self.ber_percent:.2f}",
            format_db(self.psnr_embed_db),
            format_db(self.psnr_attack_db),
            "" if self.seed is None else str(self.seed),
        ]


# -- config -------------------------------------------------------------------

_KEYS = {"images", "logo", "methods", "dp_m", "dp_n", "normal_m", "attacks", "seed",
         "workers", "out_csv", "out_md", "out_jpeg_curve", "fig_dir", "save_attacked"}


def parse_config_text(text: str, base_dir=".", overrides=None) -> BenchConfig:
    """Build a config from ``key = value`` lines; ``overrides`` win.

    Relative paths resolve against ``base_dir``. Blank lines and ``#``
    comments are ignored.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key = key.strip().lower()
        if not eq or key not in _KEYS:
            raise ValueError(f"config line {lineno}: cannot parse {raw.strip()!r}")
        values[key] = value.strip()
    values.update({k: str(v) for k, v in (overrides or {}).items() if v is not None})
    if "images" not in values:
        raise ValueError("config needs an 'images' directory")

    base = Path(base_dir)

    def path(key):
        return base / values[key] if values.get(key) else None

    methods = tuple(m.strip() for m in values.get("methods", ",".join(METHODS)).split(",") if m.strip())
    bad = set(methods) - set(METHODS)
    if bad or not methods:
        raise ValueError(f"unknown methods {sorted(bad)}; expected a subset of {METHODS}")
    return BenchConfig(
        images=path("images"),
        logo=path("logo"),
        methods=methods,
        dp=wm.DpParams(float(values.get("dp_m", wm.DP_M)), float(values.get("dp_n", wm.DP_N))),
        normal=wm.NormalParams(float(values.get("normal_m", wm.NORMAL_M))),
        attacks=parse_attack_list(values.get("attacks", "")),
        seed=int(values.get("seed", 0)),
        workers=int(values.get("workers", 1)),
        out_csv=path("out_csv"),
        out_md=path("out_md"),
        out_jpeg_curve=path("out_jpeg_curve"),
        fig_dir=path("fig_dir"),
        save_attacked=path("save_attacked"),
    )


def load_config(path, overrides=None) -> BenchConfig:
    path = Path(path)
    return parse_config_text(path.read_text(), path.parent, overrides)


# -- running ------------------------------------------------------------------

def load_logo(path) -> np.ndarray:
    return default_logo() if path is None else binarize(read_pgm(path))


def _run_image(name, cover, logo, methods, params, attacks, seed, save_dir=None):
    out = []
    for method in methods:
        p = params[method]
        marked, report = wm.embed(method, cover, logo, p)
        clean = wm.extract(method, marked, p)
        out.append(BenchRecord(name, method, NO_ATTACK, "", ber(logo, clean), report.psnr_db, math.inf))
        for idx, spec in enumerate(attacks, 1):
            spec = spec.with_seed(seed)
            attacked = spec.apply(marked)
            if save_dir is not None:
                write_pgm(Path(save_dir) / f"{name}__{method}__{spec.cli_name}_{spec.param_str()}.pgm", attacked)
            bits = wm.extract(method, attacked, p)
            out.append(
                BenchRecord(
                    name,
                    method,
                    spec.cli_name,
                    spec.param_str(),
                    ber(logo, bits),
                    report.psnr_db,
                    psnr(marked, attacked),
                    spec.seed if spec.stochastic else None,
                    idx,
                )
            )
    return out


def _load_images(folder, logo_shape):
    images, errors = [], []
    for path in sorted(Path(folder).glob("*.pgm")):
        try:
            img = read_pgm(path)
        except (OSError, PgmError) as exc:
            errors.append((path.name, str(exc)))
            continue
        h, w = img.shape
        if h % 16 or w % 16 or (h // 8, w // 8) != logo_shape:
            errors.append((path.name, f"{w}x{h} is incompatible with a {logo_shape[1]}x{logo_shape[0]} logo"))
            continue
        images.append((path.stem, img))
    for name, msg in errors:
        log.warning("skipping %s: %s", name, msg)
    return images, errors


def run_suite(config: BenchConfig, images=None):
    """Run the suite; returns ``(records, errors)``.

    ``images`` may be given as ``[(name, array), ...]`` to bypass the
    directory scan. Records are sorted by image, attack (grid order), method.
    """
    logo = load_logo(config.logo)
    errors = []
    if images is None:
        images, errors = _load_images(config.images, logo.shape)
    if not images and not errors:
        raise ValueError(f"no PGM images found in {config.images}")
    if config.save_attacked is not None:
        Path(config.save_attacked).mkdir(parents=True, exist_ok=True)
    params = {m: config.params(m) for m in config.methods}
    jobs = [
        (name, img, logo, config.methods, params, list(config.attacks), config.seed, config.save_attacked)
        for name, img in images
    ]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            chunks = list(pool.map(_run_image, *zip(*jobs)))
    else:
        chunks = [_run_image(*job) for job in jobs]
    records = [r for chunk in chunks for r in chunk]
    return sort_records(records), errors


def sort_records(records):
    order = {m: i for i, m in enumerate(METHODS)}
    return sorted(records, key=lambda r: (r.image, r.attack_index, order.get(r.method, 99)))


# -- aggregation ----------------------------------------------------------------

@dataclass(frozen=True)
class Summary:
    method: str
    attack: str
    params: str
    n: int
    mean_ber: float
    std_ber: float
    mean_psnr_embed: float
    attack_index: int


def summarize(records) -> list[Summary]:
    """Mean and spread of BER per (method, attack, params), grid order."""
    groups = {}
    for r in records:
        groups.setdefault((r.attack_index, r.attack, r.params, r.method), []).append(r)
    out = []
    for (idx, attack, params, method), rs in sorted(groups.items(), key=lambda kv: (kv[0][0], _morder(kv[0][3]))):
        bers = np.array([r.ber_percent for r in rs])
        out.append(
            Summary(method, attack, params, len(rs), float(bers.mean()), float(bers.std()),
                    float(np.mean([r.psnr_embed_db for r in rs])), idx)
        )
    return out


def _morder(m):
    return METHODS.index(m) if m in METHODS else 99


def jpeg_curve(records) -> list[tuple[int, str, float]]:
    """``(qf, method, mean_ber)`` sorted by method then descending QF."""
    pts = [(int(s.params.split("=")[1]), s.method, s.mean_ber) for s in summarize(records) if s.attack == "jpeg"]
    return sorted(pts, key=lambda t: (_morder(t[1]), -t[0]))


def jpeg_monotonicity(records, tol: float = 1.0):
    """Increases of mean BER with increasing QF, per method.

    Returns ``(method, qf_low, qf_high, increase, tolerated)`` tuples, where
    ``tolerated`` marks increases below ``tol`` points.
    """
    out = []
    by_method = {}
    for qf, method, b in jpeg_curve(records):
        by_method.setdefault(method, []).append((qf, b))
    for method, pts in by_method.items():
        pts.sort()
        for (q0, b0), (q1, b1) in zip(pts, pts[1:]):
            if b1 > b0:
                out.append((method, q0, q1, b1 - b0, b1 - b0 < tol))
    return out


# -- emitters -------------------------------------------------------------------

def emit_csv(records) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sort_records(records):
        w.writerow(r.row())
    return buf.getvalue().encode()


def emit_jpeg_curve_csv(records) -> bytes:
    lines = ["qf,method,mean_ber"] + [f"{qf},{m},{b:.2f}" for qf, m, b in jpeg_curve(records)]
    return ("\n".join(lines) + "\n").encode()


def emit_markdown(records, seed=None) -> str:
    summaries = summarize(records)
    methods = sorted({s.method for s in summaries}, key=_morder)
    out = ["# Watermark robustness report", ""]
    if seed is not None:
        out += [f"Seed: {seed}", ""]
    images = sorted({r.image for r in records})
    out += [f"Images: {len(images)}. Cells are mean BER (%) +- standard deviation over images.", ""]

    clean = [s for s in summaries if s.attack == NO_ATTACK]
    if clean:
        out += ["## Embedding quality", "", "| method | mean PSNR (dB) | no-attack BER (%) |", "|---|---|---|"]
        for s in clean:
            out.append(f"| {s.method} | {format_db(s.mean_psnr_embed)} | {s.mean_ber:.2f} |")
        out.append("")

    kinds = []
    for s in summaries:
        if s.attack != NO_ATTACK and s.attack not in kinds:
            kinds.append(s.attack)
    for kind in kinds:
        rows = {}
        for s in summaries:
            if s.attack == kind:
                rows.setdefault((s.attack_index, s.params), {})[s.method] = s
        out += [f"## {TITLES.get(kind, kind)}", ""]
        if kind in NOTES:
            out += [NOTES[kind], ""]
        out.append("| params | " + " | ".join(methods) + " |")
        out.append("|---|" + "---|" * len(methods))
        for (_, params), cells in sorted(rows.items()):
            vals = [
                f"{cells[m].mean_ber:.2f} +- {cells[m].std_ber:.2f}" if m in cells else "-" for m in methods
            ]
            out.append(f"| {params} | " + " | ".join(vals) + " |")
        out.append("")
        issues = jpeg_monotonicity(records) if kind == "jpeg" else []
        for method, q0, q1, inc, ok in issues:
            tag = "tolerated" if ok else "VIOLATION"
            out.append(f"- {tag}: {method} mean BER rises by {inc:.2f} points from QF {q0} to QF {q1}")
        if issues:
            out.append("")
    return "\n".join(out)


def write_outputs(config: BenchConfig, records) -> list[Path]:
    written = []
    if config.out_csv is not None:
        Path(config.out_csv).write_bytes(emit_csv(records))
        written.append(Path(config.out_csv))
    if config.out_md is not None:
        Path(config.out_md).write_text(emit_markdown(records, config.seed))
        written.append(Path(config.out_md))
    if config.out_jpeg_curve is not None:
        Path(config.out_jpeg_curve).write_bytes(emit_jpeg_curve_csv(records))
        written.append(Path(config.out_jpeg_curve))
    if config.fig_dir is not None:
        from .figures import render_figures

        written += render_figures(records, config.fig_dir)
    return written

