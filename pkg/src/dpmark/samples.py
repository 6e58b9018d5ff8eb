"""Built-in test logo and a desk-scale set of standard 512x512 test images."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from .pixelcore import as_bits, as_gray, write_pgm


def default_logo(size: int = 64) -> np.ndarray:
    """A 64x64-style binary logo: a ring around a bold ``T`` with a corner bar.

    Mostly flat regions with sharp edges, like a typical trademark.
    """
    yy, xx = np.mgrid[0:size, 0:size] + 0.5
    c = size / 2
    r = np.hypot(yy - c, xx - c)
    s = size / 64
    logo = (r > 27 * s) & (r < 31 * s)
    logo |= (np.abs(yy - 17 * s) < 3.5 * s) & (np.abs(xx - c) < 14 * s)
    logo |= (np.abs(xx - c) < 3.5 * s) & (yy > 17 * s) & (yy < 48 * s)
    logo |= (np.abs(yy - 40 * s) < 1.5 * s) & (np.abs(xx - c) > 8 * s) & (np.abs(xx - c) < 18 * s)
    return as_bits(logo)


# skimage.data images that ship with the wheel (no download needed)
_DESK = (
    "camera", "moon", "astronaut", "brick", "grass", "gravel",
    "immunohistochemistry", "coffee", "chelsea", "rocket", "retina", "hubble_deep_field",
)


def _to_512(img: np.ndarray) -> np.ndarray:
    from PIL import Image

    if img.ndim == 3:
        rgb = img[..., :3].astype(np.float64)
        img = rgb @ np.array([0.299, 0.587, 0.114])
        img = np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)
    h, w = img.shape
    side = min(h, w)
    top, left = (h - side) // 2, (w - side) // 2
    img = img[top : top + side, left : left + side]
    if side != 512:
        img = np.asarray(Image.fromarray(img).resize((512, 512), Image.Resampling.LANCZOS))
    return as_gray(img)


def desk_images() -> dict:
    """``name -> 512x512 uint8`` for the standard scikit-image samples."""
    from skimage import data

    return {name: _to_512(getattr(data, name)()) for name in _DESK}


def write_desk_set(outdir, logo_path=None) -> list[Path]:
    """Write the desk images as PGMs (and optionally the default logo)."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, img in desk_images().items():
        path = outdir / f"{name}.pgm"
        write_pgm(path, img)
        paths.append(path)
    if logo_path is not None:
        write_pgm(logo_path, default_logo() * 255)
        paths.append(Path(logo_path))
    return paths


if __name__ == "__main__":
    target = Path(sys.argv[1] if len(sys.argv) > 1 else "desk")
    for p in write_desk_set(target / "images", target / "logo.pgm"):
        print(p)
