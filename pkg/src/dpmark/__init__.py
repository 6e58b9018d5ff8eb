"""Blind image-in-image watermarking with data partitioning.

A binary logo is split into a low-resolution base part and a ternary
enhancement part; the base is embedded strongly in the 16x16 DCT layer and
the enhancement weakly in the 8x8 layer.
"""

from .pixelcore import ber, binarize, load_pgm, psnr, read_pgm, save_pgm, write_pgm
from .watermark import (
    DpParams,
    EmbedReport,
    NormalParams,
    calibrate,
    embed_dp,
    embed_normal,
    extract_dp,
    extract_normal,
)

__all__ = [
    "DpParams",
    "EmbedReport",
    "NormalParams",
    "ber",
    "binarize",
    "calibrate",
    "embed_dp",
    "embed_normal",
    "extract_dp",
    "extract_normal",
    "load_pgm",
    "psnr",
    "read_pgm",
    "save_pgm",
    "write_pgm",
]

__version__ = "0.1.0"
