"""Block DCT-II transforms, image tiling and 16x16 <-> 4x(8x8) layer conversion.

All functions operate on the trailing two axes, so a whole grid of blocks
(shape ``(rows, cols, n, n)``) is transformed in one call. Coefficient
``(u, v)`` in 0-based numpy indexing is entry ``(u+1, v+1)`` in the 1-based
convention where ``(1, 1)`` is DC.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

SIZES = (8, 16)


@lru_cache(maxsize=None)
def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis ``D`` with ``coeffs = D @ x @ D.T``."""
    if n not in SIZES:
        raise ValueError(f"unsupported block size {n}; expected one of {SIZES}")
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    d = np.cos(np.pi * (2 * i + 1) * k / (2 * n)) * np.sqrt(2.0 / n)
    d[0, :] = np.sqrt(1.0 / n)
    d.setflags(write=False)
    return d


def _size(block: np.ndarray) -> int:
    if block.ndim < 2 or block.shape[-1] != block.shape[-2]:
        raise ValueError(f"expected square trailing block, got shape {block.shape}")
    return block.shape[-1]


def dct2(block) -> np.ndarray:
    block = np.asarray(block, dtype=np.float64)
    d = dct_matrix(_size(block))
    return d @ block @ d.T


def idct2(coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.float64)
    d = dct_matrix(_size(coeffs))
    return d.T @ coeffs @ d


def tile(img, n: int) -> np.ndarray:
    """Split an image into a ``(rows, cols, n, n)`` float grid, raster order."""
    img = np.asarray(img)
    if n not in SIZES:
        raise ValueError(f"unsupported block size {n}")
    h, w = img.shape
    if h % n or w % n:
        raise ValueError(f"image {w}x{h} is not a multiple of the block size {n}")
    grid = img.astype(np.float64).reshape(h // n, n, w // n, n)
    return grid.transpose(0, 2, 1, 3).copy()


def assemble(grid) -> np.ndarray:
    """Inverse of :func:`tile` without rounding (float output)."""
    grid = np.asarray(grid)
    rows, cols, n, m = grid.shape
    return grid.transpose(0, 2, 1, 3).reshape(rows * n, cols * m)


def untile(grid, width: int, height: int) -> np.ndarray:
    """Reassemble a block grid into an 8-bit image (round half up, clamp)."""
    img = assemble(grid)
    if img.shape != (height, width):
        raise ValueError(f"grid covers {img.shape[1]}x{img.shape[0]}, expected {width}x{height}")
    # snap float noise first so exact .5 values always round up
    out = np.clip(np.floor(np.round(img, 9) + 0.5), 0, 255).astype(np.uint8)
    out.setflags(write=False)
    return out


def _check8(*blocks):
    for b in blocks:
        if b.shape[-2:] != (8, 8):
            raise ValueError(f"expected 8x8 coefficient blocks, got {b.shape[-2:]}")


def subblocks_to_layer16(a, b, c, d) -> np.ndarray:
    """DCT-16 coefficients of the block whose four 8x8 quadrants have DCT
    coefficients ``a`` (top-left), ``b`` (top-right), ``c`` (bottom-left)
    and ``d`` (bottom-right)."""
    a, b, c, d = (np.asarray(x, dtype=np.float64) for x in (a, b, c, d))
    _check8(a, b, c, d)
    top = np.concatenate([idct2(a), idct2(b)], axis=-1)
    bottom = np.concatenate([idct2(c), idct2(d)], axis=-1)
    return dct2(np.concatenate([top, bottom], axis=-2))


def layer16_to_subblocks(coeffs):
    """Inverse of :func:`subblocks_to_layer16`; returns ``(a, b, c, d)``."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape[-2:] != (16, 16):
        raise ValueError(f"expected 16x16 coefficient block, got {coeffs.shape[-2:]}")
    x = idct2(coeffs)
    quads = (x[..., :8, :8], x[..., :8, 8:], x[..., 8:, :8], x[..., 8:, 8:])
    return tuple(dct2(q) for q in quads)


def grid8_to_layer16(grid8) -> np.ndarray:
    """Map an 8x8 coefficient grid ``(2R, 2C, 8, 8)`` to its 16x16 layer ``(R, C, 16, 16)``."""
    g = np.asarray(grid8)
    return subblocks_to_layer16(g[0::2, 0::2], g[0::2, 1::2], g[1::2, 0::2], g[1::2, 1::2])


def layer16_to_grid8(grid16) -> np.ndarray:
    a, b, c, d = layer16_to_subblocks(grid16)
    rows, cols = a.shape[:2]
    out = np.empty((2 * rows, 2 * cols, 8, 8))
    out[0::2, 0::2], out[0::2, 1::2], out[1::2, 0::2], out[1::2, 1::2] = a, b, c, d
    return out


def build_conversion_matrix() -> np.ndarray:
    """The 16x16 matrix ``P`` with ``A = 1/2 * P @ [[a, b], [c, d]] @ P.T``.

    ``P = sqrt(2) * D16 @ blockdiag(D8.T, D8.T)``. Only used to cross-check
    the composition-based conversion.
    """
    d8 = dct_matrix(8)
    inv = np.zeros((16, 16))
    inv[:8, :8] = d8.T
    inv[8:, 8:] = d8.T
    return np.sqrt(2.0) * dct_matrix(16) @ inv
