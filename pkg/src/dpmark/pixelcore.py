"""Image containers, binary PGM I/O and the PSNR / BER quality metrics.

Images are plain numpy arrays, validated at the boundaries:

* gray image  -- 2-D ``uint8`` array, row-major (height, width)
* bit plane   -- 2-D ``uint8`` array over {0, 1}
* ternary     -- 2-D ``int8`` array over {-1, 0, +1}
* real plane  -- 2-D ``float64`` array, finite values

Returned arrays are marked read-only so they behave as value objects.
"""

from __future__ import annotations

import math
import re

import numpy as np

INF = math.inf


class PgmError(ValueError):
    """Base class for PGM parse failures."""


class PgmHeaderError(PgmError):
    pass


class PgmMaxvalError(PgmError):
    pass


class PgmTruncatedError(PgmError):
    pass


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def as_gray(img) -> np.ndarray:
    """Validate and return ``img`` as a read-only 2-D uint8 array."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"gray image must be 2-D, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("gray samples must lie in [0, 255]")
        if not np.array_equal(arr, np.round(arr)):
            raise ValueError("gray samples must be integers")
        arr = arr.astype(np.uint8)
    return _frozen(np.array(arr, copy=True))


def as_bits(plane) -> np.ndarray:
    arr = np.asarray(plane)
    if arr.ndim != 2:
        raise ValueError(f"bit plane must be 2-D, got shape {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("bit plane entries must be 0 or 1")
    return _frozen(arr.astype(np.uint8))


def as_ternary(plane) -> np.ndarray:
    arr = np.asarray(plane)
    if arr.ndim != 2:
        raise ValueError(f"ternary plane must be 2-D, got shape {arr.shape}")
    if not np.isin(arr, (-1, 0, 1)).all():
        raise ValueError("ternary plane entries must be -1, 0 or +1")
    return _frozen(arr.astype(np.int8))


def as_real(plane) -> np.ndarray:
    arr = np.asarray(plane, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"real plane must be 2-D, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("real plane entries must be finite")
    return _frozen(arr.copy())


# -- PGM ----------------------------------------------------------------------

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def load_pgm(data: bytes) -> np.ndarray:
    """Parse a binary (P5) PGM with maxval 255.

    ``#`` comments are accepted anywhere in the header. Raises
    :class:`PgmHeaderError`, :class:`PgmMaxvalError` or
    :class:`PgmTruncatedError`.
    """
    pos = 0
    fields = []
    for _ in range(4):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise PgmHeaderError("incomplete PGM header")
        fields.append(m.group(1))
        pos = m.end()
    if fields[0] != b"P5":
        raise PgmHeaderError(f"not a binary PGM (magic {fields[0]!r})")
    try:
        width, height, maxval = (int(f) for f in fields[1:])
    except ValueError as exc:
        raise PgmHeaderError(f"non-numeric header field: {exc}") from None
    if width <= 0 or height <= 0:
        raise PgmHeaderError(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise PgmMaxvalError(f"maxval must be 255, got {maxval}")
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(data) or data[pos : pos + 1] not in (b" ", b"\t", b"\n", b"\r"):
        raise PgmTruncatedError("missing raster data")
    pos += 1
    need = width * height
    raster = data[pos : pos + need]
    if len(raster) < need:
        raise PgmTruncatedError(f"expected {need} payload bytes, found {len(raster)}")
    img = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return _frozen(img.copy())


def save_pgm(img) -> bytes:
    img = as_gray(img)
    h, w = img.shape
    return b"P5\n%d %d\n255\n" % (w, h) + img.tobytes()


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return load_pgm(fh.read())


def write_pgm(path, img) -> None:
    with open(path, "wb") as fh:
        fh.write(save_pgm(img))


# -- metrics ------------------------------------------------------------------

def psnr(a, b) -> float:
    """PSNR in dB with peak 255; ``math.inf`` for identical images."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    mse = np.mean((a - b) ** 2)
    if mse == 0:
        return INF
    return float(10.0 * np.log10(255.0**2 / mse))


def ber(a, b) -> float:
    """Bit error rate between two bit planes, in percent."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return 100.0 * np.count_nonzero(a != b) / a.size


def binarize(img, threshold: int = 128) -> np.ndarray:
    """Bit is 1 where the sample is >= threshold."""
    return as_bits(np.asarray(img) >= threshold)


def bits_to_gray(bits) -> np.ndarray:
    """Render a bit plane as a 0/255 image."""
    return as_gray(np.asarray(bits, dtype=np.uint8) * 255)


def format_db(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.2f}"
