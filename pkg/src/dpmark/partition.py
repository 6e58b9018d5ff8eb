"""Splitting a binary logo into a base part and an enhancement part.

Three methods are provided:

``TruncatedSvd``
    rank-p SVD approximation as base, real residual as enhancement.
``BinaryWavelet``
    single-level GF(2) transform ``B = T X T^T`` on 4x4 tiles; the LL
    sub-band is the base and LH/HL/HH form the enhancement.
``SpatialScalability``
    top-left decimation as base, ``logo - upsample(base)`` (over
    {-1, 0, +1}) as enhancement. This is the one used by the watermark.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .pixelcore import as_bits, as_real, as_ternary


class SingularMatrixError(ValueError):
    def __init__(self, det: int):
        self.det = det
        super().__init__(
            f"transform matrix is singular over GF(2): integer determinant {det} "
            f"has parity {det % 2}"
        )


def int_det(m) -> int:
    """Exact integer determinant by fraction-valued Gaussian elimination."""
    a = [[Fraction(int(v)) for v in row] for row in np.asarray(m)]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return int(det)


def gf2_inv(m) -> np.ndarray:
    """Inverse over GF(2); raises ``ValueError`` if singular."""
    m = np.asarray(m, dtype=np.uint8) % 2
    n = m.shape[0]
    aug = np.concatenate([m, np.eye(n, dtype=np.uint8)], axis=1)
    for col in range(n):
        rows = np.nonzero(aug[col:, col])[0]
        if rows.size == 0:
            raise ValueError("matrix is singular over GF(2)")
        p = col + rows[0]
        aug[[col, p]] = aug[[p, col]]
        for r in range(n):
            if r != col and aug[r, col]:
                aug[r] ^= aug[col]
    return aug[:, n:].copy()


# -- methods ------------------------------------------------------------------

# A natural-looking 4x4 choice; integer determinant 2, so it has no inverse over GF(2).
SINGULAR_T = np.array([[1, 1, 1, 0], [1, 0, 1, 1], [1, 1, 0, 0], [0, 1, 1, 1]], dtype=np.uint8)

# Haar-like: two pair-sum (low-pass) rows, two single-sample (detail) rows.
DEFAULT_T = np.array([[1, 1, 0, 0], [0, 0, 1, 1], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.uint8)


@dataclass(frozen=True)
class TruncatedSvd:
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")


@dataclass(frozen=True)
class BinaryWavelet:
    T: np.ndarray = field(default_factory=lambda: DEFAULT_T.copy())

    def __post_init__(self):
        t = np.asarray(self.T)
        if t.shape != (4, 4) or not np.isin(t, (0, 1)).all():
            raise ValueError("T must be a 4x4 binary matrix")
        det = int_det(t)
        if det % 2 == 0:
            raise SingularMatrixError(det)
        t = t.astype(np.uint8)
        t.setflags(write=False)
        object.__setattr__(self, "T", t)

    @property
    def T_inv(self) -> np.ndarray:
        return gf2_inv(self.T)

    def __eq__(self, other):
        return isinstance(other, BinaryWavelet) and np.array_equal(self.T, other.T)

    def __hash__(self):
        return hash(self.T.tobytes())


@dataclass(frozen=True)
class SpatialScalability:
    pass


@dataclass(frozen=True)
class Partitioned:
    """Base and enhancement parts of a logo.

    For ``BinaryWavelet`` the enhancement is a ``(3, h/2, w/2)`` stack of
    the HL, LH and HH sub-bands.
    """

    method: object
    base: np.ndarray
    enhancement: np.ndarray

    @property
    def alphabet_size_base(self) -> int:
        return alphabet_size(self.base)

    @property
    def alphabet_size_enh(self) -> int:
        return alphabet_size(self.enhancement)


def alphabet_size(plane, decimals: int = 9) -> int:
    """Number of distinct values (real values compared after rounding)."""
    arr = np.asarray(plane)
    if arr.dtype.kind == "f":
        arr = np.round(arr, decimals) + 0.0  # fold -0.0 into 0.0
    return int(np.unique(arr).size)


# -- truncated SVD ------------------------------------------------------------

def split_svd(logo, p: int) -> Partitioned:
    logo = as_bits(logo)
    if not 1 <= p <= min(logo.shape):
        raise ValueError(f"rank {p} outside [1, {min(logo.shape)}]")
    x = logo.astype(np.float64)
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    base = (u[:, :p] * s[:p]) @ vt[:p]
    return Partitioned(TruncatedSvd(p), as_real(base), as_real(x - base))


# -- binary wavelet -----------------------------------------------------------

def _tiles4(plane):
    h, w = plane.shape
    return plane.reshape(h // 4, 4, w // 4, 4).transpose(0, 2, 1, 3)


def _untiles4(tiles):
    r, c = tiles.shape[:2]
    return tiles.transpose(0, 2, 1, 3).reshape(4 * r, 4 * c)


def bwd_coefficients(logo, T) -> np.ndarray:
    """Per-tile ``T X T^T mod 2``, laid out tile by tile like the logo."""
    t = np.asarray(T, dtype=np.int64)
    tiles = _tiles4(np.asarray(logo, dtype=np.int64))
    return _untiles4((t @ tiles @ t.T) % 2).astype(np.uint8)


def bwd_inverse(coeffs, T) -> np.ndarray:
    ti = gf2_inv(T).astype(np.int64)
    tiles = _tiles4(np.asarray(coeffs, dtype=np.int64))
    return _untiles4((ti @ tiles @ ti.T) % 2).astype(np.uint8)


def _bands_from_coeffs(coeffs):
    """Gather each tile's 2x2 quadrants into four half-resolution planes."""
    tiles = _tiles4(coeffs)
    r, c = tiles.shape[:2]

    def band(rs, cs):
        q = tiles[:, :, rs, cs]  # (r, c, 2, 2)
        return q.transpose(0, 2, 1, 3).reshape(2 * r, 2 * c)

    lo, hi = slice(0, 2), slice(2, 4)
    return band(lo, lo), np.stack([band(lo, hi), band(hi, lo), band(hi, hi)])


def _coeffs_from_bands(ll, detail):
    r, c = ll.shape[0] // 2, ll.shape[1] // 2
    tiles = np.empty((r, c, 4, 4), dtype=np.uint8)

    def put(plane, rs, cs):
        tiles[:, :, rs, cs] = plane.reshape(r, 2, c, 2).transpose(0, 2, 1, 3)

    lo, hi = slice(0, 2), slice(2, 4)
    put(ll, lo, lo)
    put(detail[0], lo, hi)
    put(detail[1], hi, lo)
    put(detail[2], hi, hi)
    return _untiles4(tiles)


def split_bwd(logo, T=None) -> Partitioned:
    method = BinaryWavelet() if T is None else BinaryWavelet(np.asarray(T))
    logo = as_bits(logo)
    if logo.shape[0] % 4 or logo.shape[1] % 4:
        raise ValueError(f"logo shape {logo.shape} is not a multiple of 4")
    ll, detail = _bands_from_coeffs(bwd_coefficients(logo, method.T))
    detail.setflags(write=False)
    return Partitioned(method, as_bits(ll), detail)


# -- spatial scalability ------------------------------------------------------

def upsample(base) -> np.ndarray:
    """2x nearest-neighbour replication."""
    return np.repeat(np.repeat(np.asarray(base), 2, axis=0), 2, axis=1)


def split_spatial(logo) -> Partitioned:
    logo = as_bits(logo)
    if logo.shape[0] % 2 or logo.shape[1] % 2:
        raise ValueError(f"logo shape {logo.shape} must have even dimensions")
    base = logo[0::2, 0::2]
    enh = logo.astype(np.int8) - upsample(base).astype(np.int8)
    return Partitioned(SpatialScalability(), as_bits(base), as_ternary(enh))


def reconstruct_spatial(base, enhancement) -> np.ndarray:
    """``clamp(upsample(base) + enhancement, 0, 1)``."""
    up = upsample(base).astype(np.int16)
    if up.shape != np.shape(enhancement):
        raise ValueError(f"base {np.shape(base)} does not match enhancement {np.shape(enhancement)}")
    return np.clip(up + np.asarray(enhancement, dtype=np.int16), 0, 1).astype(np.uint8)


def reconstruct(parts: Partitioned) -> np.ndarray:
    """Recombine the two parts into the logo; corrupted sums are clamped to {0, 1}."""
    m = parts.method
    if isinstance(m, SpatialScalability):
        return as_bits(reconstruct_spatial(parts.base, parts.enhancement))
    if isinstance(m, TruncatedSvd):
        if np.shape(parts.base) != np.shape(parts.enhancement):
            raise ValueError("base and enhancement shapes differ")
        total = np.asarray(parts.base) + np.asarray(parts.enhancement)
        return as_bits(total >= 0.5)
    if isinstance(m, BinaryWavelet):
        ll, detail = np.asarray(parts.base), np.asarray(parts.enhancement)
        if detail.shape != (3,) + ll.shape:
            raise ValueError("sub-band shapes differ")
        return as_bits(bwd_inverse(_coeffs_from_bands(ll, detail), m.T))
    raise TypeError(f"unknown partition method {m!r}")


def split(logo, method) -> Partitioned:
    if isinstance(method, SpatialScalability):
        return split_spatial(logo)
    if isinstance(method, TruncatedSvd):
        return split_svd(logo, method.rank)
    if isinstance(method, BinaryWavelet):
        return split_bwd(logo, method.T)
    raise TypeError(f"unknown partition method {method!r}")


# -- error propagation --------------------------------------------------------

@dataclass(frozen=True)
class Propagation:
    """Mean number of logo bits corrupted by a single part error.

    ``base_spread`` counts the positions a base error reaches before the
    enhancement is added back (4 for spatial scalability); ``None`` where
    the base is not a discrete plane.
    """

    enhancement_mean: float
    base_mean: float | None
    overall_mean: float
    base_spread: float | None = None


def _flip_enhancement(parts, clean, idx):
    m = parts.method
    enh = np.array(parts.enhancement, copy=True)
    if isinstance(m, SpatialScalability):
        # the symbol that toggles the reconstructed bit at this position
        i, j = idx
        b = int(parts.base[i // 2, j // 2])
        enh[idx] = (1 - int(clean[idx])) - b
    elif isinstance(m, TruncatedSvd):
        enh[idx] += 1.0 - 2.0 * float(clean[idx])
    else:
        enh[idx] ^= 1
    return Partitioned(m, parts.base, enh)


def error_propagation(method, logo) -> Propagation:
    """Exhaustively flip every part entry and count changed logo bits."""
    parts = split(logo, method)
    clean = reconstruct(parts)

    enh_counts = []
    for idx in np.ndindex(np.shape(parts.enhancement)):
        bad = reconstruct(_flip_enhancement(parts, clean, idx))
        enh_counts.append(np.count_nonzero(bad != clean))
    enh_mean = float(np.mean(enh_counts))

    if isinstance(method, TruncatedSvd):
        return Propagation(enh_mean, None, enh_mean)

    base_counts, spreads = [], []
    for idx in np.ndindex(parts.base.shape):
        base = np.array(parts.base, copy=True)
        base[idx] ^= 1
        bad = reconstruct(Partitioned(parts.method, base, parts.enhancement))
        base_counts.append(np.count_nonzero(bad != clean))
        if isinstance(method, SpatialScalability):
            spreads.append(np.count_nonzero(upsample(base) != upsample(parts.base)))
    base_mean = float(np.mean(base_counts))
    overall = float(np.mean(enh_counts + base_counts))
    spread = float(np.mean(spreads)) if spreads else None
    return Propagation(enh_mean, base_mean, overall, spread)


def gf2_propagation_closed_form(T) -> float:
    """Mean corrupted bits per coefficient flip for the GF(2) transform.

    A flip at tile position (r, c) corrupts ``|col_r(T^-1)| * |col_c(T^-1)|``
    bits, independent of the logo.
    """
    w = gf2_inv(T).sum(axis=0).astype(np.float64)
    return float(np.mean(np.outer(w, w)))
