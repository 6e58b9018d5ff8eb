"""Two-layer data-partitioned embedding and the single-layer baseline.

DP layout for a cover of ``H x W``:

* the logo (``H/8 x W/8``) is split by spatial scalability;
* enhancement symbol ``(r, c)`` goes into 8x8 block ``(r, c)`` through the
  ternary lattice on ``x[0,2] - x[2,0]`` (1-based ``x13 - x31``), with
  centres ``2N`` apart so a symbol survives any distortion below ``N``;
* base bit ``(i, j)`` goes into 16x16 block ``(i, j)`` through the binary
  lattice on ``A[0,2] - A[2,0]``.

``A13``/``A31`` only mix the 8x8 ``x12``/``x21`` terms, so the second
stage leaves the first stage's coefficients untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qim
from .partition import reconstruct_spatial, split_spatial
from .pixelcore import as_bits, as_gray, psnr
from .transform import dct2, grid8_to_layer16, idct2, layer16_to_grid8, tile, untile

# default embedding strengths
DP_M = 69.1
DP_N = 12.0
NORMAL_M = 62.2
DP_RATIO = DP_N / DP_M

# ternary lattice spacing in units of N
ENH_SPACING = 2.0

# 0-based positions of the (1,3) and (3,1) coefficients
P13 = (0, 2)
P31 = (2, 0)


@dataclass(frozen=True)
class DpParams:
    M: float = DP_M
    N: float = DP_N

    def __post_init__(self):
        if not (self.M > 0 and self.N > 0):
            raise ValueError(f"strengths must be positive, got M={self.M}, N={self.N}")


@dataclass(frozen=True)
class NormalParams:
    M: float = NORMAL_M

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError(f"strength must be positive, got M={self.M}")


@dataclass(frozen=True)
class EmbedReport:
    psnr_db: float
    blocks_used: int
    capacity_bits: int
    base_bits: int = 0
    enhancement_symbols: int = 0


def _delta(coeffs):
    return coeffs[..., P13[0], P13[1]] - coeffs[..., P31[0], P31[1]]


def _apply(coeffs, target):
    """Move the coefficient difference to ``target``, split evenly."""
    step = (target - _delta(coeffs)) / 2
    coeffs[..., P13[0], P13[1]] += step
    coeffs[..., P31[0], P31[1]] -= step


def _check_dims(cover, logo, block):
    h, w = cover.shape
    if h % block or w % block:
        raise ValueError(f"cover {w}x{h} is not a multiple of {block}")
    if logo is not None and logo.shape != (h // 8, w // 8):
        raise ValueError(
            f"logo must be {w // 8}x{h // 8} for a {w}x{h} cover, got "
            f"{logo.shape[1]}x{logo.shape[0]}"
        )


def embed_dp(cover, logo, params: DpParams = DpParams()):
    cover = as_gray(cover)
    logo = as_bits(logo)
    _check_dims(cover, logo, 16)
    h, w = cover.shape
    parts = split_spatial(logo)

    grid8 = dct2(tile(cover, 8))
    _apply(grid8, qim.embed_ternary(_delta(grid8), parts.enhancement, ENH_SPACING * params.N))

    grid16 = grid8_to_layer16(grid8)
    _apply(grid16, qim.embed_binary(_delta(grid16), parts.base, params.M))

    spatial = idct2(layer16_to_grid8(grid16))
    marked = untile(spatial, w, h)
    nblocks = grid16.shape[0] * grid16.shape[1]
    report = EmbedReport(
        psnr_db=psnr(cover, marked),
        blocks_used=nblocks,
        capacity_bits=nblocks + 4 * nblocks,
        base_bits=nblocks,
        enhancement_symbols=4 * nblocks,
    )
    return marked, report


def extract_dp_parts(img, params: DpParams = DpParams()):
    """Decoded ``(base, enhancement)`` planes, before recombination."""
    img = as_gray(img)
    _check_dims(img, None, 16)
    grid8 = dct2(tile(img, 8))
    enh = qim.extract_ternary(_delta(grid8), ENH_SPACING * params.N)
    base = qim.extract_binary(_delta(grid8_to_layer16(grid8)), params.M)
    return base, enh


def extract_dp(img, params: DpParams = DpParams()) -> np.ndarray:
    base, enh = extract_dp_parts(img, params)
    return as_bits(reconstruct_spatial(base, enh))


def embed_normal(cover, logo, params: NormalParams = NormalParams()):
    cover = as_gray(cover)
    logo = as_bits(logo)
    _check_dims(cover, logo, 8)
    h, w = cover.shape
    grid8 = dct2(tile(cover, 8))
    _apply(grid8, qim.embed_binary(_delta(grid8), logo, params.M))
    marked = untile(idct2(grid8), w, h)
    nblocks = grid8.shape[0] * grid8.shape[1]
    return marked, EmbedReport(psnr(cover, marked), nblocks, nblocks, base_bits=nblocks)


def extract_normal(img, params: NormalParams = NormalParams()) -> np.ndarray:
    img = as_gray(img)
    _check_dims(img, None, 8)
    return as_bits(qim.extract_binary(_delta(dct2(tile(img, 8))), params.M))


def embed(method: str, cover, logo, params):
    if method == "dp":
        return embed_dp(cover, logo, params)
    if method == "normal":
        return embed_normal(cover, logo, params)
    raise ValueError(f"unknown method {method!r}")


def extract(method: str, img, params):
    if method == "dp":
        return extract_dp(img, params)
    if method == "normal":
        return extract_normal(img, params)
    raise ValueError(f"unknown method {method!r}")


def default_params(method: str):
    return {"dp": DpParams(), "normal": NormalParams()}[method]


# -- calibration --------------------------------------------------------------

class CalibrationError(RuntimeError):
    def __init__(self, msg, lo=None, hi=None):
        super().__init__(msg)
        self.lo = lo
        self.hi = hi


def _params_for(method, M, ratio):
    return DpParams(M, M * ratio) if method == "dp" else NormalParams(M)


def mean_psnr(covers, logo, method, params) -> float:
    return float(np.mean([embed(method, c, logo, params)[1].psnr_db for c in covers]))


def calibrate(
    covers,
    logo,
    target_psnr: float,
    method: str = "dp",
    ratio: float = DP_RATIO,
    bounds=(1.0, 512.0),
    tol: float = 0.05,
    max_iter: int = 60,
):
    """Bisect the strength until the mean PSNR over ``covers`` is within
    ``tol`` dB of ``target_psnr``. For DP, ``N = ratio * M``."""
    covers = list(covers)
    if not covers:
        raise ValueError("calibration needs at least one cover image")
    lo, hi = bounds
    p_lo = mean_psnr(covers, logo, method, _params_for(method, lo, ratio))
    p_hi = mean_psnr(covers, logo, method, _params_for(method, hi, ratio))
    for M, p in ((lo, p_lo), (hi, p_hi)):
        if abs(p - target_psnr) < tol:
            return _params_for(method, M, ratio)
    if not p_hi < target_psnr < p_lo:
        raise CalibrationError(
            f"target {target_psnr} dB outside reachable range "
            f"[{p_hi:.2f}, {p_lo:.2f}] dB for strength in [{lo}, {hi}]",
            (lo, p_lo),
            (hi, p_hi),
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        p = mean_psnr(covers, logo, method, _params_for(method, mid, ratio))
        if abs(p - target_psnr) < tol:
            return _params_for(method, mid, ratio)
        if p > target_psnr:
            lo = mid
        else:
            hi = mid
    raise CalibrationError(
        f"no strength within {tol} dB of {target_psnr} dB after {max_iter} steps",
        (lo, None),
        (hi, None),
    )
