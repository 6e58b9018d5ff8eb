"""Scalar QIM on a coefficient difference.

Binary lattice (step ``M``): bit 1 lives on ``M/4 + kM``, bit 0 on
``-M/4 + kM``; opposite cosets are ``M/2`` apart, so any distortion below
``M/4`` decodes correctly.

Ternary lattice (step ``N``): the points ``qN`` carry the symbol
``q mod 3`` written in {-1, 0, +1}. Neighbouring points are ``N`` apart,
decision threshold ``N/2``.

Every function is vectorised over numpy arrays.
"""

from __future__ import annotations

import numpy as np


def _check_step(step, name):
    if not step > 0:
        raise ValueError(f"{name} must be positive, got {step}")


def _round_half_up(x):
    return np.floor(x + 0.5)


def embed_binary(delta, bit, M: float):
    """Move ``delta`` to the nearest centre of the coset of ``bit``."""
    _check_step(M, "M")
    centre = np.where(np.asarray(bit) == 1, M / 4, -M / 4)
    out = centre + M * _round_half_up((np.asarray(delta, dtype=np.float64) - centre) / M)
    return out if out.ndim else float(out)


def extract_binary(delta, M: float):
    """Bit label of the nearest lattice centre; exact midpoints decode as 1."""
    _check_step(M, "M")
    # centres sit at M/4 + q*M/2, bit 1 for even q
    u = (np.asarray(delta, dtype=np.float64) - M / 4) / (M / 2)
    lo = np.floor(u)
    frac = u - lo
    lo_even = np.mod(lo, 2) == 0
    bit = np.where(frac < 0.5, lo_even, np.where(frac > 0.5, ~lo_even, True))
    bit = bit.astype(np.uint8)
    return bit if bit.ndim else int(bit)


def _symbol(q):
    return (np.mod(q + 1, 3) - 1).astype(np.int8)


def embed_ternary(delta, symbol, N: float):
    """Nearest lattice point ``qN`` with ``q == symbol (mod 3)``."""
    _check_step(N, "N")
    s = np.asarray(symbol, dtype=np.float64)
    q = s + 3 * _round_half_up((np.asarray(delta, dtype=np.float64) / N - s) / 3)
    out = q * N
    return out if out.ndim else float(out)


def extract_ternary(delta, N: float):
    """Symbol of ``round(delta / N)``; half-integer ties round upward."""
    _check_step(N, "N")
    q = _round_half_up(np.asarray(delta, dtype=np.float64) / N)
    s = _symbol(q)
    return s if s.ndim else int(s)
