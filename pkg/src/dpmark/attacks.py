"""Signal-processing attacks: JPEG quantisation, filtering, noise and resizing.

Stochastic attacks draw from numpy's PCG64 generator seeded explicitly, so
output depends only on (image, parameters, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy import ndimage

from .pixelcore import as_gray
from .transform import dct2, idct2, tile, untile

JPEG_LUMA = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)


def _finish(x) -> np.ndarray:
    return as_gray(np.clip(np.floor(np.asarray(x) + 0.5), 0, 255))


def jpeg_table(qf: int) -> np.ndarray:
    """IJG-scaled luminance quantisation table."""
    if not 1 <= qf <= 100:
        raise ValueError(f"quality factor must be in 1..100, got {qf}")
    scale = 5000 // qf if qf < 50 else 200 - 2 * qf
    return np.clip((JPEG_LUMA * scale + 50) // 100, 1, 255)


def jpeg_attack(img, qf: int) -> np.ndarray:
    """Baseline JPEG luminance round trip minus the (lossless) entropy coder."""
    table = jpeg_table(qf)
    img = as_gray(img)
    h, w = img.shape
    if h % 8 or w % 8:
        raise ValueError(f"image {w}x{h} is not a multiple of 8")
    coeffs = dct2(tile(img, 8) - 128.0)
    # DC is sum/8, so exact half-step ties are common; snap float noise so they round up
    coeffs = np.floor(np.round(coeffs / table, 9) + 0.5) * table
    spatial = idct2(coeffs) + 128.0
    return untile(spatial, w, h)


def _check_kernel(k):
    if k < 3 or k % 2 == 0:
        raise ValueError(f"kernel size must be an odd integer >= 3, got {k}")


def average_filter(img, k: int) -> np.ndarray:
    _check_kernel(k)
    x = as_gray(img).astype(np.float64)
    return _finish(ndimage.uniform_filter(x, size=k, mode="nearest"))


def median_filter(img, k: int) -> np.ndarray:
    _check_kernel(k)
    return as_gray(ndimage.median_filter(as_gray(img), size=k, mode="nearest"))


def gaussian_kernel(k: int, sigma: float) -> np.ndarray:
    _check_kernel(k)
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    r = np.arange(k) - k // 2
    g = np.exp(-(r**2) / (2.0 * sigma**2))
    kern = np.outer(g, g)
    return kern / kern.sum()


def gaussian_filter(img, k: int, sigma: float) -> np.ndarray:
    kern = gaussian_kernel(k, sigma)
    x = as_gray(img).astype(np.float64)
    return _finish(ndimage.correlate(x, kern, mode="nearest"))


def gaussian_noise(img, variance: float, seed: int) -> np.ndarray:
    """Add N(0, (255*sqrt(variance))^2) noise; ``variance`` is on the [0,1] scale."""
    if variance < 0:
        raise ValueError(f"variance must be non-negative, got {variance}")
    img = as_gray(img)
    if variance == 0:
        return img
    rng = np.random.Generator(np.random.PCG64(seed))
    noise = rng.normal(0.0, 255.0 * np.sqrt(variance), size=img.shape)
    return _finish(img + noise)


def salt_pepper(img, density: float, seed: int) -> np.ndarray:
    """Set ``floor(density% * pixels)`` distinct pixels: half to 255, the rest to 0."""
    if not 0 <= density <= 100:
        raise ValueError(f"density must be within [0, 100] percent, got {density}")
    img = as_gray(img)
    count = int(np.floor(density / 100.0 * img.size))
    rng = np.random.Generator(np.random.PCG64(seed))
    pos = rng.permutation(img.size)[:count]
    out = img.copy().reshape(-1)
    n_salt = count // 2
    out[pos[:n_salt]] = 255
    out[pos[n_salt:]] = 0
    return as_gray(out.reshape(img.shape))


def resize_attack(img, factor: float) -> np.ndarray:
    """Bilinear down-scale by ``factor`` and back up to the original size.

    Shrinking uses a triangle kernel widened by ``1/factor`` (antialiased),
    as image editors do for bilinear reduction.
    """
    if not 0 < factor <= 1:
        raise ValueError(f"scale factor must be in (0, 1], got {factor}")
    img = as_gray(img)
    h, w = img.shape
    if factor == 1:
        return img
    size = (max(1, round(w * factor)), max(1, round(h * factor)))
    f = Image.fromarray(img.astype(np.float32), mode="F")
    back = f.resize(size, Image.Resampling.BILINEAR).resize((w, h), Image.Resampling.BILINEAR)
    return _finish(np.asarray(back, dtype=np.float64))


# -- attack specs -------------------------------------------------------------

# kind -> (CLI name, {param: type}, stochastic)
KINDS = {
    "jpeg": ("jpeg", {"qf": int}, False),
    "avg_filter": ("avg", {"k": int}, False),
    "median_filter": ("median", {"k": int}, False),
    "gauss_filter": ("gauss", {"k": int, "sigma": float}, False),
    "gauss_noise": ("gnoise", {"var": float}, True),
    "sp_noise": ("spnoise", {"pct": float}, True),
    "resize": ("resize", {"f": float}, False),
}
_BY_CLI = {v[0]: k for k, v in KINDS.items()}


@dataclass(frozen=True)
class AttackSpec:
    kind: str
    params: tuple = ()
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown attack kind {self.kind!r}")
        _, schema, _ = KINDS[self.kind]
        given = dict(self.params)
        if set(given) != set(schema):
            raise ValueError(
                f"{self.cli_name} needs parameters {sorted(schema)}, got {sorted(given)}"
            )
        ordered = tuple((name, schema[name](given[name])) for name in schema)
        object.__setattr__(self, "params", ordered)
        if self.seed is not None:
            object.__setattr__(self, "seed", int(self.seed))

    @property
    def cli_name(self) -> str:
        return KINDS[self.kind][0]

    @property
    def stochastic(self) -> bool:
        return KINDS[self.kind][2]

    @property
    def args(self) -> dict:
        return dict(self.params)

    def param_str(self) -> str:
        return ",".join(f"{k}={_fmt(v)}" for k, v in self.params)

    def __str__(self):
        s = f"{self.cli_name}:{self.param_str()}"
        if self.stochastic and self.seed is not None:
            s += f",seed={self.seed}"
        return s

    def with_seed(self, seed: int) -> "AttackSpec":
        if not self.stochastic or self.seed is not None:
            return self
        return AttackSpec(self.kind, self.params, seed)

    def apply(self, img, seed: int | None = None) -> np.ndarray:
        a = self.args
        if self.stochastic:
            seed = self.seed if self.seed is not None else seed
            if seed is None:
                raise ValueError(f"{self.cli_name} attack requires a seed")
        if self.kind == "jpeg":
            return jpeg_attack(img, a["qf"])
        if self.kind == "avg_filter":
            return average_filter(img, a["k"])
        if self.kind == "median_filter":
            return median_filter(img, a["k"])
        if self.kind == "gauss_filter":
            return gaussian_filter(img, a["k"], a["sigma"])
        if self.kind == "gauss_noise":
            return gaussian_noise(img, a["var"], seed)
        if self.kind == "sp_noise":
            return salt_pepper(img, a["pct"], seed)
        return resize_attack(img, a["f"])


def _fmt(v) -> str:
    return str(v) if isinstance(v, int) else f"{v:g}"


def parse_attack(text: str) -> AttackSpec:
    """Parse ``name:key=value,...`` such as ``gauss:k=7,sigma=2.5``."""
    name, sep, rest = text.strip().partition(":")
    if not sep or name not in _BY_CLI:
        raise ValueError(f"bad attack spec {text!r}; expected one of {sorted(_BY_CLI)}:key=value")
    params, seed = {}, None
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise ValueError(f"bad attack parameter {item!r} in {text!r}")
        key = key.strip()
        if key == "seed":
            seed = int(value)
        else:
            params[key] = float(value) if "." in value or "e" in value.lower() else int(value)
    kind = _BY_CLI[name]
    schema = KINDS[kind][1]
    if seed is not None and not KINDS[kind][2]:
        raise ValueError(f"{name} attack does not take a seed")
    try:
        return AttackSpec(kind, tuple((k, schema.get(k, float)(v)) for k, v in params.items()), seed)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad attack spec {text!r}: {exc}") from None


def parse_attack_list(text: str) -> list[AttackSpec]:
    """Split a comma/semicolon separated list of specs.

    A comma-separated item without ``:`` continues the previous spec, so
    ``jpeg:qf=30, gauss:k=7,sigma=2.5`` yields two attacks. The word
    ``standard`` expands to :data:`STANDARD_GRID`.
    """
    specs, current = [], None
    for item in (s.strip() for s in text.replace(";", ",").split(",")):
        if not item:
            continue
        if item == "standard":
            specs.extend(STANDARD_GRID)
            continue
        if ":" in item:
            if current is not None:
                specs.append(parse_attack(current))
            current = item
        elif current is None:
            raise ValueError(f"attack parameter {item!r} has no attack name")
        else:
            current += "," + item
    if current is not None:
        specs.append(parse_attack(current))
    return specs


def _grid():
    g = [AttackSpec("jpeg", (("qf", q),)) for q in (60, 50, 40, 30, 20)]
    g += [AttackSpec("avg_filter", (("k", k),)) for k in (3, 5, 7, 9)]
    g += [AttackSpec("median_filter", (("k", k),)) for k in (3, 5, 7, 9)]
    # the 3x3 row uses sigma 0.5
    g += [
        AttackSpec("gauss_filter", (("k", k), ("sigma", s)))
        for k, s in ((3, 0.5), (5, 1.5), (7, 2.5), (9, 3.5))
    ]
    g += [AttackSpec("gauss_noise", (("var", v),)) for v in (1e-4, 5e-4, 1e-3, 5e-3)]
    g += [AttackSpec("sp_noise", (("pct", p),)) for p in (0.1, 0.5, 1.0, 5.0)]
    g += [AttackSpec("resize", (("f", f),)) for f in (0.8, 0.6, 0.4, 0.2)]
    return tuple(g)


STANDARD_GRID = _grid()
