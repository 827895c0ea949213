"""Rotation-invariant descriptors, degradation generators, and the
minimum-distance classifier used by the recognition experiment."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import Image, MomentSet
from .errors import DomainError
from .methods import MethodSpec


@dataclass(frozen=True)
class FeatureVector:
    """Moment magnitudes |M_nm| in canonical S(K) order."""

    values: np.ndarray
    method: MethodSpec
    K: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v < 0):
            raise DomainError("feature magnitudes cannot be negative")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class FlusserRecipe:
    """Exponent recipe for a complex rotation invariant.

    terms: (n_i, m_i, k_i) triples; rotation invariance needs
    sum(m_i * k_i) == 0.
    """

    terms: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        terms = tuple((int(n), int(m), int(k)) for n, m, k in self.terms)
        object.__setattr__(self, "terms", terms)
        if sum(m * k for _, m, k in terms) != 0:
            raise DomainError("invalid recipe: sum(m_i k_i) must be 0")


def magnitude_features(moments: MomentSet) -> FeatureVector:
    """The rotation-invariant magnitude vector {|M_nm|} over S(K)."""
    return FeatureVector(np.abs(moments.vector()), moments.method, moments.K)


def flusser_invariant(moments: MomentSet, recipe: FlusserRecipe) -> complex:
    """prod_i M_{n_i m_i}^{k_i}; invariant to rotation including phase."""
    acc = 1.0 + 0.0j
    for n, m, k in recipe.terms:
        key = (n, m)
        if key not in moments.coefficients:
            raise DomainError(f"moment ({n},{m}) missing from the set")
        base = complex(moments.coefficients[key])
        if base == 0 and k < 0:
            raise DomainError(f"zero moment ({n},{m}) raised to negative power")
        acc *= base ** k
    return acc


def _rot90_once(px: np.ndarray, c0: float) -> np.ndarray:
    """One exact quarter-turn permutation about the lattice point c0
    (row = col); pixels pulled from outside the raster become 0."""
    N = px.shape[0]
    rr, cc = np.meshgrid(np.arange(N, dtype=float), np.arange(N, dtype=float),
                         indexing="ij")
    sr = np.rint(c0 + (cc - c0)).astype(int)
    sc = np.rint(c0 - (rr - c0)).astype(int)
    ok = (sr >= 0) & (sr < N) & (sc >= 0) & (sc < N)
    out = np.zeros_like(px)
    out[ok] = px[sr[ok], sc[ok]]
    return out


def rotate_image(image: Image, angle_degrees: float,
                 interp: str = "bilinear") -> Image:
    """Rotate about the disk centre of the raster mapping; exterior
    samples fill with 0.

    The mapping x_i = (2i-N)/N puts the disk centre at pixel index
    N/2 - 1 (0-based), half a pixel off the array centre; rotating about
    that point keeps right-angle turns exact pixel permutations that
    commute with moment magnitudes.
    """
    if interp not in ("nearest", "bilinear"):
        raise DomainError(f"unknown interpolation {interp!r}")
    a = float(angle_degrees) % 360.0
    px = image.pixels
    N = image.n
    c = N / 2.0 - 1.0
    if a == 0.0:
        return Image(px)
    if a % 90.0 == 0.0:
        out = px
        for _ in range(int(a // 90)):
            out = _rot90_once(out, c)
        return Image(out)
    rad = math.radians(a)
    cs, sn = math.cos(rad), math.sin(rad)
    rr, cc = np.meshgrid(np.arange(N, dtype=float), np.arange(N, dtype=float),
                         indexing="ij")
    # inverse map: source coordinates of each output pixel; matches the
    # quarter-turn permutation in the 90-degree limit
    dy = rr - c
    dx = cc - c
    sr = c + cs * dy + sn * dx
    sc = c - sn * dy + cs * dx
    if interp == "nearest":
        ri = np.rint(sr).astype(int)
        ci = np.rint(sc).astype(int)
        ok = (ri >= 0) & (ri < N) & (ci >= 0) & (ci < N)
        out = np.zeros_like(px)
        out[ok] = px[ri[ok], ci[ok]]
        return Image(out)
    r0 = np.floor(sr).astype(int)
    c0 = np.floor(sc).astype(int)
    fr = sr - r0
    fc = sc - c0
    out = np.zeros_like(px)
    for dr, dc_, wt in ((0, 0, (1 - fr) * (1 - fc)), (0, 1, (1 - fr) * fc),
                        (1, 0, fr * (1 - fc)), (1, 1, fr * fc)):
        ri = r0 + dr
        ci = c0 + dc_
        ok = (ri >= 0) & (ri < N) & (ci >= 0) & (ci < N)
        out[ok] += wt[ok] * px[ri[ok], ci[ok]]
    return Image(np.clip(out, 0.0, 1.0))


def add_gaussian_noise(image: Image, variance: float, seed: int) -> Image:
    """i.i.d. zero-mean Gaussian noise on the [0, 1] scale, clipped;
    deterministic for a fixed seed."""
    if variance < 0:
        raise DomainError("noise variance cannot be negative")
    if variance == 0.0:
        return Image(image.pixels)
    rng = np.random.default_rng(seed)
    noisy = image.pixels + rng.normal(0.0, math.sqrt(variance),
                                      image.pixels.shape)
    return Image(np.clip(noisy, 0.0, 1.0))


def nn_classify(query: FeatureVector, gallery: list[tuple[object, FeatureVector]]):
    """Label of the nearest gallery vector (Euclidean); ties go to the
    lowest gallery index."""
    if not gallery:
        raise DomainError("gallery must be non-empty")
    q = query.values
    best_label = None
    best_d2 = math.inf
    for label, fv in gallery:
        if len(fv) != len(query):
            raise DomainError("feature dimensions differ between query and gallery")
        d2 = float(np.sum((fv.values - q) ** 2))
        if d2 < best_d2:
            best_d2 = d2
            best_label = label
    return best_label
