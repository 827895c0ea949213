"""Raster-to-disk geometry: coordinate mappings, integration weights,
and polar pixel tilings.

The moment sum needs, for every raster cell, the integral of the
conjugated kernel over the mapped cell region (the weight h_nm).  Cells
are mapped by the incircle rule (disk inscribed in the image square,
boundary cells produce the classic geometric error) or the circumcircle
rule (image square inscribed in the disk, no geometric error).  Polar
tilings sidestep the problem by partitioning the disk into ring/sector
tiles whose angular integral is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, SchemeError
from .kernels import radial_direct, singular_at_zero
from .methods import MethodSpec
from .quadrature import gauss_legendre

SQRT2 = math.sqrt(2.0)

MAPPINGS = ("incircle", "circumcircle", "polar")
STRATEGIES = ("naive", "symmetric", "recursive", "fft")
BOUNDARIES = ("asis", "strict", "clip")
INTERPS = ("bilinear", "bicubic")

# radius below which a quadrature node counts as the singular origin
SINGULAR_EPS = 1e-12


@dataclass(frozen=True)
class Cell:
    """A mapped pixel region: centre (x, y) and extents (dx, dy)."""

    x: float
    y: float
    dx: float
    dy: float

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.y)


def map_incircle(i: int, j: int, N: int) -> Cell:
    """Incircle mapping: x = (2i-N)/N, cell size 2/N."""
    if not (1 <= i <= N and 1 <= j <= N):
        raise DomainError(f"pixel index out of range: ({i}, {j}) for N={N}")
    return Cell((2.0 * i - N) / N, (2.0 * j - N) / N, 2.0 / N, 2.0 / N)


def map_circumcircle(i: int, j: int, N: int) -> Cell:
    """Circumcircle mapping: x = (2i-N)/(sqrt2 N), cell size sqrt2/N."""
    if not (1 <= i <= N and 1 <= j <= N):
        raise DomainError(f"pixel index out of range: ({i}, {j}) for N={N}")
    return Cell((2.0 * i - N) / (SQRT2 * N), (2.0 * j - N) / (SQRT2 * N),
                SQRT2 / N, SQRT2 / N)


@dataclass(frozen=True)
class Scheme:
    """Decomposition configuration.

    mapping:  incircle | circumcircle | polar
    rule:     'zoa' | 'up:<s>' | 'gauss:<g>'   (cell / ring integration)
    strategy: naive | symmetric | recursive | fft
    boundary: asis   - straddling incircle cells integrated over the full
                       square (reproduces the geometric error)
              strict - quadrature nodes with r > 1 are discarded
              clip   - straddling cells quadtree-refined against the disk
    """

    mapping: str = "circumcircle"
    rule: str = "up:3"
    strategy: str = "recursive"
    boundary: str = "asis"
    interp: str = "bilinear"
    rings: int | None = None       # polar tiling rings (default N//2)
    fft_size: int | None = None    # FFT sampling size M (default 4K)

    def __post_init__(self):
        if self.mapping not in MAPPINGS:
            raise SchemeError(f"unknown mapping {self.mapping!r}")
        if self.strategy not in STRATEGIES:
            raise SchemeError(f"unknown strategy {self.strategy!r}")
        if self.boundary not in BOUNDARIES:
            raise SchemeError(f"unknown boundary mode {self.boundary!r}")
        if self.interp not in INTERPS:
            raise SchemeError(f"unknown interpolation {self.interp!r}")
        self.rule_kind()  # validates
        if self.strategy == "fft" and self.mapping != "polar":
            raise SchemeError("fft strategy requires the polar mapping")
        if self.strategy == "symmetric" and self.mapping == "polar":
            raise SchemeError("symmetric folding requires a Cartesian mapping")

    def rule_kind(self) -> tuple[str, int]:
        r = self.rule
        if r == "zoa":
            return "zoa", 1
        if r.startswith("up:"):
            s = int(r[3:])
            if s < 1:
                raise SchemeError(f"up-sampling factor must be >= 1 (got {s})")
            return "up", s
        if r.startswith("gauss:"):
            g = int(r[6:])
            if g < 1:
                raise SchemeError(f"gauss order must be >= 1 (got {g})")
            return "gauss", g
        raise SchemeError(f"unknown rule {self.rule!r}")

    def with_(self, **kw) -> "Scheme":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return {"mapping": self.mapping, "rule": self.rule,
                "strategy": self.strategy, "boundary": self.boundary,
                "interp": self.interp, "rings": self.rings,
                "fft_size": self.fft_size}

    @classmethod
    def from_dict(cls, d: dict) -> "Scheme":
        return cls(**{k: d[k] for k in
                      ("mapping", "rule", "strategy", "boundary", "interp",
                       "rings", "fft_size") if k in d})

    def label(self) -> str:
        bits = [self.mapping, self.rule, self.strategy]
        if self.boundary != "asis":
            bits.append(self.boundary)
        return "+".join(bits)


def rule_offsets(rule: str) -> tuple[np.ndarray, np.ndarray]:
    """1-D sampling offsets (fractions of the cell, in [-1/2, 1/2]) and
    weights (summing to 1) realising the rule on a cell edge."""
    kind, param = Scheme(rule=rule).rule_kind()
    if kind == "zoa":
        return np.array([0.0]), np.array([1.0])
    if kind == "up":
        s = param
        off = (np.arange(s) + 0.5) / s - 0.5
        return off, np.full(s, 1.0 / s)
    x, w = gauss_legendre(param)
    return 0.5 * x, 0.5 * w


def kernel_weight(method: MethodSpec, n: int, m: int, cell: Cell,
                  rule: str = "up:3") -> complex:
    """Integration weight h_nm over one mapped cell.

    ZOA: V*(centre) dx dy; up:s sums s*s sub-cells; gauss:g applies the
    tensor-product Gauss-Legendre rule.  Nodes landing on the singular
    origin of an unbounded kernel are perturbed to r = SINGULAR_EPS.
    """
    off, w1 = rule_offsets(rule)
    u = cell.x + off * cell.dx
    v = cell.y + off * cell.dy
    uu, vv = np.meshgrid(u, v, indexing="ij")
    ww = np.outer(w1, w1) * (cell.dx * cell.dy)
    r = np.hypot(uu, vv).ravel()
    theta = np.arctan2(vv, uu).ravel()
    if singular_at_zero(method) and np.any(r < SINGULAR_EPS):
        r = np.where(r < SINGULAR_EPS, SINGULAR_EPS, r)
    rad = np.asarray(radial_direct(method, n, r, m, extend=True))
    ang = np.exp(-1j * m * theta)
    return complex(np.sum(np.conj(rad) * ang * ww.ravel()))


def angular_integral_exact(m: int, theta_a: float, theta_b: float) -> complex:
    """Closed-form integral of exp(-j m theta) over [theta_a, theta_b]."""
    if theta_a > theta_b:
        raise DomainError("theta_a must be <= theta_b")
    if m == 0:
        return complex(theta_b - theta_a)
    return 1j * (np.exp(-1j * m * theta_b) - np.exp(-1j * m * theta_a)) / m


# ---------------------------------------------------------------------------
# polar pixel tiling
# ---------------------------------------------------------------------------

@dataclass
class PolarGrid:
    """Area-balanced ring/sector tiling of the unit disk.

    Ring u (1-based) spans (edges[u-1], edges[u]]; its sectors split
    [0, 2pi) uniformly.  Samples sit at tile centres; none lies at r = 0.
    """

    N: int
    ring_edges: np.ndarray                 # U+1 edges, 0 .. 1
    sector_counts: np.ndarray              # sectors per ring
    intensities: list[np.ndarray] | None = field(default=None)

    @property
    def rings(self) -> int:
        return len(self.ring_edges) - 1

    @property
    def ring_radii(self) -> np.ndarray:
        return self.ring_edges[1:]

    def sample_radii(self) -> np.ndarray:
        return 0.5 * (self.ring_edges[:-1] + self.ring_edges[1:])

    def sector_edges(self, u: int) -> np.ndarray:
        s = int(self.sector_counts[u])
        return 2.0 * math.pi * np.arange(s + 1) / s

    def sample_thetas(self, u: int) -> np.ndarray:
        s = int(self.sector_counts[u])
        return 2.0 * math.pi * (np.arange(s) + 0.5) / s

    def tile_area_total(self) -> float:
        edges = self.ring_edges
        return float(np.sum(math.pi * (edges[1:] ** 2 - edges[:-1] ** 2)))


def polar_grid(N: int, U: int | None = None) -> PolarGrid:
    """Build the tiling: U rings of equal radial width, ring u carrying
    max(8, round(2 pi u)) sectors rounded to a multiple of 4."""
    if U is None:
        U = max(1, N // 2)
    if U < 1:
        raise DomainError(f"polar grid needs U >= 1 rings (got {U})")
    edges = np.arange(U + 1) / U
    counts = np.empty(U, dtype=int)
    for u in range(1, U + 1):
        raw = max(8, round(2.0 * math.pi * u))
        counts[u - 1] = max(4, 4 * round(raw / 4))
    return PolarGrid(N=N, ring_edges=edges, sector_counts=counts)


def _bilinear(image: np.ndarray, col: np.ndarray, row: np.ndarray) -> np.ndarray:
    N = image.shape[0]
    c0 = np.clip(np.floor(col), 0, N - 1).astype(int)
    r0 = np.clip(np.floor(row), 0, N - 1).astype(int)
    c1 = np.minimum(c0 + 1, N - 1)
    r1 = np.minimum(r0 + 1, N - 1)
    fc = np.clip(col - c0, 0.0, 1.0)
    fr = np.clip(row - r0, 0.0, 1.0)
    top = image[r0, c0] * (1 - fc) + image[r0, c1] * fc
    bot = image[r1, c0] * (1 - fc) + image[r1, c1] * fc
    return top * (1 - fr) + bot * fr


def _cubic_kernel(t: np.ndarray) -> np.ndarray:
    # Catmull-Rom (a = -1/2)
    at = np.abs(t)
    at2 = at * at
    at3 = at2 * at
    out = np.where(at <= 1.0, 1.5 * at3 - 2.5 * at2 + 1.0,
                   np.where(at < 2.0, -0.5 * at3 + 2.5 * at2 - 4.0 * at + 2.0, 0.0))
    return out


def _bicubic(image: np.ndarray, col: np.ndarray, row: np.ndarray) -> np.ndarray:
    N = image.shape[0]
    c0 = np.floor(col).astype(int)
    r0 = np.floor(row).astype(int)
    fc = col - c0
    fr = row - r0
    acc = np.zeros_like(col, dtype=float)
    for dr in range(-1, 3):
        wr = _cubic_kernel(fr - dr)
        ri = np.clip(r0 + dr, 0, N - 1)
        rowacc = np.zeros_like(col, dtype=float)
        for dc in range(-1, 3):
            wc = _cubic_kernel(fc - dc)
            ci = np.clip(c0 + dc, 0, N - 1)
            rowacc += wc * image[ri, ci]
        acc += wr * rowacc
    return acc


def sample_image(pixels: np.ndarray, x: np.ndarray, y: np.ndarray,
                 interp: str = "bilinear", mapping: str = "incircle") -> np.ndarray:
    """Interpolate raster intensities at mapped coordinates (x, y).

    The inverse of the cell-centre mapping places column i-1 at
    x_i = (2i-N)/N (incircle) or (2i-N)/(sqrt2 N) (circumcircle); points
    mapped outside the pixel lattice clamp to the border pixel.
    """
    N = pixels.shape[0]
    if mapping == "circumcircle":
        x = x * SQRT2
        y = y * SQRT2
    col = (np.asarray(x) + 1.0) * N / 2.0 - 1.0
    row = (np.asarray(y) + 1.0) * N / 2.0 - 1.0
    if interp == "bicubic":
        return _bicubic(pixels, col, row)
    return _bilinear(pixels, col, row)


def resample_to_polar(pixels: np.ndarray, grid: PolarGrid,
                      interp: str = "bilinear",
                      mapping: str = "incircle") -> PolarGrid:
    """Attach interpolated intensities to every tile centre of `grid`."""
    if pixels.shape[0] != pixels.shape[1]:
        raise DomainError("polar resampling expects a square image")
    if interp not in INTERPS:
        raise DomainError(f"unknown interpolation {interp!r}")
    radii = grid.sample_radii()
    vals = []
    for u in range(grid.rings):
        th = grid.sample_thetas(u)
        x = radii[u] * np.cos(th)
        y = radii[u] * np.sin(th)
        vals.append(sample_image(pixels, x, y, interp=interp, mapping=mapping))
    return PolarGrid(N=grid.N, ring_edges=grid.ring_edges,
                     sector_counts=grid.sector_counts, intensities=vals)
