"""Moment decomposition and image reconstruction.

Strategies
----------
naive      per-coefficient direct summation: every (n, m) evaluates the
           kernel at every sampling node, as in the textbook method.
recursive  radial kernels come from the stable three-term recurrence,
           evaluated once per order and shared across coefficients.
symmetric  kernels evaluated on one octant only; the other seven values
           follow from the eightfold symmetry of the disk.
fft        harmonic kernels read off a 2-D FFT of the polar resampling.

The accumulation order of every coefficient is fixed, so results are
bitwise reproducible regardless of the worker count.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SchemeError
from .geometry import (SINGULAR_EPS, PolarGrid, Scheme, polar_grid,
                       resample_to_polar, rule_offsets, sample_image)
from .kernels import radial_direct, radial_table, singular_at_zero
from .methods import MethodSpec, OrderIndex, order_set
from .quadrature import gauss_legendre_on

log = logging.getLogger("momentkit")

SQRT2 = math.sqrt(2.0)


def strict_mode_enabled() -> bool:
    return os.environ.get("MOMENTKIT_STRICT", "") not in ("", "0")


# ---------------------------------------------------------------------------
# images and moment sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Image:
    """Square grayscale raster with intensities in [0, 1].

    pixels[row, col] maps to the cell (i, j) = (col+1, row+1); the row
    index plays the role of the y coordinate (no display flip).
    """

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=float)
        if px.ndim != 2 or px.shape[0] != px.shape[1]:
            raise DomainError("images must be square 2-D arrays")
        if px.shape[0] < 2:
            raise DomainError("images must be at least 2x2")
        if not np.all(np.isfinite(px)):
            raise DomainError("image intensities must be finite")
        if px.min() < 0.0 or px.max() > 1.0:
            raise DomainError("image intensities must lie in [0, 1]")
        px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def n(self) -> int:
        return self.pixels.shape[0]

    def sha256(self) -> str:
        return hashlib.sha256(self.pixels.tobytes()).hexdigest()

    @classmethod
    def from_raw(cls, raw: np.ndarray) -> "Image":
        """Clip a raw synthesis field into a valid image (export step)."""
        return cls(np.clip(np.asarray(raw, dtype=float), 0.0, 1.0))


@dataclass
class MomentSet:
    method: MethodSpec
    K: int
    scheme: Scheme
    coefficients: dict[OrderIndex, complex]
    image_sha256: str = ""
    fft_size: int | None = None

    def vector(self) -> np.ndarray:
        """Coefficients in canonical S(K) order."""
        idx = order_set(self.method, self.K).indices
        return np.array([self.coefficients[k] for k in idx], dtype=complex)

    @property
    def unstable(self) -> bool:
        v = self.vector()
        return bool(v.size and not np.all(np.isfinite(v.view(float))))

    def truncated(self, K: int) -> "MomentSet":
        """Restrict to S(K) for a smaller K (order sets are nested)."""
        if K > self.K:
            raise DomainError(f"cannot truncate K={self.K} up to {K}")
        keep = {k: self.coefficients[k] for k in order_set(self.method, K).indices}
        return MomentSet(self.method, K, self.scheme, keep,
                         self.image_sha256, self.fft_size)


class EvalCounter:
    """Counts pointwise kernel evaluations (one radial+angular pair)."""

    def __init__(self):
        self.kernel_evals = 0

    def reset(self):
        self.kernel_evals = 0

    def add(self, n: int):
        self.kernel_evals += int(n)


eval_counter = EvalCounter()


def default_scheme(method: MethodSpec) -> Scheme:
    """Per-family defaults: recursion for Jacobi kernels, FFT for
    harmonic ones.  Jacobi kernels that are unbounded at the origin get
    the polar tiling (its grid never samples r = 0)."""
    if method.kind == "harmonic":
        return Scheme(mapping="polar", rule="gauss:5", strategy="fft")
    if method.kind == "jacobi":
        if singular_at_zero(method):
            return Scheme(mapping="polar", rule="gauss:5", strategy="recursive")
        return Scheme(mapping="circumcircle", rule="up:3", strategy="recursive")
    return Scheme(mapping="circumcircle", rule="up:3", strategy="naive")


# ---------------------------------------------------------------------------
# Cartesian sampling nodes
# ---------------------------------------------------------------------------

@dataclass
class _NodeSet:
    r: np.ndarray          # flat node radii
    theta: np.ndarray      # flat node angles
    w: np.ndarray          # flat node area weights (0 for masked nodes)
    pix: np.ndarray        # flat pixel index per node
    n_kept_cells: int

    @property
    def count(self) -> int:
        return self.r.size


_node_cache: dict[tuple, _NodeSet] = {}


def _cell_centers(N: int, mapping: str):
    i = np.arange(1, N + 1, dtype=float)
    if mapping == "circumcircle":
        x = (2.0 * i - N) / (SQRT2 * N)
        d = SQRT2 / N
    else:
        x = (2.0 * i - N) / N
        d = 2.0 / N
    return x, d


def _clip_leaves(cx, cy, h, depth_left):
    """Quadtree refinement of a straddling square against the unit disk.

    Returns (xs, ys, areas) of leaves classified inside (or by centre at
    the bottom level)."""
    near = math.hypot(max(abs(cx) - h / 2, 0.0), max(abs(cy) - h / 2, 0.0))
    if near > 1.0:
        return [], [], []
    far = math.hypot(abs(cx) + h / 2, abs(cy) + h / 2)
    if far <= 1.0:
        return [cx], [cy], [h * h]
    if depth_left == 0:
        if math.hypot(cx, cy) <= 1.0:
            return [cx], [cy], [h * h]
        return [], [], []
    xs, ys, ar = [], [], []
    q = h / 4.0
    for sx in (-q, q):
        for sy in (-q, q):
            a, b, c = _clip_leaves(cx + sx, cy + sy, h / 2, depth_left - 1)
            xs += a
            ys += b
            ar += c
    return xs, ys, ar


def cartesian_nodes(N: int, mapping: str, rule: str, boundary: str) -> _NodeSet:
    """Sampling nodes for an N x N raster under the given scheme parts.

    asis/strict keep cells whose centre lies in the disk (the paper's
    convention); clip keeps every cell intersecting the disk and refines
    straddling ones with a depth-7 quadtree.
    """
    key = (N, mapping, rule, boundary)
    if key in _node_cache:
        return _node_cache[key]
    xs, d = _cell_centers(N, mapping)
    X, Y = np.meshgrid(xs, xs, indexing="ij")      # X: i-axis, Y: j-axis
    rc = np.hypot(X, Y)
    II, JJ = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    pixmap = JJ * N + II                           # pixels[row=j-1, col=i-1]
    off, w1 = rule_offsets(rule)
    oa, ob = np.meshgrid(off, off, indexing="ij")
    subw = np.outer(w1, w1).ravel() * d * d
    oa = oa.ravel() * d
    ob = ob.ravel() * d

    if boundary == "clip":
        near = np.hypot(np.maximum(np.abs(X) - d / 2, 0.0),
                        np.maximum(np.abs(Y) - d / 2, 0.0))
        far = np.hypot(np.abs(X) + d / 2, np.abs(Y) + d / 2)
        interior = far <= 1.0
        straddle = (~interior) & (near <= 1.0)
        keep = interior
    else:
        keep = rc <= 1.0
        straddle = np.zeros_like(keep)

    cx = X[keep]
    cy = Y[keep]
    pix_k = pixmap[keep]
    nx = (cx[:, None] + oa[None, :]).ravel()
    ny = (cy[:, None] + ob[None, :]).ravel()
    w = np.broadcast_to(subw, (cx.size, subw.size)).ravel().copy()
    pix = np.repeat(pix_k, subw.size)
    if boundary == "strict":
        w[np.hypot(nx, ny) > 1.0] = 0.0
    if boundary == "clip" and np.any(straddle):
        exs, eys, ews, epix = [], [], [], []
        for cxs, cys, p in zip(X[straddle], Y[straddle], pixmap[straddle]):
            lx, ly, la = _clip_leaves(float(cxs), float(cys), d, 7)
            exs += lx
            eys += ly
            ews += la
            epix += [p] * len(lx)
        nx = np.concatenate([nx, np.array(exs)])
        ny = np.concatenate([ny, np.array(eys)])
        w = np.concatenate([w, np.array(ews)])
        pix = np.concatenate([pix, np.array(epix, dtype=pix.dtype)])

    ns = _NodeSet(r=np.hypot(nx, ny), theta=np.arctan2(ny, nx),
                  w=w, pix=pix, n_kept_cells=int(cx.size))
    for a in (ns.r, ns.theta, ns.w, ns.pix):
        a.setflags(write=False)
    _node_cache[key] = ns
    return ns


def _effective_radii(method: MethodSpec, r: np.ndarray) -> np.ndarray:
    if singular_at_zero(method) and np.any(r < SINGULAR_EPS):
        log.warning("%s: quadrature node at the origin perturbed to r=%g",
                    method.label(), SINGULAR_EPS)
        return np.where(r < SINGULAR_EPS, SINGULAR_EPS, r)
    return r


# ---------------------------------------------------------------------------
# Cartesian strategies
# ---------------------------------------------------------------------------

def _decompose_cartesian_naive(image, method, K, scheme, threads):
    nodes = cartesian_nodes(image.n, scheme.mapping, scheme.rule, scheme.boundary)
    r = _effective_radii(method, nodes.r)
    f = image.pixels.ravel()[nodes.pix]
    fw = f * nodes.w
    idx = order_set(method, K).indices

    def one(nm):
        n, m = nm
        rad = np.asarray(radial_direct(method, n, r, m if method.radial_uses_m else None,
                                       extend=True))
        ang = np.exp(-1j * m * nodes.theta)
        eval_counter.add(r.size)
        return nm, complex(np.dot(np.conj(rad) * ang, fw))

    coeffs = dict(_map_tasks(one, idx, threads))
    return coeffs


def _map_tasks(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(it) for it in items]


def _radial_rows(method, K, r, m=None, strategy="recursive"):
    """(orders, rows) of radial values; recursion for Jacobi kernels,
    direct tables otherwise."""
    if strategy == "recursive":
        return radial_table(method, K, r, m, extend=True)
    idx = order_set(method, K)
    ns = sorted({n for n, _ in idx.indices})
    rows = np.empty((len(ns), r.size),
                    dtype=complex if method.complex_radial else float)
    for i, n in enumerate(ns):
        rows[i] = radial_direct(method, n, r, m, extend=True)
    return ns, rows


def _decompose_cartesian_recursive(image, method, K, scheme, threads):
    nodes = cartesian_nodes(image.n, scheme.mapping, scheme.rule, scheme.boundary)
    r = _effective_radii(method, nodes.r)
    fw = image.pixels.ravel()[nodes.pix] * nodes.w
    coeffs: dict[OrderIndex, complex] = {}
    E1 = np.exp(-1j * nodes.theta)

    if method.radial_uses_m:
        Em = np.ones_like(E1)
        for m in range(0, K + 1):
            if m > 0:
                Em = Em * E1
            orders, table = radial_table(method, K, r, m, extend=True)
            if not orders:
                continue
            eval_counter.add(len(orders) * r.size)
            A = Em * fw
            vals = table @ A
            for i, n in enumerate(orders):
                coeffs[OrderIndex(n, m)] = complex(vals[i])
                if m > 0:
                    coeffs[OrderIndex(n, -m)] = complex(np.conj(vals[i]))
    else:
        orders, table = radial_table(method, K, r, extend=True)
        eval_counter.add(len(orders) * r.size)
        Em = np.ones_like(E1)
        for m in range(0, K + 1):
            if m > 0:
                Em = Em * E1
            A = Em * fw
            vals = table @ A
            for i, n in enumerate(orders):
                coeffs[OrderIndex(n, m)] = complex(vals[i])
                if m > 0:
                    coeffs[OrderIndex(n, -m)] = complex(np.conj(vals[i]))
    return coeffs


# eightfold symmetry: position transforms of a representative point
# (x, y) with 0 <= y <= x, paired with the factor turning E = e^{-jm t}
# into e^{-jm t'} (True marks conj(E)); order P1..P8
_ORBIT = (
    (lambda dx, dy: (dx, dy), 0, False),    # P1 (x, y)
    (lambda dx, dy: (dy, dx), 3, True),     # P2 (y, x)      (-j)^m conj
    (lambda dx, dy: (-dy, dx), 3, False),   # P3 (-y, x)     (-j)^m
    (lambda dx, dy: (-dx, dy), 2, True),    # P4 (-x, y)     (-1)^m conj
    (lambda dx, dy: (-dx, -dy), 2, False),  # P5 (-x, -y)    (-1)^m
    (lambda dx, dy: (-dy, -dx), 1, True),   # P6 (-y, -x)    (+j)^m conj
    (lambda dx, dy: (dy, -dx), 1, False),   # P7 (y, -x)     (+j)^m
    (lambda dx, dy: (dx, -dy), 0, True),    # P8 (x, -y)     conj
)
_PHASE_POW = (1.0, 1j, -1.0, -1j)  # i^k


def _fold_structure(N: int, mapping: str, rule: str, boundary: str):
    """Representative octant cells, their orbits, and leftover cells."""
    c = N // 2
    xs, d = _cell_centers(N, mapping)
    off, w1 = rule_offsets(rule)
    oa, ob = np.meshgrid(off, off, indexing="ij")
    subw = np.outer(w1, w1).ravel() * d * d
    oa = oa.ravel() * d
    ob = ob.ravel() * d

    classes = []
    for name in ("generic", "diag", "axis", "center"):
        di, dj = np.meshgrid(np.arange(c), np.arange(c), indexing="ij")
        if name == "generic":
            sel = (dj >= 1) & (di > dj)
        elif name == "diag":
            sel = (dj == di) & (di >= 1)
        elif name == "axis":
            sel = (dj == 0) & (di >= 1)
        else:
            sel = (di == 0) & (dj == 0)
        x = xs[c + di[sel] - 1]
        y = xs[c + dj[sel] - 1]
        keep = np.hypot(x, y) <= 1.0
        x, y = x[keep], y[keep]
        if name == "generic":
            members = range(8)
        elif name == "diag":
            members = (0, 2, 4, 6)
        elif name == "axis":
            members = (0, 1, 3, 5)
        else:
            members = (0,)
        pixsets = []
        for k in members:
            tf, _, _ = _ORBIT[k]
            tx, ty = tf(di[sel][keep], dj[sel][keep])
            ii = c + tx
            jj = c + ty
            pixsets.append(((jj - 1) * N + (ii - 1)).astype(int))
        nx = (x[:, None] + oa[None, :])
        ny = (y[:, None] + ob[None, :])
        w = np.broadcast_to(subw, nx.shape).copy()
        if boundary == "strict":
            w[np.hypot(nx, ny) > 1.0] = 0.0
        classes.append({
            "name": name, "members": tuple(members), "pix": pixsets,
            "r": np.hypot(nx, ny), "theta": np.arctan2(ny, nx), "w": w,
        })

    # edge cells i == N or j == N with centre inside the disk
    txs, tys, tpix = [], [], []
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            if i != N and j != N:
                continue
            x, y = xs[i - 1], xs[j - 1]
            if math.hypot(x, y) <= 1.0:
                txs.append(x)
                tys.append(y)
                tpix.append((j - 1) * N + (i - 1))
    if txs:
        ex = np.array(txs)[:, None] + oa[None, :]
        ey = np.array(tys)[:, None] + ob[None, :]
        ew = np.broadcast_to(subw, ex.shape).copy()
        if boundary == "strict":
            ew[np.hypot(ex, ey) > 1.0] = 0.0
        edge = {"pix": np.array(tpix, dtype=int),
                "r": np.hypot(ex, ey), "theta": np.arctan2(ey, ex), "w": ew}
    else:
        edge = None
    return classes, edge


_fold_cache: dict[tuple, tuple] = {}


def _decompose_cartesian_symmetric(image, method, K, scheme, threads):
    N = image.n
    if N % 2:
        raise SchemeError("symmetric folding needs an even raster size")
    key = (N, scheme.mapping, scheme.rule, scheme.boundary)
    if key not in _fold_cache:
        _fold_cache[key] = _fold_structure(N, scheme.mapping, scheme.rule,
                                           scheme.boundary)
    classes, edge = _fold_cache[key]
    fflat = image.pixels.ravel()
    idx = order_set(method, K).indices

    def one(nm):
        n, m = nm
        acc = 0.0 + 0.0j
        for cl in classes:
            if cl["r"].size == 0:
                continue
            r = _effective_radii(method, cl["r"])
            rad = np.asarray(radial_direct(
                method, n, r, m if method.radial_uses_m else None, extend=True))
            E = np.exp(-1j * m * cl["theta"])
            eval_counter.add(r.size)
            fE = np.zeros(cl["r"].shape[0], dtype=complex)
            fEc = np.zeros_like(fE)
            for k, pix in zip(cl["members"], cl["pix"]):
                _, ppow, conj = _ORBIT[k]
                coef = _PHASE_POW[(ppow * (m % 4)) % 4]
                if conj:
                    fEc += coef * fflat[pix]
                else:
                    fE += coef * fflat[pix]
            inner = E * fE[:, None] + np.conj(E) * fEc[:, None]
            acc += np.sum(np.conj(rad) * inner * cl["w"])
        if edge is not None:
            r = _effective_radii(method, edge["r"])
            rad = np.asarray(radial_direct(
                method, n, r, m if method.radial_uses_m else None, extend=True))
            E = np.exp(-1j * m * edge["theta"])
            eval_counter.add(r.size)
            acc += np.sum(np.conj(rad) * E * edge["w"] * fflat[edge["pix"]][:, None])
        return nm, complex(acc)

    return dict(_map_tasks(one, idx, threads))

# ---------------------------------------------------------------------------
# polar pixel tiling path
# ---------------------------------------------------------------------------

def _ring_radial_integrals(method, K, grid: PolarGrid, scheme: Scheme, m=None):
    """integral_ring R_n(r) r dr for every ring and order, via the ring
    integration rule (gauss:g per ring, up:s midpoints, or zoa)."""
    kind, param = scheme.rule_kind()
    edges = grid.ring_edges
    U = grid.rings
    nodes, wts = [], []
    for u in range(U):
        a, b = edges[u], edges[u + 1]
        if kind == "gauss":
            x, w = gauss_legendre_on(a, b, param)
        elif kind == "up":
            s = param
            x = a + (b - a) * (np.arange(s) + 0.5) / s
            w = np.full(s, (b - a) / s)
        else:
            x = np.array([0.5 * (a + b)])
            w = np.array([b - a])
        nodes.append(x)
        wts.append(w)
    allx = np.concatenate(nodes)
    allw = np.concatenate(wts)
    strategy = "recursive" if (scheme.strategy == "recursive"
                               and method.kind == "jacobi") else "direct"
    orders, rows = _radial_rows(method, K, allx, m, strategy)
    eval_counter.add(len(orders) * allx.size)
    weighted = rows * (allw * allx)[None, :]
    per = [len(x) for x in nodes]
    splits = np.cumsum(per)[:-1]
    ints = np.stack([seg.sum(axis=1) for seg in
                     np.split(weighted, splits, axis=1)], axis=1)
    return orders, ints      # ints[order_index, ring]


def _ring_angular_sums(grid: PolarGrid, K: int) -> np.ndarray:
    """A[u, m] = sum_v f_uv * exact integral of e^{-j m theta} over the
    sector, for m = -K..K."""
    if grid.intensities is None:
        raise SchemeError("polar grid has no resampled intensities")
    U = grid.rings
    ms = np.arange(-K, K + 1)
    A = np.zeros((U, ms.size), dtype=complex)
    for u in range(U):
        f = grid.intensities[u]
        edges = grid.sector_edges(u)
        E = np.exp(-1j * np.outer(ms, edges))        # (nm, S+1)
        with np.errstate(divide="ignore", invalid="ignore"):
            seg = 1j * (E[:, 1:] - E[:, :-1]) / ms[:, None]
        seg[ms == 0, :] = np.diff(edges)[None, :]
        A[u] = seg @ f
    return A


def _decompose_polar(image, method, K, scheme, threads):
    grid = polar_grid(image.n, scheme.rings)
    grid = resample_to_polar(image.pixels, grid, interp=scheme.interp,
                             mapping="incircle")
    A = _ring_angular_sums(grid, K)                  # (U, 2K+1)
    coeffs: dict[OrderIndex, complex] = {}
    sk = order_set(method, K)
    wanted = set(sk.indices)
    if method.radial_uses_m:
        for am in range(0, K + 1):
            orders, ints = _ring_radial_integrals(method, K, grid, scheme, am)
            for sign in (1, -1) if am else (1,):
                col = am * sign + K
                vals = np.conj(ints) @ A[:, col]
                for i, n in enumerate(orders):
                    if OrderIndex(n, am * sign) in wanted:
                        coeffs[OrderIndex(n, am * sign)] = complex(vals[i])
    else:
        orders, ints = _ring_radial_integrals(method, K, grid, scheme)
        M = np.conj(ints) @ A                        # (norders, 2K+1)
        for i, n in enumerate(orders):
            for j, m in enumerate(range(-K, K + 1)):
                if OrderIndex(n, m) in wanted:
                    coeffs[OrderIndex(n, m)] = complex(M[i, j])
        # EFM-class negative radial orders
        missing = [nm for nm in sk.indices if nm not in coeffs]
        if missing:
            neg = sorted({n for n, _ in missing})
            orders2, ints2 = _ring_radial_integrals_negative(
                method, neg, grid, scheme)
            M2 = np.conj(ints2) @ A
            for i, n in enumerate(orders2):
                for j, m in enumerate(range(-K, K + 1)):
                    if OrderIndex(n, m) in wanted:
                        coeffs[OrderIndex(n, m)] = complex(M2[i, j])
    return coeffs


def _ring_radial_integrals_negative(method, neg_orders, grid, scheme):
    kind, param = scheme.rule_kind()
    edges = grid.ring_edges
    nodes, wts = [], []
    for u in range(grid.rings):
        a, b = edges[u], edges[u + 1]
        if kind == "gauss":
            x, w = gauss_legendre_on(a, b, param)
        elif kind == "up":
            s = param
            x = a + (b - a) * (np.arange(s) + 0.5) / s
            w = np.full(s, (b - a) / s)
        else:
            x = np.array([0.5 * (a + b)])
            w = np.array([b - a])
        nodes.append(x)
        wts.append(w)
    allx = np.concatenate(nodes)
    allw = np.concatenate(wts)
    rows = np.empty((len(neg_orders), allx.size), dtype=complex)
    for i, n in enumerate(neg_orders):
        rows[i] = radial_direct(method, n, allx)
    eval_counter.add(len(neg_orders) * allx.size)
    weighted = rows * (allw * allx)[None, :]
    per = [len(x) for x in nodes]
    splits = np.cumsum(per)[:-1]
    ints = np.stack([seg.sum(axis=1) for seg in
                     np.split(weighted, splits, axis=1)], axis=1)
    return neg_orders, ints


# ---------------------------------------------------------------------------
# FFT path (harmonic and fractional-harmonic kernels)
# ---------------------------------------------------------------------------

FFT_FAMILIES = ("RHFM", "EFM", "PCET", "PCT", "PST",
                "GRHFM", "GPCET", "GPCT", "GPST")


def _fft_terms(gfam: str, n: int) -> list[tuple[complex, int]]:
    """Decompose the conjugated s-domain kernel into c * e^{-j 2 pi nu s}
    terms; nu is encoded as 2*nu (integer)."""
    rt2 = math.sqrt(2.0)
    if gfam == "GPCET":
        return [(1.0, 2 * n)]
    if gfam == "GRHFM":
        if n == 0:
            return [(1.0, 0)]
        if n % 2 == 0:
            return [(rt2 / 2.0, n), (rt2 / 2.0, -n)]
        k = n + 1
        return [(rt2 / 2j, -k), (-rt2 / 2j, k)]
    if gfam == "GPCT":
        if n == 0:
            return [(1.0, 0)]
        return [(rt2 / 2.0, n), (rt2 / 2.0, -n)]
    if gfam == "GPST":
        return [(rt2 / 2j, -n), (-rt2 / 2j, n)]
    raise DomainError(f"no FFT decomposition for family {gfam}")


def _fft_prepare(image, method, M, interp):
    g = method.generic_form()
    alpha = g.alpha
    s = (np.arange(M) + 0.5) / M
    r = s ** (1.0 / alpha)
    theta = 2.0 * math.pi * np.arange(M) / M
    X = r[:, None] * np.cos(theta)[None, :]
    Y = r[:, None] * np.sin(theta)[None, :]
    f = sample_image(image.pixels, X, Y, interp=interp, mapping="incircle")
    w = s ** ((2.0 - alpha) / (2.0 * alpha)) / math.sqrt(2.0 * math.pi * alpha)
    return g, s, w[:, None] * f


def decompose_fft(image: Image, method: MethodSpec, K: int,
                  M: int | None = None, interp: str = "bilinear") -> MomentSet:
    """FFT computation on an M x M grid uniform in (s, theta), s = r^alpha.

    Multiplicative cost is O(M^2 log M) and independent of K; M must be
    at least 2K+2 to keep bins alias-free.
    """
    if method.family not in FFT_FAMILIES:
        raise SchemeError(f"FFT path supports harmonic kernels only "
                          f"(got {method.family})")
    if M is None:
        M = max(2 * K + 2, 4 * K, 8)
    if M < 2 * K + 2:
        raise SchemeError(f"M={M} is too small for K={K} (need >= {2*K+2})")
    g, s, G = _fft_prepare(image, method, M, interp)
    Ft = np.fft.fft(G, axis=1)
    F0 = np.fft.fft(Ft, axis=0)
    phase_half = np.exp(-1j * math.pi * (np.arange(M) + 0.5) / M)
    Fh = np.fft.fft(Ft * phase_half[:, None], axis=0)

    sk = order_set(method, K)
    norm = 2.0 * math.pi / (M * M)
    n_list = sorted({n for n, _ in sk.indices})
    m_list = list(range(-K, K + 1))
    # flatten the c * e^{-j 2 pi nu s} terms of every order and assemble
    # all radial rows in two vectorised gathers (integer / half-odd nu)
    rows_i, coefs, tns = [], [], []
    for i, n in enumerate(n_list):
        for c, two_nu in _fft_terms(g.family, n):
            rows_i.append(i)
            coefs.append(c)
            tns.append(two_nu)
    rows_i = np.array(rows_i)
    coefs = np.array(coefs, dtype=complex)
    tns = np.array(tns)
    B = np.zeros((len(n_list), M), dtype=complex)
    for parity, F in ((0, F0), (1, Fh)):
        sel = (tns % 2 == parity) if parity == 0 else (tns % 2 != 0)
        if not np.any(sel):
            continue
        k = (tns[sel] - parity) // 2
        contrib = (coefs[sel] * np.exp(-1j * math.pi * k / M))[:, None] \
            * F[k % M, :]
        np.add.at(B, rows_i[sel], contrib)
    B *= norm
    vals = B[:, np.array(m_list) % M]
    # FFT-family order sets are exactly n_list x m_list in lexicographic
    # order, which is also how S(K) enumerates them
    coeffs = dict(zip(sk.indices, vals.ravel().tolist()))
    scheme = Scheme(mapping="polar", rule="zoa", strategy="fft", fft_size=M)
    return MomentSet(method, K, scheme, coeffs, image.sha256(), fft_size=M)


def decompose_fft_reference(image: Image, method: MethodSpec, K: int,
                            M: int | None = None,
                            interp: str = "bilinear") -> MomentSet:
    """Direct (non-FFT) evaluation of the identical discrete transform;
    the oracle the FFT path is checked against."""
    if method.family not in FFT_FAMILIES:
        raise SchemeError(f"FFT path supports harmonic kernels only "
                          f"(got {method.family})")
    if M is None:
        M = max(2 * K + 2, 4 * K, 8)
    g, s, G = _fft_prepare(image, method, M, interp)
    a = np.arange(M) + 0.5
    b = np.arange(M)
    norm = 2.0 * math.pi / (M * M)
    needed = {}
    for n, m in order_set(method, K).indices:
        for c, two_nu in _fft_terms(g.family, n):
            needed[two_nu] = None
    rad_vec = {tn: np.exp(-1j * math.pi * tn * a / M) for tn in needed}
    coeffs = {}
    ang = {}
    for n, m in order_set(method, K).indices:
        if m not in ang:
            ang[m] = np.exp(-2j * math.pi * m * b / M)
        acc = 0.0 + 0.0j
        for c, two_nu in _fft_terms(g.family, n):
            acc += c * (rad_vec[two_nu] @ G @ ang[m])
        coeffs[OrderIndex(n, m)] = complex(norm * acc)
    scheme = Scheme(mapping="polar", rule="zoa", strategy="naive", fft_size=M)
    return MomentSet(method, K, scheme, coeffs, image.sha256(), fft_size=M)


# ---------------------------------------------------------------------------
# public decomposition API
# ---------------------------------------------------------------------------

def decompose(image: Image, method: MethodSpec, K: int,
              scheme: Scheme | None = None, threads: int = 1) -> MomentSet:
    """Compute the MomentSet of `image` for orders S(K) under `scheme`."""
    if scheme is None:
        scheme = default_scheme(method)
    if strict_mode_enabled() and scheme.boundary == "asis":
        scheme = scheme.with_(boundary="strict")
    if scheme.strategy == "fft":
        if scheme.mapping != "polar":
            raise SchemeError("fft strategy requires the polar mapping")
        return decompose_fft(image, method, K,
                             M=scheme.fft_size, interp=scheme.interp)
    if scheme.strategy == "recursive" and method.kind != "jacobi":
        raise SchemeError(
            f"recursive evaluation applies to Jacobi-type kernels only "
            f"(got {method.family}); harmonic and Bessel kernels need no recursion")
    if scheme.mapping == "polar":
        coeffs = _decompose_polar(image, method, K, scheme, threads)
    elif scheme.strategy == "naive":
        coeffs = _decompose_cartesian_naive(image, method, K, scheme, threads)
    elif scheme.strategy == "recursive":
        coeffs = _decompose_cartesian_recursive(image, method, K, scheme, threads)
    elif scheme.strategy == "symmetric":
        if scheme.boundary == "clip":
            raise SchemeError("symmetric folding does not support clip cells")
        coeffs = _decompose_cartesian_symmetric(image, method, K, scheme, threads)
    else:  # pragma: no cover
        raise SchemeError(f"unhandled strategy {scheme.strategy}")
    return MomentSet(method, K, scheme, coeffs, image.sha256())


def decompose_symmetric(image: Image, method: MethodSpec, K: int,
                        scheme: Scheme | None = None, threads: int = 1) -> MomentSet:
    """Symmetry-folded decomposition (Cartesian mappings, even N)."""
    if scheme is None:
        scheme = default_scheme(method)
        if scheme.mapping == "polar":
            scheme = Scheme(mapping="circumcircle", rule="up:3",
                            strategy="symmetric")
    return decompose(image, method, K, scheme.with_(strategy="symmetric"),
                     threads)


# ---------------------------------------------------------------------------
# reconstruction
# ---------------------------------------------------------------------------

def reconstruct(moments: MomentSet, N: int) -> np.ndarray:
    """Synthesise f_hat = sum M_nm V_nm on an N x N raster (raw field).

    Pixels outside the unit disk are 0; for kernels unbounded at the
    origin the exact-centre pixel (outside the kernel domain) is 0 too.
    Clipping to [0, 1] is left to Image.from_raw at export.
    """
    if N < 2:
        raise DomainError("reconstruction raster must be at least 2x2")
    method = moments.method
    mapping = moments.scheme.mapping
    if mapping == "polar":
        mapping = "incircle"
    xs, _ = _cell_centers(N, mapping)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    R = np.hypot(X, Y)
    inside = R <= 1.0
    if singular_at_zero(method):
        inside &= R >= SINGULAR_EPS
    r = R[inside]
    theta = np.arctan2(Y[inside], X[inside])
    out = np.zeros(r.size, dtype=complex)
    if moments.coefficients:
        by_m: dict[int, list] = {}
        for (n, m), v in moments.coefficients.items():
            by_m.setdefault(m, []).append((n, v))
        rad_cache: dict = {}

        def radial(n, m):
            key = (n, abs(m) if method.radial_uses_m else 0)
            if key not in rad_cache:
                if method.kind == "jacobi":
                    orders, table = radial_table(
                        method, max(nn for nn, _ in by_m[m]) if method.radial_uses_m
                        else moments.K, r, abs(m) if method.radial_uses_m else None)
                    for i, nn in enumerate(orders):
                        rad_cache[(nn, key[1])] = table[i]
                else:
                    rad_cache[key] = np.asarray(radial_direct(method, n, r, m if method.radial_uses_m else None))
            return rad_cache[key]

        E1 = np.exp(1j * theta)
        Em = np.ones_like(E1)
        for m in range(0, moments.K + 1):
            if m > 0:
                Em = Em * E1
            for mm, ang in (((m, Em),) if m == 0 else ((m, Em), (-m, np.conj(Em)))):
                if mm not in by_m:
                    continue
                G = np.zeros(r.size, dtype=complex)
                for n, v in sorted(by_m[mm]):
                    G += v * radial(n, mm)
                out += G * ang
    field = np.zeros((N, N), dtype=float)
    # pixels[row=j-1, col=i-1]: transpose the (i, j)-indexed mesh
    tmp = np.zeros((N, N), dtype=float)
    tmp[inside] = out.real
    field = tmp.T
    return field


def to_image(raw: np.ndarray) -> Image:
    return Image.from_raw(raw)


# ---------------------------------------------------------------------------
# batched decomposition (shared grids/kernels; used by the harness)
# ---------------------------------------------------------------------------

class BatchDecomposer:
    """Decompose many same-size images with one kernel preparation.

    Results are identical to decompose() with the same scheme: the node
    set, kernel tables, and per-coefficient accumulation order match.
    """

    def __init__(self, method: MethodSpec, K: int, N: int,
                 scheme: Scheme | None = None):
        self.method = method
        self.K = K
        self.N = N
        self.scheme = scheme or default_scheme(method)
        self.sk = order_set(method, K)
        self._prepared = False

    def _prepare(self):
        method, K, scheme = self.method, self.K, self.scheme
        if scheme.strategy == "fft":
            self._mode = "fft"
        elif scheme.mapping == "polar":
            self._mode = "polar"
            self._grid = polar_grid(self.N, scheme.rings)
            rints = {}
            if method.radial_uses_m:
                for am in range(0, K + 1):
                    rints[am] = _ring_radial_integrals(method, K, self._grid,
                                                       scheme, am)
            else:
                rints[None] = _ring_radial_integrals(method, K, self._grid, scheme)
                negs = sorted({n for n, _ in self.sk.indices if n < 0})
                if negs:
                    rints["neg"] = _ring_radial_integrals_negative(
                        method, negs, self._grid, scheme)
            self._rints = rints
        else:
            self._mode = "cartesian"
            nodes = cartesian_nodes(self.N, scheme.mapping, scheme.rule,
                                    scheme.boundary)
            r = _effective_radii(method, nodes.r)
            rows = {}
            if method.radial_uses_m:
                for am in range(0, K + 1):
                    rows[am] = radial_table(method, K, r, am, extend=True)
            else:
                strategy = "recursive" if method.kind == "jacobi" else "direct"
                rows[None] = _radial_rows(method, K, r, None, strategy)
            E1 = np.exp(-1j * nodes.theta)
            ang = {0: np.ones_like(E1)}
            for m in range(1, K + 1):
                ang[m] = ang[m - 1] * E1
            self._nodes = nodes
            self._rows = rows
            self._ang = ang
        self._prepared = True

    def run(self, image: Image) -> MomentSet:
        if image.n != self.N:
            raise DomainError(f"batch prepared for N={self.N}, got {image.n}")
        if not self._prepared:
            self._prepare()
        method, K, scheme = self.method, self.K, self.scheme
        if self._mode == "fft":
            return decompose_fft(image, method, K, M=scheme.fft_size,
                                 interp=scheme.interp)
        if self._mode == "polar":
            grid = resample_to_polar(image.pixels, self._grid,
                                     interp=scheme.interp, mapping="incircle")
            A = _ring_angular_sums(grid, K)
            coeffs = {}
            wanted = set(self.sk.indices)
            if method.radial_uses_m:
                for am in range(0, K + 1):
                    orders, ints = self._rints[am]
                    for sign in (1, -1) if am else (1,):
                        vals = np.conj(ints) @ A[:, am * sign + K]
                        for i, n in enumerate(orders):
                            if OrderIndex(n, am * sign) in wanted:
                                coeffs[OrderIndex(n, am * sign)] = complex(vals[i])
            else:
                orders, ints = self._rints[None]
                M = np.conj(ints) @ A
                for i, n in enumerate(orders):
                    for j, m in enumerate(range(-K, K + 1)):
                        if OrderIndex(n, m) in wanted:
                            coeffs[OrderIndex(n, m)] = complex(M[i, j])
                if "neg" in self._rints:
                    orders2, ints2 = self._rints["neg"]
                    M2 = np.conj(ints2) @ A
                    for i, n in enumerate(orders2):
                        for j, m in enumerate(range(-K, K + 1)):
                            if OrderIndex(n, m) in wanted:
                                coeffs[OrderIndex(n, m)] = complex(M2[i, j])
            return MomentSet(method, K, scheme, coeffs, image.sha256())
        # cartesian
        fw = image.pixels.ravel()[self._nodes.pix] * self._nodes.w
        coeffs = {}
        for mkey, (orders, table) in self._rows.items():
            mrange = range(0, K + 1) if mkey is None else (mkey,)
            for m in mrange:
                A = self._ang[m] * fw
                vals = np.conj(table) @ A if np.iscomplexobj(table) else table @ A
                for i, n in enumerate(orders):
                    if OrderIndex(n, m) in set(self.sk.indices):
                        coeffs[OrderIndex(n, m)] = complex(vals[i])
                    if m > 0 and OrderIndex(n, -m) in set(self.sk.indices):
                        if method.complex_radial:
                            Anb = np.conj(self._ang[m]) * fw
                            coeffs[OrderIndex(n, -m)] = complex(
                                (np.conj(table[i]) if np.iscomplexobj(table)
                                 else table[i]) @ Anb)
                        else:
                            coeffs[OrderIndex(n, -m)] = complex(np.conj(vals[i]))
        return MomentSet(method, K, self.scheme, coeffs, image.sha256())
