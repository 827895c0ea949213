import math

import numpy as np
import pytest

from momentkit import (Cell, MethodSpec, angular_integral_exact, kernel_weight,
                       map_circumcircle, map_incircle, polar_grid,
                       resample_to_polar)
from momentkit.errors import DomainError, SchemeError
from momentkit.geometry import Scheme, rule_offsets

SQRT2 = math.sqrt(2.0)


def test_incircle_mapping_values():
    c = map_incircle(64, 64, 128)
    assert (c.x, c.y) == (0.0, 0.0)
    assert c.dx == c.dy == pytest.approx(1 / 64)
    c = map_incircle(128, 128, 128)
    assert (c.x, c.y) == (1.0, 1.0)
    # the corner cell centre lies outside the disk
    assert c.r > 1.0
    with pytest.raises(DomainError):
        map_incircle(0, 1, 128)
    with pytest.raises(DomainError):
        map_incircle(1, 129, 128)


def test_circumcircle_mapping_values():
    c = map_circumcircle(128, 128, 128)
    assert c.x == pytest.approx(1 / SQRT2, abs=1e-15)
    assert c.y == pytest.approx(1 / SQRT2, abs=1e-15)
    assert map_circumcircle(64, 64, 128) == Cell(0.0, 0.0, SQRT2 / 128, SQRT2 / 128)
    # every cell CENTRE lies in the closed disk; the outermost corners
    # overhang by exactly 1/N under the printed mapping
    N = 128
    worst_center = worst_corner = 0.0
    for i in (1, N // 2, N):
        for j in (1, N // 2, N):
            c = map_circumcircle(i, j, N)
            worst_center = max(worst_center, c.r)
            worst_corner = max(worst_corner,
                               math.hypot(abs(c.x) + c.dx / 2, abs(c.y) + c.dy / 2))
    assert worst_center <= 1.0 + 1e-12
    assert worst_corner <= 1.0 + 1.0 / N + 1e-12


def test_incircle_inside_fraction_tends_to_quarter_pi():
    N = 512
    i = np.arange(1, N + 1)
    x = (2.0 * i - N) / N
    X, Y = np.meshgrid(x, x, indexing="ij")
    h = 1.0 / N
    far = np.hypot(np.abs(X) + h, np.abs(Y) + h)
    frac = np.count_nonzero(far <= 1.0) / N ** 2
    assert abs(frac - math.pi / 4) < 0.02


def test_kernel_weight_constant_kernel():
    cell = Cell(0.1, 0.05, 0.01, 0.01)
    a = cell.dx * cell.dy
    h = kernel_weight(MethodSpec("PCT"), 0, 0, cell, "zoa")
    assert h == pytest.approx(a / math.sqrt(math.pi), abs=1e-18)
    h3 = kernel_weight(MethodSpec("PCT"), 0, 0, cell, "up:3")
    assert abs(h3 - h) < 1e-15


def test_kernel_weight_gauss_vs_riemann_oracle():
    # 101x101 midpoint Riemann refinement as the independent oracle;
    # interior cell away from the origin (where the angular factor spins
    # too fast across a cell for any 5-point rule) and from the rim
    cell = map_incircle(84, 70, 128)
    ms = MethodSpec("PCT")
    n, m = 3, 2
    g = kernel_weight(ms, n, m, cell, "gauss:5")
    s = 101
    off = (np.arange(s) + 0.5) / s - 0.5
    u = cell.x + off * cell.dx
    v = cell.y + off * cell.dy
    U, V = np.meshgrid(u, v, indexing="ij")
    r = np.hypot(U, V)
    th = np.arctan2(V, U)
    from momentkit import radial_eval
    vals = np.asarray(radial_eval(ms, n, r.ravel())) * np.exp(1j * m * th.ravel())
    oracle = np.sum(np.conj(vals)) * (cell.dx * cell.dy) / s ** 2
    assert abs(g - oracle) < 1e-9


def test_upsample_convergence_on_boundary_cell():
    # find a straddling cell under the incircle mapping: centre inside
    # the disk, far corner outside
    N = 128
    cell = None
    for i in range(N, 0, -1):
        for j in range(N // 2, N):
            c = map_incircle(i, j, N)
            far = math.hypot(abs(c.x) + c.dx / 2, abs(c.y) + c.dy / 2)
            if c.r <= 1.0 < far:
                cell = c
                break
        if cell:
            break
    assert cell is not None
    ms = MethodSpec("PCT")
    h3 = kernel_weight(ms, 5, 0, cell, "up:3")
    h9 = kernel_weight(ms, 5, 0, cell, "up:9")
    h27 = kernel_weight(ms, 5, 0, cell, "up:27")
    assert abs(h9 - h27) < abs(h3 - h9)


def test_angular_integral_exact():
    assert angular_integral_exact(0, 0.0, math.pi / 2) == pytest.approx(math.pi / 2)
    assert angular_integral_exact(1, 0.0, math.pi) == pytest.approx(-2j, abs=1e-15)
    assert abs(angular_integral_exact(1, 0.0, 2 * math.pi)) < 1e-15
    with pytest.raises(DomainError):
        angular_integral_exact(1, 1.0, 0.5)


def test_angular_integral_additivity():
    rng = np.random.default_rng(2)
    for _ in range(50):
        a, b, c = np.sort(rng.uniform(0, 2 * math.pi, 3))
        for m in (-3, 0, 1, 5):
            lhs = angular_integral_exact(m, a, c)
            rhs = angular_integral_exact(m, a, b) + angular_integral_exact(m, b, c)
            assert abs(lhs - rhs) < 1e-14


def test_polar_grid_properties():
    g1 = polar_grid(64, 1)
    assert g1.rings == 1 and g1.ring_radii[-1] == 1.0
    g = polar_grid(64)
    assert g.ring_edges[0] == 0.0 and g.ring_radii[-1] == 1.0
    assert abs(g.tile_area_total() - math.pi) < 1e-12
    counts = list(g.sector_counts)
    assert all(b >= a for a, b in zip(counts, counts[1:]))
    assert min(np.min(g.sample_radii()), 1.0) > 0.0
    with pytest.raises(DomainError):
        polar_grid(64, 0)


def test_resample_unity_exact():
    g = polar_grid(32, 8)
    out = resample_to_polar(np.ones((32, 32)), g)
    for vals in out.intensities:
        assert np.all(vals == 1.0)


def test_resample_accuracy_bilinear_vs_bicubic():
    N = 128
    i = np.arange(1, N + 1)
    x = (2.0 * i - N) / N
    X, Y = np.meshgrid(x, x, indexing="ij")
    f = ((X ** 2 + Y ** 2) / 2.0).T  # smooth radial field r^2 / 2
    f = np.clip(f, 0.0, 1.0)
    g = polar_grid(N, 32)
    lin = resample_to_polar(f, g, "bilinear")
    cub = resample_to_polar(f, g, "bicubic")
    radii = g.sample_radii()
    err_lin = err_cub = 0.0
    for u in range(g.rings):
        if radii[u] > 0.7:
            continue  # stay in the well-covered centre region
        target = radii[u] ** 2 / 2.0
        err_lin = max(err_lin, np.max(np.abs(lin.intensities[u] - target)))
        err_cub = max(err_cub, np.max(np.abs(cub.intensities[u] - target)))
    assert err_lin < 1e-2
    assert err_cub <= err_lin


def test_scheme_validation():
    with pytest.raises(SchemeError):
        Scheme(strategy="fft", mapping="incircle")
    with pytest.raises(SchemeError):
        Scheme(strategy="symmetric", mapping="polar")
    with pytest.raises(SchemeError):
        Scheme(rule="up:0")
    with pytest.raises(SchemeError):
        Scheme(rule="what")
    off, w = rule_offsets("up:4")
    assert off.size == 4 and abs(w.sum() - 1.0) < 1e-15
    off, w = rule_offsets("gauss:6")
    assert off.size == 6 and abs(w.sum() - 1.0) < 1e-15
