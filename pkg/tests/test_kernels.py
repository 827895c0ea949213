import math

import numpy as np
import pytest

from momentkit import (MethodSpec, angular_eval, fractionalize, radial_eval,
                       radial_zero_count)
from momentkit.errors import DomainError, SingularKernelError
from momentkit.quadrature import gauss_legendre_on, graded_composite_nodes

SQRT_PI = math.sqrt(math.pi)
R_GRID = np.linspace(1e-6, 1.0 - 1e-9, 1000)

IDENTITY_PAIRS = [
    (MethodSpec("JFM", p=2, q=2), MethodSpec("OFMM")),
    (MethodSpec("JFM", p=2, q=1.5), MethodSpec("CHFM")),
    (MethodSpec("JFM", p=4, q=3), MethodSpec("PJFM")),
    (MethodSpec("FJFM", p=3, q=3, alpha=1.0), MethodSpec("JFM", p=3, q=3)),
    (MethodSpec("GPCET", alpha=1.0), MethodSpec("EFM")),
    (MethodSpec("GPCET", alpha=2.0), MethodSpec("PCET")),
    (MethodSpec("GRHFM", alpha=1.0), MethodSpec("RHFM")),
    (MethodSpec("GPCT", alpha=2.0), MethodSpec("PCT")),
    (MethodSpec("GPST", alpha=2.0), MethodSpec("PST")),
]


def first_order(method):
    return 1 if method.family in ("PST", "GPST") else 0


def test_radial_point_values():
    assert radial_eval(MethodSpec("ZM"), 0, 0.5, 0) == pytest.approx(1 / SQRT_PI, abs=1e-12)
    assert radial_eval(MethodSpec("PCT"), 0, 0.37) == pytest.approx(1 / SQRT_PI, abs=1e-12)
    assert radial_eval(MethodSpec("PST"), 1, 0.5) == pytest.approx(
        math.sqrt(2 / math.pi) * math.sin(math.pi * 0.25), abs=1e-12)
    v = radial_eval(MethodSpec("EFM"), 1, 0.5)
    assert v == pytest.approx(-1 / SQRT_PI, abs=1e-12)


def test_angular_eval():
    assert angular_eval(0, 1.234) == pytest.approx(1.0)
    assert angular_eval(1, math.pi / 2) == pytest.approx(1j)
    assert angular_eval(2, math.pi / 4) == pytest.approx(1j)
    rng = np.random.default_rng(4)
    for m in (-7, -1, 0, 3, 25):
        th = rng.uniform(-10, 10, 64)
        assert np.max(np.abs(np.abs(angular_eval(m, th)) - 1.0)) < 1e-14


@pytest.mark.parametrize("generic,classical", IDENTITY_PAIRS,
                         ids=[f"{a.label()}~{b.label()}" for a, b in IDENTITY_PAIRS])
def test_specialization_identities_pointwise(generic, classical):
    for n in range(first_order(classical), 11):
        va = np.asarray(radial_eval(generic, n, R_GRID))
        vb = np.asarray(radial_eval(classical, n, R_GRID))
        assert np.max(np.abs(va - vb)) <= 1e-9


def test_singularities_raise_at_origin():
    for ms, n in ((MethodSpec("RHFM"), 0), (MethodSpec("EFM"), 1),
                  (MethodSpec("CHFM"), 2), (MethodSpec("GRHFM", alpha=0.5), 2),
                  (MethodSpec("JFM", p=2, q=1.5), 0)):
        with pytest.raises(SingularKernelError):
            radial_eval(ms, n, 0.0)
    # bounded kernels evaluate fine at the origin
    assert radial_eval(MethodSpec("ZM"), 2, 0.0, 0) == pytest.approx(
        -math.sqrt(3 / math.pi))
    assert radial_eval(MethodSpec("PCET"), 3, 0.0) == pytest.approx(1 / SQRT_PI)
    assert radial_eval(MethodSpec("BFM"), 0, 0.0) == 0.0  # J_1(0) = 0


def test_domain_errors():
    with pytest.raises(DomainError):
        radial_eval(MethodSpec("ZM"), 3, 0.5, 2)   # parity violation
    with pytest.raises(DomainError):
        radial_eval(MethodSpec("OFMM"), -1, 0.5)
    with pytest.raises(DomainError):
        radial_eval(MethodSpec("OFMM"), 2, 1.5)


def test_fractionalize_alpha1_is_identity():
    base = lambda r: np.asarray(radial_eval(MethodSpec("EFM"), 2, r))
    f = fractionalize(base, 1.0)
    assert np.max(np.abs(np.asarray(f(R_GRID)) - base(R_GRID))) < 1e-15


def test_fractionalize_efm_gives_pcet():
    for n in (0, 1, 4):
        base = lambda r, n=n: np.asarray(radial_eval(MethodSpec("EFM"), n, r))
        f2 = fractionalize(base, 2.0)
        pc = np.asarray(radial_eval(MethodSpec("PCET"), n, R_GRID))
        assert np.max(np.abs(np.asarray(f2(R_GRID)) - pc)) < 1e-14


def test_fractionalize_rejects_bad_alpha():
    with pytest.raises(DomainError):
        fractionalize(lambda r: r, 0.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.0])
def test_fractionalize_preserves_orthonormality(alpha):
    # weighted quadrature of fractionalized EFM kernels; the integral is
    # taken in r as written, so the sqrt(alpha) r^(alpha-1) weight under
    # test does not cancel against a substitution
    x, w = graded_composite_nodes(4000)
    rows = []
    for n in range(0, 6):
        base = lambda r, n=n: np.asarray(radial_eval(MethodSpec("EFM"), n, r))
        rows.append(np.asarray(fractionalize(base, alpha)(x)))
    rows = np.array(rows)
    G = (rows * (w * x)[None, :]) @ np.conj(rows.T)
    assert np.max(np.abs(G - np.eye(6) / (2 * math.pi))) < 1e-6


def test_zero_counts_spot_values():
    assert radial_zero_count(MethodSpec("ZM"), 6, 2) == 2
    assert radial_zero_count(MethodSpec("PST"), 1) == 0
    assert radial_zero_count(MethodSpec("OFMM"), 4) == 4
    with pytest.raises(DomainError):
        radial_zero_count(MethodSpec("EFM"), 2)


def test_orthonormality_spot_check():
    x, w = gauss_legendre_on(0.0, 1.0, 2000)
    for ms in (MethodSpec("OFMM"), MethodSpec("RHFM"), MethodSpec("BFM"),
               MethodSpec("PCET")):
        for n in range(0, 5):
            for n2 in range(0, 5):
                a = np.asarray(radial_eval(ms, n, x))
                b = np.asarray(radial_eval(ms, n2, x))
                val = np.sum(w * a * np.conj(b) * x)
                target = (1 / (2 * math.pi)) if n == n2 else 0.0
                assert abs(val - target) < 1e-10
