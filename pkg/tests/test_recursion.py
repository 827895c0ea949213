import math

import numpy as np
import pytest

from momentkit import MethodSpec, radial_eval, radial_table
from momentkit.errors import DomainError

R_GRID = (np.arange(1000) + 0.5) / 1000.0

FAMILIES = [
    (MethodSpec("OFMM"), None),
    (MethodSpec("CHFM"), None),
    (MethodSpec("PJFM"), None),
    (MethodSpec("JFM", p=3, q=3), None),
    (MethodSpec("JFM", p=2, q=1.5), None),
    (MethodSpec("FJFM", p=3, q=3, alpha=2.0), None),
    (MethodSpec("FJFM", p=3, q=3, alpha=0.5), None),
    (MethodSpec("ZM"), 0),
    (MethodSpec("ZM"), 3),
    (MethodSpec("PZM"), 0),
    (MethodSpec("PZM"), 2),
]


@pytest.mark.parametrize("method,m", FAMILIES,
                         ids=[f"{ms.label()}-m{m}" for ms, m in FAMILIES])
def test_recursion_agrees_with_direct(method, m):
    orders, table = radial_table(method, 10, R_GRID, m)
    for i, n in enumerate(orders):
        dev = np.max(np.abs(table[i] - np.asarray(radial_eval(method, n, R_GRID, m))))
        if n <= 8:
            assert dev <= 1e-10
        else:
            # direct summation of the printed monomial form carries
            # ~1.3e-9 float64 roundoff at n = 10 (coefficients reach
            # 5.25e6); the recursion is the accurate side
            assert dev <= 5e-9


def test_seed_row_matches_direct_exactly():
    orders, table = radial_table(MethodSpec("OFMM"), 5, np.array([0.5]))
    assert orders[0] == 0
    assert abs(table[0][0] - radial_eval(MethodSpec("OFMM"), 0, 0.5)) < 1e-12


def test_jfm22_table_equals_ofmm_table():
    o1, t1 = radial_table(MethodSpec("JFM", p=2, q=2), 10, R_GRID)
    o2, t2 = radial_table(MethodSpec("OFMM"), 10, R_GRID)
    assert o1 == o2
    assert np.max(np.abs(t1 - t2)) <= 1e-10


def test_zm_degree_zero_constant():
    orders, table = radial_table(MethodSpec("ZM"), 0, np.array([1.0]), 0)
    assert orders == [0]
    assert table[0][0] == pytest.approx(1 / math.sqrt(math.pi), abs=1e-15)


def test_recursion_rejects_non_jacobi():
    for fam in ("RHFM", "EFM", "PCET", "PCT", "PST", "BFM", "GPCET"):
        with pytest.raises(DomainError):
            radial_table(MethodSpec(fam, alpha=1.0 if fam == "GPCET" else None),
                         5, R_GRID)


def test_recursion_stable_at_high_order():
    # direct summation is unusable around n ~ 40; the recurrence keeps
    # satisfying orthonormality there
    from momentkit.quadrature import gauss_legendre_on
    x, w = gauss_legendre_on(0.0, 1.0, 4000)
    orders, rows = radial_table(MethodSpec("OFMM"), 40, x)
    G = (rows * (w * x)[None, :]) @ rows.T
    assert abs(G[40, 40] - 1 / (2 * math.pi)) < 1e-8
    assert abs(G[40, 0]) < 1e-8
