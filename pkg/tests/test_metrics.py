import math

import numpy as np
import pytest

from momentkit import (MethodSpec, MomentSet, OrderIndex, ace, ccp,
                       decompose, decomposition_time, msre, order_set, ssim)
from momentkit.errors import DomainError
from momentkit.geometry import Scheme
from momentkit.harness import DIRECT_SCHEME, RECURSIVE_SCHEME, unity_image


def synth(method, K, values):
    coeffs = {OrderIndex(n, m): values.get((n, m), 0.0 + 0.0j)
              for n, m in order_set(method, K).indices}
    return MomentSet(method, K, Scheme(), coeffs)


def test_ace_zero_when_m_nonzero_vanish():
    ms = synth(MethodSpec("ZM"), 4, {(0, 0): 3.0, (2, 0): 1.0})
    assert ace(ms) == 0.0


def test_ace_divides_by_full_cardinality():
    # PZM S(1) = {(0,0),(1,-1),(1,0),(1,1)}: |S| = 4; two m != 0 moduli
    # of 0.2 average to 0.1 over the full set
    ms = synth(MethodSpec("PZM"), 1, {(1, 1): 0.2j, (1, -1): -0.2j, (0, 0): 9.0})
    assert ace(ms) == pytest.approx(0.1)


def test_ace_flags_nonfinite_as_inf():
    ms = synth(MethodSpec("PZM"), 1, {(1, 1): complex(np.inf, 0.0)})
    assert math.isinf(ace(ms))
    assert ms.unstable


def test_ace_recursive_beats_direct_at_high_order():
    unity = unity_image(128)
    zm = MethodSpec("ZM")
    a_direct = ace(decompose(unity, zm, 40, DIRECT_SCHEME))
    a_rec = ace(decompose(unity, zm, 40, RECURSIVE_SCHEME))
    assert a_rec < a_direct


def test_decomposition_time_median():
    calls = []
    val = decomposition_time(lambda: calls.append(1), repeats=5)
    assert len(calls) == 5 and val >= 0.0
    with pytest.raises(DomainError):
        decomposition_time(lambda: None, repeats=0)


def test_msre_basics():
    one = np.ones((32, 32))
    assert msre(one, one) == 0.0
    assert msre(one, np.zeros_like(one)) == pytest.approx(1.0)
    assert msre(one, np.full_like(one, 0.9)) == pytest.approx(0.01)
    with pytest.raises(DomainError):
        msre(np.zeros((8, 8)), np.zeros((8, 8)))
    with pytest.raises(DomainError):
        msre(np.ones((8, 8)), np.ones((9, 9)))


def test_ssim_basics(random_image64):
    f = random_image64.pixels
    assert ssim(f, f) == pytest.approx(1.0)
    const = np.full((16, 16), 0.4)
    assert ssim(const, const) == pytest.approx(1.0)
    g = np.clip(f + 0.05, 0, 1)
    assert ssim(f, g) == pytest.approx(ssim(g, f), abs=1e-15)
    assert ssim(f, g) <= 1.0


def test_ccp():
    assert ccp(list("aabb"), list("aabb")) == 100.0
    assert ccp(list("ab"), list("aa")) == 50.0
    assert ccp([1, 2, 3, 4, 5, 1, 2, 3, 4, 5],
               [1, 2, 3, 4, 5, 9, 9, 9, 9, 9]) == 50.0
    with pytest.raises(DomainError):
        ccp([], [])
    with pytest.raises(DomainError):
        ccp([1], [1, 2])
