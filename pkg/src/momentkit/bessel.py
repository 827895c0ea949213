"""Bessel functions of the first kind and their positive zeros.

Kept dependency-free on purpose: the ascending series is used for small
arguments, a normalised backward recurrence (Miller's algorithm) for
large ones, and zeros come from a McMahon asymptotic guess refined by
bisection.  Accuracy is bounded by the test oracles at ~1e-12 absolute
on x in [0, 200].
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

_SERIES_CUTOFF = 12.0


def _bessel_series(v: float, x: np.ndarray) -> np.ndarray:
    """Ascending series, reliable for 0 <= x < ~15 in float64."""
    half = x / 2.0
    with np.errstate(divide="ignore"):
        # (x/2)^v / Gamma(v+1); x = 0 handled via the limit below
        t = np.where(x > 0, half, 1.0) ** v / math.gamma(v + 1.0)
        t = np.where(x > 0, t, (0.0 if v > 0 else 1.0))
    out = t.copy()
    h2 = half * half
    for k in range(1, 60):
        t = t * (-h2) / (k * (v + k))
        out += t
        if np.all(np.abs(t) <= 1e-18 * (1.0 + np.abs(out))):
            break
    return out


def _bessel_miller(v: float, x: np.ndarray) -> np.ndarray:
    """Backward recurrence normalised by (x/2)^v = sum_k c_k J_{v+2k}(x)."""
    xmax = float(np.max(x))
    start = int(xmax + 16.0 * xmax ** (1.0 / 3.0) + 32)
    start += start % 2
    # c_k = (v+2k) Gamma(v+k)/k! via the ratio d_k = d_{k-1} (v+k-1)/k
    kmax = start // 2
    c = np.empty(kmax + 1)
    c[0] = math.gamma(v + 1.0)
    d = math.gamma(v + 1.0)  # d_1 = Gamma(v+1)/1!
    for k in range(1, kmax + 1):
        if k >= 2:
            d *= (v + k - 1.0) / k
        c[k] = (v + 2.0 * k) * d
    bp = np.zeros_like(x)            # trial J_{v+start+1}
    b = np.full_like(x, 1e-280)      # trial J_{v+start}
    s = c[kmax] * b
    for j in range(start, 0, -1):
        bm = (2.0 * (v + j) / x) * b - bp
        bp, b = b, bm                # b is now the trial J_{v+j-1}
        if (j - 1) % 2 == 0:
            s = s + c[(j - 1) // 2] * b
        big = np.abs(b) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            b = b * scale
            bp = bp * scale
            s = s * scale
    return b * (x / 2.0) ** v / s


def bessel_j(v: float, x) -> np.ndarray | float:
    """J_v(x) for real order v >= 0 and x >= 0 (scalar or array)."""
    if v < 0:
        raise DomainError(f"bessel_j expects v >= 0 (got {v})")
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    if np.any(xa < 0):
        raise DomainError("bessel_j expects x >= 0")
    out = np.empty_like(xa)
    small = xa < _SERIES_CUTOFF
    if np.any(small):
        out[small] = _bessel_series(v, xa[small])
    if np.any(~small):
        out[~small] = _bessel_miller(v, xa[~small])
    return float(out[0]) if scalar else out


def _mcmahon_guess(v: float, n: int) -> float:
    beta = (n + v / 2.0 - 0.25) * math.pi
    mu = 4.0 * v * v
    return (beta
            - (mu - 1.0) / (8.0 * beta)
            - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * beta) ** 3))


_zero_cache: dict[float, list[float]] = {}


def bessel_zero(v: float, n: int) -> float:
    """The n-th positive zero of J_v (n >= 1), to ~1e-12."""
    if n < 1:
        raise DomainError(f"bessel_zero expects n >= 1 (got {n})")
    zeros = _zero_cache.setdefault(v, [])
    while len(zeros) < n:
        k = len(zeros) + 1
        guess = _mcmahon_guess(v, k)
        lo = max(guess - 1.2, zeros[-1] + 1e-9 if zeros else 1e-9)
        hi = guess + 1.2
        flo = bessel_j(v, lo)
        fhi = bessel_j(v, hi)
        # widen until the bracket straddles a sign change
        tries = 0
        while flo * fhi > 0 and tries < 60:
            lo = max(lo - 0.3, zeros[-1] + 1e-9 if zeros else 1e-9)
            hi += 0.3
            flo = bessel_j(v, lo)
            fhi = bessel_j(v, hi)
            tries += 1
        if flo * fhi > 0:
            raise ArithmeticError(f"failed to bracket zero {k} of J_{v}")
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            fm = bessel_j(v, mid)
            if fm == 0.0:
                lo = hi = mid
                break
            if flo * fm < 0:
                hi, fhi = mid, fm
            else:
                lo, flo = mid, fm
            if hi - lo < 1e-13 * max(1.0, hi):
                break
        zeros.append(0.5 * (lo + hi))
    return zeros[n - 1]
