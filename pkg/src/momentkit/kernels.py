"""Radial and angular basis kernels on the unit disk.

Every family is exposed through two evaluation routes:

* ``radial_direct`` sums the defining formula with term ratios carried
  in 64-bit floats (no log-gamma rescue), so the numerical instability
  of high-order Jacobi kernels is reproduced rather than hidden.
* ``radial_table`` evaluates Jacobi-type families through the
  three-term recurrence of the underlying orthonormal polynomials,
  seeded at the two lowest orders by direct summation.  This is the
  stable production path.

All radial functions are orthonormal in the weighted sense
``integral_0^1 R_n R_n'* r dr = delta_nn' / (2 pi)``.
"""

from __future__ import annotations

import math

import numpy as np

from .bessel import bessel_j, bessel_zero
from .errors import DomainError, SingularKernelError
from .methods import MethodSpec

_SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# angular factor
# ---------------------------------------------------------------------------

def angular_eval(m: int, theta) -> np.ndarray | complex:
    """A_m(theta) = exp(j m theta); unit modulus for every m, theta."""
    t = np.asarray(theta, dtype=float)
    out = np.exp(1j * m * t)
    return complex(out) if t.ndim == 0 else out


# ---------------------------------------------------------------------------
# direct summation, one coefficient chain per family
# ---------------------------------------------------------------------------

def _horner(coeffs: list[float], s: np.ndarray) -> np.ndarray:
    acc = np.full_like(s, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * s + c
    return acc


def _zm_poly(n: int, am: int) -> list[float]:
    # coefficients a_t of the polynomial in s = r^2, a_t = c_{B-t}
    B = (n - am) // 2
    A = (n + am) // 2
    c = 1.0
    for i in range(1, B + 1):          # c_0 = n! / (A! B!)
        c *= (A + i) / i
    cs = [c]
    for k in range(1, B + 1):
        c *= -(A - k + 1.0) * (B - k + 1.0) / (k * (n - k + 1.0))
        cs.append(c)
    return cs[::-1]


def _pzm_poly(n: int, am: int) -> list[float]:
    D = n - am
    c = 1.0
    for i in range(1, D + 1):          # c_0 = (2n+1)! / ((n+|m|+1)! (n-|m|)!)
        c *= (n + am + 1.0 + i) / i
    cs = [c]
    for k in range(1, D + 1):
        c *= -(n + am + 2.0 - k) * (n - am + 1.0 - k) / (k * (2.0 * n + 2.0 - k))
        cs.append(c)
    return cs[::-1]


def _ofmm_poly(n: int) -> list[float]:
    c = (n + 1.0) * (-1.0 if n % 2 else 1.0)
    cs = [c]
    for k in range(1, n + 1):
        c *= -(n + k + 1.0) * (n - k + 1.0) / (k * (k + 1.0))
        cs.append(c)
    return cs


def _chfm_poly(n: int) -> list[float]:
    # polynomial in u^2 where u = 4r - 2; overall prefix u^(n mod 2)
    B = n // 2
    c = 1.0
    cs = [c]
    for k in range(1, B + 1):
        c *= -(n - 2.0 * k + 1.0) * (n - 2.0 * k + 2.0) / (k * (n - k + 1.0))
        cs.append(c)
    return cs[::-1]


def _pjfm_poly(n: int) -> list[float]:
    c = (n + 1.0) * (n + 2.0) * (n + 3.0) / 2.0 * (-1.0 if n % 2 else 1.0)
    cs = [c]
    for k in range(1, n + 1):
        c *= -(n + k + 3.0) * (n - k + 1.0) / (k * (k + 2.0))
        cs.append(c)
    return cs


def _jfm_poly(p: float, q: float, n: int) -> list[float]:
    # sign convention (-1)^(n+k): positive leading coefficient, so the
    # OFMM/CHFM/PJFM specialisations match pointwise
    c = 1.0
    for i in range(n):                 # Gamma(p+n) / (n! Gamma(p)) part
        c *= (p + i) / (i + 1.0)
    c *= math.gamma(p) / math.gamma(q)
    if n % 2:
        c = -c
    cs = [c]
    for k in range(1, n + 1):
        c *= -(p + n + k - 1.0) * (n - k + 1.0) / (k * (q + k - 1.0))
        cs.append(c)
    return cs


def _jfm_norm_scalar(p: float, q: float, n: int) -> float:
    # (p+2n) Gamma(q+n) n! / (Gamma(p+n) Gamma(p-q+n+1)), ratio products only
    acc = (p + 2.0 * n) * math.gamma(q) / (math.gamma(p) * math.gamma(p - q + 1.0))
    for i in range(n):
        acc *= (q + i) / (p + i) * (i + 1.0) / (p - q + 1.0 + i)
    return acc


def _zero_exponent(method: MethodSpec, n: int) -> float:
    """Leading power of r as r -> 0; negative means unbounded."""
    fam = method.family
    if fam == "CHFM":
        return -0.25
    if fam == "JFM":
        return (method.q - 2.0) / 2.0
    if fam == "FJFM":
        a = method.alpha
        return (a - 1.0) + a * (method.q - 2.0) / 2.0
    if fam in ("RHFM", "EFM"):
        return 0.5 if (fam == "RHFM" and n % 2 == 1) else -0.5
    if fam in ("GRHFM", "GPCET", "GPCT", "GPST"):
        a = method.alpha
        base = (a - 2.0) / 2.0
        if fam == "GPST" or (fam == "GRHFM" and n % 2 == 1):
            return base + a       # sin factor contributes r^alpha
        return base
    return 0.0


def singular_at_zero(method: MethodSpec) -> bool:
    """True when some order of the family is unbounded at the origin."""
    if method.family in ("RHFM", "GRHFM"):
        return _zero_exponent(method, 0) < 0  # even orders are the worst case
    return _zero_exponent(method, 0 if method.family != "GPST" else 1) < 0


def radial_direct(method: MethodSpec, n: int, r, m: int | None = None,
                  extend: bool = False):
    """Evaluate R_n(r) by direct summation of the defining formula.

    `r` may be a scalar or array with entries in [0, 1].  For ZM/PZM the
    angular repetition `m` is required.  Raises SingularKernelError when
    an unbounded kernel is evaluated at r = 0.

    With ``extend=True`` arguments beyond r = 1 are allowed (boundary
    cells integrated over their full square); families whose weight is
    undefined there vanish at the rim and evaluate to 0.
    """
    method.check_order(n, m)
    fam = method.family
    rr = np.asarray(r, dtype=float)
    scalar = rr.ndim == 0
    rr = np.atleast_1d(rr).astype(float)
    if np.any(rr < 0) or (not extend and np.any(rr > 1)):
        raise DomainError("radial kernels are defined on r in [0, 1]")
    at_zero = rr == 0.0
    if np.any(at_zero) and _zero_exponent(method, n) < 0:
        raise SingularKernelError(
            f"{fam} radial kernel of order {n} is unbounded at r = 0")

    if fam == "ZM":
        am = abs(m)
        out = math.sqrt((n + 1.0) / math.pi) * rr ** am \
            * _horner(_zm_poly(n, am), rr * rr)
    elif fam == "PZM":
        am = abs(m)
        out = math.sqrt((n + 1.0) / math.pi) * rr ** am \
            * _horner(_pzm_poly(n, am), rr)
    elif fam == "OFMM":
        out = math.sqrt((n + 1.0) / math.pi) * _horner(_ofmm_poly(n), rr)
    elif fam == "CHFM":
        u = 4.0 * rr - 2.0
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(at_zero, 0.0,
                         (1.0 - rr) / np.where(at_zero, 1.0, rr)) ** 0.25
        out = (2.0 / math.pi) * w * u ** (n % 2) * _horner(_chfm_poly(n), u * u)
    elif fam == "PJFM":
        with np.errstate(invalid="ignore"):
            w = np.sqrt((n + 2.0) * (rr - rr * rr)
                        / (math.pi * (n + 3.0) * (n + 1.0)))
        out = w * _horner(_pjfm_poly(n), rr)
    elif fam in ("JFM", "FJFM"):
        p, q = method.p, method.q
        if fam == "FJFM":
            a = method.alpha
            s = rr ** a
            pref = math.sqrt(a) * rr ** (a - 1.0)
        else:
            s = rr
            pref = 1.0
        scalarnorm = _jfm_norm_scalar(p, q, n) / (2.0 * math.pi)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.sqrt(np.where(s > 0, s, 1.0) ** (q - 2.0)
                        * (1.0 - s) ** (p - q) * scalarnorm)
        out = pref * w * _horner(_jfm_poly(p, q, n), s)
        if np.any(at_zero):
            out = np.where(at_zero, _fjfm_zero_limit(method, n), out)
    elif fam == "BFM":
        v = method.bessel_order
        lam = bessel_zero(v, n + 1)
        a_n = 0.5 * bessel_j(v + 1.0, lam) ** 2
        out = bessel_j(v, lam * rr) / math.sqrt(2.0 * math.pi * a_n)
    elif fam in ("RHFM", "EFM", "PCET", "PCT", "PST",
                 "GRHFM", "GPCET", "GPCT", "GPST"):
        out = _harmonic_eval(method, n, rr, at_zero)
    else:  # pragma: no cover
        raise DomainError(f"unhandled family {fam}")

    if extend:
        beyond = rr > 1.0
        if np.any(beyond):
            bad = beyond & ~np.isfinite(np.where(beyond, out, 0.0))
            if np.any(bad):
                out = np.where(bad, 0.0, out)  # weight vanishes at the rim
    if scalar:
        val = out[0]
        return complex(val) if np.iscomplexobj(out) else float(val)
    return out


def _fjfm_zero_limit(method: MethodSpec, n: int) -> float:
    # finite r -> 0 limit for JFM/FJFM when the leading exponent is >= 0
    e = _zero_exponent(method, n)
    if e > 0:
        return 0.0
    p, q = method.p, method.q
    a = method.alpha if method.family == "FJFM" else 1.0
    c0 = _jfm_poly(p, q, n)[0]
    return math.sqrt(a) * math.sqrt(_jfm_norm_scalar(p, q, n) / (2.0 * math.pi)) * c0


def _harmonic_eval(method: MethodSpec, n: int, rr: np.ndarray,
                   at_zero: np.ndarray):
    """Unified harmonic kernels: w(r) * T_n(r^alpha) with
    w = sqrt(alpha r^(alpha-2) / (2 pi))."""
    g = method.generic_form()
    fam, a = g.family, g.alpha
    with np.errstate(divide="ignore"):
        w = np.sqrt(a / (2.0 * math.pi)
                    * np.where(at_zero, 1.0, rr) ** (a - 2.0))
    s = rr ** a
    if fam == "GPCET":
        out = w * np.exp(2j * math.pi * n * s)
    elif fam == "GRHFM":
        if n == 0:
            out = w + 0.0
        elif n % 2 == 1:
            out = w * (_SQRT2 * np.sin(math.pi * (n + 1) * s))
        else:
            out = w * (_SQRT2 * np.cos(math.pi * n * s))
    elif fam == "GPCT":
        if n == 0:
            out = w + 0.0
        else:
            out = w * (_SQRT2 * np.cos(math.pi * n * s))
    else:  # GPST
        out = w * (_SQRT2 * np.sin(math.pi * n * s))
    if np.any(at_zero):
        e = _zero_exponent(method, n)
        if e > 0:
            out = np.where(at_zero, 0.0, out)
        elif e == 0.0 and np.any(~np.isfinite(np.atleast_1d(out)[at_zero])):
            # 0 * inf at the origin with a finite analytic limit
            lim = math.sqrt(a / (2.0 * math.pi))
            if fam == "GRHFM" and n % 2 == 1:
                lim *= _SQRT2 * math.pi * (n + 1)
            elif fam == "GPST":
                lim *= _SQRT2 * math.pi * n
            elif n != 0:
                lim *= _SQRT2
            out = np.where(at_zero, lim, out)
    return out


# ---------------------------------------------------------------------------
# recursive evaluation (Jacobi-type families)
# ---------------------------------------------------------------------------

def _jacobi_ab(method: MethodSpec, m: int | None) -> tuple[float, float]:
    fam = method.family
    if fam == "ZM":
        return 0.0, float(abs(m))
    if fam == "PZM":
        return 0.0, 2.0 * abs(m) + 1.0
    if fam == "OFMM":
        return 0.0, 1.0
    if fam == "CHFM":
        return 0.5, 0.5
    if fam == "PJFM":
        return 1.0, 2.0
    if fam in ("JFM", "FJFM"):
        return method.p - method.q, method.q - 1.0
    raise DomainError(
        f"recursive evaluation supports Jacobi-type families only (got {fam})")


def _monic_jacobi_coeffs(a: float, b: float, t: int) -> tuple[float, float]:
    """(alpha_t, beta_t) of the monic Jacobi recurrence on [-1, 1]."""
    ab = a + b
    if t == 0:
        alpha = (b - a) / (ab + 2.0)
        beta = 0.0  # unused
    else:
        alpha = (b * b - a * a) / ((2.0 * t + ab) * (2.0 * t + ab + 2.0))
        if t == 1:
            beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) ** 2 * (3.0 + ab))
        else:
            beta = (4.0 * t * (t + a) * (t + b) * (t + ab)
                    / ((2.0 * t + ab) ** 2 * (2.0 * t + ab + 1.0) * (2.0 * t + ab - 1.0)))
    return alpha, beta


def jacobi_orders(method: MethodSpec, n_max: int, m: int | None = None) -> list[int]:
    """The ascending radial orders a recursion sweep produces."""
    if method.family == "ZM":
        am = abs(m)
        return list(range(am, n_max + 1, 2))
    if method.family == "PZM":
        return list(range(abs(m), n_max + 1))
    return list(range(n_max + 1))


def radial_table(method: MethodSpec, n_max: int, r, m: int | None = None,
                 extend: bool = False) -> tuple[list[int], np.ndarray]:
    """All radial values of orders up to n_max via the stable recurrence.

    Returns (orders, table) with table[i] = R_orders[i] evaluated on `r`.
    Only Jacobi-type families are supported; harmonic and Bessel kernels
    need no recursion.
    """
    a, b = _jacobi_ab(method, m)
    orders = jacobi_orders(method, n_max, m)
    rr = np.atleast_1d(np.asarray(r, dtype=float))
    if method.family == "ZM":
        s = rr * rr
    elif method.family == "FJFM":
        s = rr ** method.alpha
    else:
        s = rr
    table = np.empty((len(orders), rr.size), dtype=float)
    if not orders:
        return orders, table
    table[0] = radial_direct(method, orders[0], rr, m, extend=extend)
    if len(orders) > 1:
        table[1] = radial_direct(method, orders[1], rr, m, extend=extend)
    for t in range(1, len(orders) - 1):
        a_t = (1.0 + _monic_jacobi_coeffs(a, b, t)[0]) / 2.0
        b_t = _monic_jacobi_coeffs(a, b, t)[1] / 4.0
        b_t1 = _monic_jacobi_coeffs(a, b, t + 1)[1] / 4.0
        table[t + 1] = ((s - a_t) * table[t]
                        - math.sqrt(b_t) * table[t - 1]) / math.sqrt(b_t1)
    return orders, table


def radial_values(method: MethodSpec, n: int, r, m: int | None = None,
                  strategy: str = "direct"):
    """Single-order radial values via the requested evaluation route."""
    if strategy == "recursive" and method.kind == "jacobi":
        orders, table = radial_table(method, n, r, m)
        return table[orders.index(n)]
    return radial_direct(method, n, r, m)


# ---------------------------------------------------------------------------
# fractional construction
# ---------------------------------------------------------------------------

def fractionalize(base_radial, alpha: float):
    """Substitute r := r^alpha while preserving weighted orthonormality.

    The returned radial is r -> sqrt(alpha) r^(alpha-1) base_radial(r^alpha);
    the weight is the unique factor keeping
    integral_0^1 R R'* r dr = delta / (2 pi) under s = r^alpha.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0 (got {alpha})")

    def fractional(r):
        rr = np.asarray(r, dtype=float)
        scalar = rr.ndim == 0
        rr = np.atleast_1d(rr)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = math.sqrt(alpha) * rr ** (alpha - 1.0) * np.asarray(base_radial(rr ** alpha))
        if scalar:
            v = out[0]
            return complex(v) if np.iscomplexobj(out) else float(v)
        return out

    return fractional


# ---------------------------------------------------------------------------
# zero counting
# ---------------------------------------------------------------------------

def radial_zero_count(method: MethodSpec, n: int, m: int | None = None,
                      samples: int = 4096) -> int:
    """Sign changes of R_n on the open interval (0, 1).

    One refinement pass re-samples each detected crossing so near-tangent
    zeros are not double counted.  Complex-valued kernels (EFM, PCET,
    GPCET) are rejected.
    """
    if method.complex_radial:
        raise DomainError(f"{method.family} radial kernel is complex-valued; "
                          "zero counting applies to real kernels only")
    grid = (np.arange(samples) + 0.5) / samples
    vals = np.asarray(radial_direct(method, n, grid, m), dtype=float)
    sign = np.sign(vals)
    nz = sign != 0
    sg = sign[nz]
    xg = grid[nz]
    flips = np.nonzero(sg[1:] * sg[:-1] < 0)[0]
    count = 0
    for i in flips:
        lo, hi = xg[i], xg[i + 1]
        fine = np.linspace(lo, hi, 65)
        fv = np.sign(np.asarray(radial_direct(method, n, fine, m), dtype=float))
        fv = fv[fv != 0]
        count += int(np.sum(fv[1:] * fv[:-1] < 0))
    return count
