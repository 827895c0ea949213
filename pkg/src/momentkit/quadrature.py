"""Gauss-Legendre nodes and weights.

Orders up to 10 are hard-coded to 20 significant digits; larger rules
are generated by Newton iteration on the Legendre recurrence (von
Winckel's classic scheme) and cached.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

_GL_TABLE = {
    1: (
        (0.0,),
        (2.0,),
    ),
    2: (
        (-0.577350269189625764509, 0.577350269189625764509),
        (1.0, 1.0),
    ),
    3: (
        (-0.774596669241483377036, 0.0, 0.774596669241483377036),
        (0.555555555555555555556, 0.888888888888888888889, 0.555555555555555555556),
    ),
    4: (
        (-0.861136311594052575224, -0.339981043584856264803,
         0.339981043584856264803, 0.861136311594052575224),
        (0.347854845137453857373, 0.652145154862546142627,
         0.652145154862546142627, 0.347854845137453857373),
    ),
    5: (
        (-0.906179845938663992798, -0.538469310105683091036, 0.0,
         0.538469310105683091036, 0.906179845938663992798),
        (0.236926885056189087514, 0.478628670499366468041,
         0.568888888888888888889, 0.478628670499366468041,
         0.236926885056189087514),
    ),
    6: (
        (-0.932469514203152027812, -0.661209386466264513661,
         -0.238619186083196908631, 0.238619186083196908631,
         0.661209386466264513661, 0.932469514203152027812),
        (0.17132449237917034504, 0.36076157304813860757,
         0.46791393457269104739, 0.46791393457269104739,
         0.36076157304813860757, 0.17132449237917034504),
    ),
    7: (
        (-0.949107912342758524526, -0.741531185599394439864,
         -0.405845151377397166907, 0.0, 0.405845151377397166907,
         0.741531185599394439864, 0.949107912342758524526),
        (0.129484966168869693271, 0.279705391489276667901,
         0.38183005050511894495, 0.417959183673469387755,
         0.38183005050511894495, 0.279705391489276667901,
         0.129484966168869693271),
    ),
    8: (
        (-0.960289856497536231684, -0.796666477413626739592,
         -0.525532409916328985818, -0.183434642495649804939,
         0.183434642495649804939, 0.525532409916328985818,
         0.796666477413626739592, 0.960289856497536231684),
        (0.101228536290376259153, 0.222381034453374470544,
         0.313706645877887287338, 0.362683783378361982965,
         0.362683783378361982965, 0.313706645877887287338,
         0.222381034453374470544, 0.101228536290376259153),
    ),
    9: (
        (-0.968160239507626089836, -0.836031107326635794299,
         -0.613371432700590397309, -0.324253423403808929039, 0.0,
         0.324253423403808929039, 0.613371432700590397309,
         0.836031107326635794299, 0.968160239507626089836),
        (0.0812743883615744119719, 0.180648160694857404058,
         0.260610696402935462319, 0.312347077040002840069,
         0.330239355001259763165, 0.312347077040002840069,
         0.260610696402935462319, 0.180648160694857404058,
         0.0812743883615744119719),
    ),
    10: (
        (-0.973906528517171720078, -0.865063366688984510732,
         -0.679409568299024406234, -0.433395394129247190799,
         -0.148874338981631210885, 0.148874338981631210885,
         0.433395394129247190799, 0.679409568299024406234,
         0.865063366688984510732, 0.973906528517171720078),
        (0.0666713443086881375936, 0.149451349150580593146,
         0.219086362515982043996, 0.269266719309996355091,
         0.295524224714752870174, 0.295524224714752870174,
         0.269266719309996355091, 0.219086362515982043996,
         0.149451349150580593146, 0.0666713443086881375936),
    ),
}

_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    if n < 1:
        raise DomainError(f"rule order must be >= 1 (got {n})")
    if n in _cache:
        return _cache[n]
    if n <= 10:
        x, w = (np.array(v, dtype=float) for v in _GL_TABLE[n])
    else:
        k = np.arange(n)
        x = np.cos(np.pi * (k + 0.75) / (n + 0.5))
        for _ in range(100):
            p0 = np.ones_like(x)
            p1 = x.copy()
            for deg in range(2, n + 1):
                p0, p1 = p1, ((2 * deg - 1) * x * p1 - (deg - 1) * p0) / deg
            dp = n * (x * p1 - p0) / (x * x - 1.0)
            dx = p1 / dp
            x -= dx
            if np.max(np.abs(dx)) < 1e-15:
                break
        p0 = np.ones_like(x)
        p1 = x.copy()
        for deg in range(2, n + 1):
            p0, p1 = p1, ((2 * deg - 1) * x * p1 - (deg - 1) * p0) / deg
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        w = 2.0 / ((1.0 - x * x) * dp * dp)
        order = np.argsort(x)
        x, w = x[order], w[order]
    x.setflags(write=False)
    w.setflags(write=False)
    _cache[n] = (x, w)
    return x, w


def gauss_legendre_on(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """The n-point rule mapped to [a, b]."""
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def graded_composite_nodes(n_total: int, floor: float = 1e-18,
                           ratio: float = 10.0) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [0, 1], geometrically graded at 0.

    Resolves integrable algebraic endpoint singularities (r^(-1/2) and
    milder) that defeat a single global rule of the same size.
    """
    edges = [1.0]
    while edges[-1] > floor:
        edges.append(edges[-1] / ratio)
    edges.append(0.0)
    edges = np.array(edges[::-1])
    per = max(4, n_total // (len(edges) - 1))
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre_on(float(a), float(b), per)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)
