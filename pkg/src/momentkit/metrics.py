"""The five evaluation measures: ACE, DT, MSRE, SSIM, CCP."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

import numpy as np

from .engine import MomentSet
from .errors import DomainError
from .methods import MethodSpec


@dataclass
class AccuracyReport:
    method: MethodSpec
    K: int
    ace: float
    dt: float
    unstable: bool = False


def ace(moments: MomentSet) -> float:
    """Average Calculation Error of a unity-image moment set:
    sum over m != 0 of |M_nm|, divided by the full |S(K)| (the published
    formula keeps the complete cardinality in the denominator even
    though m = 0 terms are excluded from the sum).

    Non-finite coefficients yield +inf rather than NaN so instability
    shows up as a flagged divergence.
    """
    v = moments.vector()
    if v.size == 0:
        return 0.0
    ms = np.array([m for _, m in sorted(moments.coefficients)])
    mags = np.abs(v)
    sel = mags[ms != 0]
    if sel.size and not np.all(np.isfinite(sel)):
        return float("inf")
    return float(np.sum(sel) / v.size)


def decomposition_time(task, repeats: int = 5) -> float:
    """Median wall-clock seconds of `task()` over `repeats` runs.

    The timed closure must run single-threaded and timing calls must not
    overlap in one process; a monotonic clock is used.
    """
    if repeats < 1:
        raise DomainError("repeats must be >= 1")
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        task()
        times.append(time.perf_counter() - t0)
    return float(statistics.median(times))


def _disk_mask(N: int, mapping: str = "incircle") -> np.ndarray:
    i = np.arange(1, N + 1, dtype=float)
    if mapping == "circumcircle":
        x = (2.0 * i - N) / (np.sqrt(2.0) * N)
    else:
        x = (2.0 * i - N) / N
    X, Y = np.meshgrid(x, x, indexing="ij")
    return (np.hypot(X, Y) <= 1.0).T    # pixel layout [row=j-1, col=i-1]


def msre(original: np.ndarray, reconstructed: np.ndarray,
         mask: np.ndarray | None = None, mapping: str = "incircle") -> float:
    """Mean-square reconstruction error over the unit-disk support:
    sum (f - f_hat)^2 / sum f^2."""
    f = np.asarray(original, dtype=float)
    g = np.asarray(reconstructed, dtype=float)
    if f.shape != g.shape:
        raise DomainError("images must share dimensions")
    if mask is None:
        mask = _disk_mask(f.shape[0], mapping)
    denom = float(np.sum(f[mask] ** 2))
    if denom == 0.0:
        raise DomainError("msre undefined for an all-zero original")
    return float(np.sum((f[mask] - g[mask]) ** 2) / denom)


def ssim(original: np.ndarray, reconstructed: np.ndarray,
         mask: np.ndarray | None = None, mapping: str = "incircle") -> float:
    """Global structural similarity over in-disk pixels on the 0-255
    scale, C1 = (0.01*255)^2, C2 = (0.03*255)^2.

    Single whole-image statistics, exactly as the printed formula -- not
    the windowed variant of common SSIM implementations.
    """
    f = np.asarray(original, dtype=float)
    g = np.asarray(reconstructed, dtype=float)
    if f.shape != g.shape:
        raise DomainError("images must share dimensions")
    if mask is None:
        mask = _disk_mask(f.shape[0], mapping)
    a = f[mask] * 255.0
    b = g[mask] * 255.0
    c1 = (0.01 * 255.0) ** 2
    c2 = (0.03 * 255.0) ** 2
    mu_a = a.mean()
    mu_b = b.mean()
    var_a = a.var()
    var_b = b.var()
    cov = float(np.mean((a - mu_a) * (b - mu_b)))
    return float(((2 * mu_a * mu_b + c1) * (2 * cov + c2))
                 / ((mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)))


def ccp(predictions: list, truth: list) -> float:
    """Correct Classification Percentage: correct / total * 100."""
    if len(predictions) == 0:
        raise DomainError("ccp needs at least one sample")
    if len(predictions) != len(truth):
        raise DomainError("predictions and truth differ in length")
    correct = sum(1 for p, t in zip(predictions, truth) if p == t)
    return 100.0 * correct / len(predictions)
