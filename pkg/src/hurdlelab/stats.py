"""Bootstrap intervals and log-log least squares."""
from __future__ import annotations

import numpy as np
from numba import njit

from .core import RandomStream, next_below


@njit(nogil=True, cache=True)
def _resample_means(samples, resamples, state):
    n = samples.size
    out = np.empty(resamples)
    for b in range(resamples):
        s = 0.0
        for _ in range(n):
            s += samples[next_below(state, n)]
        out[b] = s / n
    return out


def resample_means(samples, resamples: int, rng: RandomStream) -> np.ndarray:
    """Means of ``resamples`` with-replacement resamples of ``samples``."""
    return _resample_means(np.asarray(samples, dtype=np.float64), resamples, rng.state)


def bootstrap_ci(samples, level: float = 0.95, resamples: int = 2000,
                 rng: RandomStream | None = None) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean.

    The interval is widened if needed so it always contains the sample mean.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 2:
        raise ValueError("bootstrap needs at least two samples")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    rng = rng or RandomStream(0)
    means = resample_means(x, resamples, rng)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(means, [alpha, 1.0 - alpha])
    m = x.mean()
    return float(min(lo, m)), float(max(hi, m))


def loglog_ls(x, y) -> tuple[float, float, float]:
    """Least squares of ln y on ln x; returns (slope, intercept, r2)."""
    lx = np.log(np.asarray(x, dtype=np.float64))
    ly = np.log(np.asarray(y, dtype=np.float64))
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    ss_res = float((resid ** 2).sum())
    # constant y: the fit is exact, call it a perfect fit
    r2 = 1.0 if ss_tot <= 1e-300 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return float(slope), float(intercept), r2
