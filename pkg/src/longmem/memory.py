"""Formal long-memory tests: Lo's modified R/S, R/S d and the GPH regression."""
import math
import warnings
from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_positive_int, check_series
from .acf import autocovariances
from .exceptions import InputError, NumericalError

__all__ = [
    "Significance", "RsResult", "GphResult", "newey_west_lrv", "default_nw_lags",
    "modified_rs", "rs_d_estimate", "default_rs_windows", "periodogram",
    "gph_bandwidth", "gph_estimate", "lad_fit", "GPH", "ModifiedRS",
    "LO_CRITICAL_5", "LO_CRITICAL_1", "NORMAL_CRITICAL_5", "NORMAL_CRITICAL_1",
]

# Upper fractiles of the range of a Brownian bridge (Lo 1991, Table II).
LO_CRITICAL_5 = 1.862
LO_CRITICAL_1 = 2.098
# Two-sided standard normal.
NORMAL_CRITICAL_5 = 1.959963984540054
NORMAL_CRITICAL_1 = 2.5758293035489004


class Significance(IntEnum):
    NONE = 0
    FIVE = 1
    ONE = 2

    @property
    def stars(self):
        return "*" * int(self)

    @classmethod
    def from_statistic(cls, stat, crit5, crit1):
        if stat > crit1:
            return cls.ONE
        if stat > crit5:
            return cls.FIVE
        return cls.NONE


@dataclass(frozen=True)
class RsResult:
    q_stat: float
    bandwidth_q: int
    d_estimate: float
    significance: Significance


@dataclass(frozen=True)
class GphResult:
    d_estimate: float
    t_statistic: float
    bandwidth_m: int
    beta0: float
    beta1: float
    removed: int = 0

    @property
    def significance(self):
        return Significance.from_statistic(abs(self.t_statistic), NORMAL_CRITICAL_5,
                                           NORMAL_CRITICAL_1)


def default_nw_lags(n):
    """Automatic Newey-West lag ``floor(4 (n/100)^(2/9))``."""
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def newey_west_lrv(x, q):
    """Bartlett-weighted long-run variance with divide-by-n autocovariances."""
    x = check_series(x, "x", min_length=2, allow_constant=False)
    q = check_positive_int(q, "q", minimum=0)
    if q >= x.size:
        raise InputError(f"q={q} must be smaller than n={x.size}")
    gamma = autocovariances(x, q)
    weights = 1.0 - np.arange(1, q + 1) / (q + 1.0)
    lrv = gamma[0] + 2.0 * np.dot(weights, gamma[1:])
    if not lrv > 0:
        raise NumericalError(f"nonpositive long-run variance {lrv}")
    return float(lrv)


def _range_of_partial_sums(x):
    s = np.cumsum(x - x.mean())
    return s.max() - s.min()


def modified_rs(x, q=None, window_grid=None, with_d=True):
    """Lo's modified rescaled-range statistic ``V = Q_T / sqrt(T)``.

    Parameters
    ----------
    x : array-like
        Series of at least 50 observations.
    q : int, optional
        Newey-West lags; defaults to :func:`default_nw_lags`.
    window_grid : sequence of int, optional
        Window sizes for the accompanying R/S d estimate.
    with_d : bool
        Also compute :func:`rs_d_estimate` (NaN when the series is too short).
    """
    x = check_series(x, "x", min_length=50, allow_constant=False)
    n = x.size
    q = default_nw_lags(n) if q is None else q
    sigma = math.sqrt(newey_west_lrv(x, q))
    v = _range_of_partial_sums(x) / (sigma * math.sqrt(n))
    d = float("nan")
    if with_d:
        try:
            d = rs_d_estimate(x, window_grid)
        except InputError:
            if window_grid is not None:
                raise
    return RsResult(float(v), int(q), d,
                    Significance.from_statistic(v, LO_CRITICAL_5, LO_CRITICAL_1))


def lad_fit(X, y, tol=1e-8, max_iter=500):
    """Least-absolute-deviation coefficients by iteratively reweighted LS."""
    beta = np.linalg.lstsq(X, y, rcond=None)[0]
    for _ in range(max_iter):
        resid = np.abs(y - X @ beta)
        w = 1.0 / np.maximum(resid, 1e-10)
        sw = np.sqrt(w)
        new = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)[0]
        change = np.max(np.abs(new - beta)) / max(np.max(np.abs(beta)), 1e-12)
        beta = new
        if change < tol:
            break
    return beta


def default_rs_windows(n):
    """Powers of two from 32 up to ``n // 4``."""
    out = []
    w = 32
    while w <= n // 4:
        out.append(w)
        w *= 2
    return out


def rs_d_estimate(x, window_grid=None):
    """Memory parameter from the log-log slope of classical R/S by window size.

    For each window ``w`` the rescaled range is averaged over the
    non-overlapping blocks of length ``w``; an LAD line is fitted to
    ``log R/S(w)`` against ``log w`` and ``d = slope - 1/2``.
    """
    x = check_series(x, "x", min_length=2)
    n = x.size
    grid = default_rs_windows(n) if window_grid is None else [int(w) for w in window_grid]
    if len(grid) < 4:
        raise InputError(f"R/S window grid needs at least 4 sizes, got {len(grid)}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InputError("R/S window grid must be strictly increasing")
    if grid[0] < 16 or grid[-1] > n:
        raise InputError(f"R/S windows must lie in [16, {n}]")
    log_w, log_rs = [], []
    for w in grid:
        blocks = x[: (n // w) * w].reshape(-1, w)
        dev = blocks - blocks.mean(axis=1, keepdims=True)
        sd = np.sqrt(np.mean(dev ** 2, axis=1))
        partial = np.cumsum(dev, axis=1)
        rng = partial.max(axis=1) - partial.min(axis=1)
        ok = sd > 0
        if not ok.any():
            continue
        log_w.append(math.log(w))
        log_rs.append(math.log(np.mean(rng[ok] / sd[ok])))
    if len(log_w) < 2:
        raise NumericalError("every R/S block had zero variance")
    X = np.column_stack([np.ones(len(log_w)), log_w])
    slope = lad_fit(X, np.asarray(log_rs))[1]
    return float(slope - 0.5)


def gph_bandwidth(n, power=0.8):
    """Default GPH bandwidth: ``n^0.8`` rounded to the nearest integer."""
    return int(math.floor(n ** power + 0.5))


def periodogram(x, m, method="fft"):
    """Periodogram ordinates at Fourier frequencies ``2 pi j / n``, j = 1..m.

    ``method="direct"`` evaluates the DFT sums explicitly and serves as a
    cross-check for the FFT path.
    """
    x = check_series(x, "x")
    n = x.size
    dev = x - x.mean()
    j = np.arange(1, m + 1)
    if method == "fft":
        dft = np.fft.fft(dev)[1 : m + 1]
    elif method == "direct":
        t = np.arange(1, n + 1)
        omega = 2.0 * np.pi * j / n
        dft = np.array([np.sum(dev * np.exp(-1j * w * t)) for w in omega])
    else:
        raise InputError(f"unknown periodogram method {method!r}")
    return 2.0 * np.pi * j / n, np.abs(dft) ** 2 / (2.0 * np.pi * n)


def gph_estimate(x, m=None, method="fft"):
    """Geweke/Porter-Hudak log-periodogram regression estimate of ``d``.

    OLS of ``log I(w_j)`` on ``log w_j`` over the first ``m`` Fourier
    frequencies; ``d = -beta1 / 2`` and the t statistic uses the OLS
    standard error of the slope.
    """
    x = check_series(x, "x", min_length=128, allow_constant=False)
    n = x.size
    m = gph_bandwidth(n) if m is None else int(m)
    if not 2 <= m <= n // 2:
        raise InputError(f"GPH bandwidth m={m} outside [2, {n // 2}]")
    omega, ordinates = periodogram(x, m, method)
    keep = ordinates > 0
    removed = int(m - keep.sum())
    if removed:
        if removed > 0.05 * m:
            raise NumericalError(f"{removed} of {m} periodogram ordinates are zero")
        warnings.warn(f"dropped {removed} zero periodogram ordinates", RuntimeWarning)
    lx = np.log(omega[keep])
    ly = np.log(ordinates[keep])
    mm = lx.size
    xc = lx - lx.mean()
    sxx = xc @ xc
    beta1 = (xc @ (ly - ly.mean())) / sxx
    beta0 = ly.mean() - beta1 * lx.mean()
    resid = ly - beta0 - beta1 * lx
    se1 = math.sqrt((resid @ resid) / (mm - 2) / sxx)
    d = -beta1 / 2.0
    return GphResult(float(d), float(d / (se1 / 2.0)), m, float(beta0), float(beta1), removed)


class GPH(BaseEstimator):
    """Log-periodogram memory estimator with a scikit-learn interface.

    Parameters
    ----------
    bandwidth : int or None
        Number of Fourier frequencies; ``None`` uses ``round(n ** 0.8)``.
    method : {"fft", "direct"}
    """

    def __init__(self, bandwidth=None, method="fft"):
        self.bandwidth = bandwidth
        self.method = method

    def fit(self, X, y=None):
        self.result_ = gph_estimate(X, self.bandwidth, self.method)
        self.d_ = self.result_.d_estimate
        self.bandwidth_ = self.result_.bandwidth_m
        return self

    def score(self, X=None, y=None):
        check_is_fitted(self, "result_")
        return self.result_.t_statistic


class ModifiedRS(BaseEstimator):
    """Lo's modified R/S test plus the LAD R/S memory estimate.

    Parameters
    ----------
    nw_lags : int or None
        Newey-West lags for the long-run variance.
    window_grid : sequence of int or None
    """

    def __init__(self, nw_lags=None, window_grid=None):
        self.nw_lags = nw_lags
        self.window_grid = window_grid

    def fit(self, X, y=None):
        self.result_ = modified_rs(X, self.nw_lags, self.window_grid)
        self.statistic_ = self.result_.q_stat
        self.d_ = self.result_.d_estimate
        return self

    def score(self, X=None, y=None):
        check_is_fitted(self, "result_")
        return self.result_.q_stat
