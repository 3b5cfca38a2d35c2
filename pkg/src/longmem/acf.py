"""Sample autocorrelations with the i.i.d. band and the Ljung-Box statistic."""
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from ._validation import check_positive_int, check_series
from .exceptions import InputError

__all__ = ["AcfResult", "PortmanteauResult", "acf", "ljung_box", "chi2_sf", "autocovariances"]


@dataclass(frozen=True)
class AcfResult:
    lags: np.ndarray
    rho: np.ndarray
    ci_halfwidth: float
    n: int


@dataclass(frozen=True)
class PortmanteauResult:
    statistic: float
    lags_used: int
    p_value: float

    def rejects(self, level=0.05):
        return self.p_value < level


def chi2_sf(x, df):
    """Upper-tail chi-square probability via the regularized incomplete gamma."""
    if x <= 0:
        return 1.0
    return float(gammaincc(df / 2.0, x / 2.0))


def autocovariances(x, max_lag):
    """Divide-by-n autocovariances at lags 0..max_lag."""
    dev = x - x.mean()
    n = dev.size
    return np.array([dev[: n - j] @ dev[j:] for j in range(max_lag + 1)]) / n


def acf(x, max_lag=100):
    """Sample ACF at lags 1..max_lag using the full-sample variance denominator."""
    x = check_series(x, "x", min_length=2, allow_constant=False)
    max_lag = check_positive_int(max_lag, "max_lag")
    n = x.size
    if max_lag >= n:
        raise InputError(f"max_lag={max_lag} must be smaller than n={n}")
    dev = x - x.mean()
    denom = dev @ dev
    rho = np.array([dev[:-j] @ dev[j:] for j in range(1, max_lag + 1)]) / denom
    return AcfResult(np.arange(1, max_lag + 1), rho, 1.96 / np.sqrt(n), n)


def ljung_box(x, m=12):
    """Ljung-Box Q statistic over lags 1..m with its chi-square(m) p-value."""
    x = check_series(x, "x", min_length=2, allow_constant=False)
    m = check_positive_int(m, "m")
    n = x.size
    rho = acf(x, m).rho
    q = n * (n + 2) * np.sum(rho ** 2 / (n - np.arange(1, m + 1)))
    return PortmanteauResult(float(q), m, chi2_sf(q, m))
