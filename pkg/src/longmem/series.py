"""Price, return and volatility-proxy series plus the summary-moment battery."""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_series
from .exceptions import InputError, NumericalError

__all__ = [
    "PriceSeries", "ReturnSeries", "ProxyBase", "VolatilityProxy", "SummaryStats",
    "log_returns", "volatility_proxy", "summary_stats", "volume_change",
    "jarque_bera", "PowerProxyTransformer",
]


@dataclass(frozen=True)
class PriceSeries:
    """Raw daily observations: dates, index levels and optional share volume."""

    timestamps: np.ndarray
    prices: np.ndarray
    volume: Optional[np.ndarray] = None

    def __post_init__(self):
        ts = np.asarray(self.timestamps)
        prices = np.asarray(self.prices, dtype=np.float64)
        if ts.shape != prices.shape or prices.ndim != 1:
            raise InputError("timestamps and prices must be 1-d arrays of equal length")
        if ts.size > 1 and not np.all(ts[1:] > ts[:-1]):
            bad = int(np.argmax(~(ts[1:] > ts[:-1]))) + 1
            raise InputError(f"timestamps not strictly increasing at row {bad}", row=bad)
        bad = np.flatnonzero(~(prices > 0) | ~np.isfinite(prices))
        if bad.size:
            raise InputError(f"nonpositive price at row {bad[0]}", row=int(bad[0]))
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "prices", prices)
        if self.volume is not None:
            vol = np.asarray(self.volume, dtype=np.float64)
            if vol.shape != prices.shape:
                raise InputError("volume must have the same length as prices")
            bad = np.flatnonzero(~(vol >= 0) | ~np.isfinite(vol))
            if bad.size:
                raise InputError(f"negative volume at row {bad[0]}", row=int(bad[0]))
            object.__setattr__(self, "volume", vol)

    def __len__(self):
        return self.prices.size


@dataclass(frozen=True)
class ReturnSeries:
    """Percent log returns aligned to the later of each pair of dates."""

    values: np.ndarray
    timestamps: Optional[np.ndarray] = None

    def __post_init__(self):
        values = check_series(self.values, "returns")
        object.__setattr__(self, "values", values)
        if self.timestamps is not None and len(self.timestamps) != values.size:
            raise InputError("return timestamps misaligned with values")

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


class ProxyBase(str, Enum):
    ABSOLUTE = "absolute"
    SQUARED = "squared"


@dataclass(frozen=True)
class VolatilityProxy:
    values: np.ndarray
    base: ProxyBase
    power_k: float

    @property
    def exponent(self):
        """Exponent applied to |R_t|."""
        return 2.0 * self.power_k if self.base is ProxyBase.SQUARED else self.power_k

    @property
    def label(self):
        return f"{self.base.value}_k{self.power_k:g}"

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std_dev: float
    skewness: float
    kurtosis: float
    jarque_bera: float
    n: int


def _as_values(x):
    if isinstance(x, (ReturnSeries, VolatilityProxy)):
        return x.values
    return x


def _log_diff(values, what):
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        raise InputError(f"need at least 2 {what} observations, got {values.size}")
    bad = np.flatnonzero(~(values > 0))
    if bad.size:
        raise InputError(f"nonpositive {what} at row {bad[0]}", row=int(bad[0]))
    return 100.0 * np.diff(np.log(values))


def log_returns(prices):
    """Percent log returns ``100 * (ln p[t+1] - ln p[t])``.

    ``prices`` may be a :class:`PriceSeries` or any 1-d array of levels.
    """
    if isinstance(prices, PriceSeries):
        return ReturnSeries(_log_diff(prices.prices, "price"), prices.timestamps[1:])
    return ReturnSeries(_log_diff(prices, "price"))


def volume_change(prices):
    """Percent log change in volume, aligned one-to-one with :func:`log_returns`."""
    if not isinstance(prices, PriceSeries) or prices.volume is None:
        raise InputError("volume_change needs a PriceSeries carrying volume")
    return _log_diff(prices.volume, "volume")


def volatility_proxy(r, base="absolute", k=1.0):
    """Power-transformed volatility proxy ``|R|^k`` or ``(R^2)^k``.

    The squared proxy is evaluated as ``|R|^(2k)``, so a squared proxy at power
    ``k`` is bitwise identical to the absolute proxy at ``2k``.
    """
    base = ProxyBase(base)
    k = float(k)
    if not np.isfinite(k) or k <= 0:
        raise InputError(f"power k must be positive, got {k}")
    values = check_series(_as_values(r), "returns")
    exponent = 2.0 * k if base is ProxyBase.SQUARED else k
    return VolatilityProxy(np.abs(values) ** exponent, base, k)


def jarque_bera(skewness, kurtosis, n):
    """Jarque-Bera statistic from skewness, raw kurtosis and sample size."""
    return n / 6.0 * (skewness ** 2 + (kurtosis - 3.0) ** 2 / 4.0)


def summary_stats(x):
    """Mean, std, skewness, raw kurtosis and Jarque-Bera of a series.

    Skewness and kurtosis use divide-by-n central moments; the standard
    deviation uses divide-by-(n-1).
    """
    x = check_series(_as_values(x), "x", min_length=4)
    n = x.size
    dev = x - x.mean()
    m2 = np.mean(dev ** 2)
    if m2 == 0.0 or np.ptp(x) == 0.0:
        raise NumericalError("constant series: higher moments are undefined")
    skew = np.mean(dev ** 3) / m2 ** 1.5
    kurt = np.mean(dev ** 4) / m2 ** 2
    return SummaryStats(
        mean=float(x.mean()),
        std_dev=float(np.std(x, ddof=1)),
        skewness=float(skew),
        kurtosis=float(kurt),
        jarque_bera=float(jarque_bera(skew, kurt, n)),
        n=n,
    )


class PowerProxyTransformer(TransformerMixin, BaseEstimator):
    """Transformer wrapping :func:`volatility_proxy` for pipeline use.

    Parameters
    ----------
    base : {"absolute", "squared"}
    k : float
        Power applied to the proxy base.
    """

    def __init__(self, base="absolute", k=1.0):
        self.base = base
        self.k = k

    def fit(self, X, y=None):
        ProxyBase(self.base)
        if self.k <= 0:
            raise InputError(f"power k must be positive, got {self.k}")
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        return volatility_proxy(X, self.base, self.k).values
