"""Residual diagnostics and information criteria for fitted volatility models."""
import math

import numpy as np

from .._validation import check_positive_int, check_series
from ..acf import PortmanteauResult, chi2_sf
from ..exceptions import InputError, NumericalError

__all__ = ["engle_lm", "info_criteria"]


def engle_lm(std_residuals, m=12):
    """Engle's LM test for ARCH effects up to order ``m``.

    Squared residuals are regressed on a constant and their own ``m`` lags;
    the statistic is ``(n - m) R^2`` referred to chi-square(m).
    """
    z = check_series(std_residuals, "std_residuals")
    m = check_positive_int(m, "m")
    n = z.size
    if n <= m + 1:
        raise InputError(f"need more than m + 1 = {m + 1} observations, got {n}")
    y2 = z ** 2
    target = y2[m:]
    X = np.column_stack([np.ones(n - m)] + [y2[m - j : n - j] for j in range(1, m + 1)])
    if np.ptp(target) == 0.0:
        raise NumericalError("squared residuals are constant; LM regression is degenerate")
    beta, _, rank, _ = np.linalg.lstsq(X, target, rcond=None)
    if rank < X.shape[1]:
        raise NumericalError("LM regressor matrix is rank deficient")
    resid = target - X @ beta
    dev = target - target.mean()
    r2 = 1.0 - (resid @ resid) / (dev @ dev)
    stat = (n - m) * r2
    return PortmanteauResult(float(stat), m, chi2_sf(stat, m))


def info_criteria(loglik, p, n):
    """``(aic, bic)`` with ``aic = -2 ll + 2p`` and ``bic = -2 ll + p ln n``."""
    return -2.0 * loglik + 2.0 * p, -2.0 * loglik + p * math.log(n)
