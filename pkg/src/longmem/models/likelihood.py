"""Conditional log-likelihoods for standardized innovations."""
import math

import numpy as np
from scipy.special import gammaln

from ..exceptions import InputError

LOG_2PI = math.log(2.0 * math.pi)


def student_t_loglik(resids, sigma2, nu, per_obs=False):
    """Log-likelihood of ``resids`` under a unit-variance Student-t scaled by ``sigma2``.

    Parameters
    ----------
    resids, sigma2 : ndarray
        Aligned residuals and strictly positive conditional variances.
    nu : float
        Degrees of freedom, must exceed 2.
    per_obs : bool
        Return the per-observation contributions instead of their sum.
    """
    if not nu > 2:
        raise InputError(f"degrees of freedom must exceed 2, got {nu}")
    if np.any(~(sigma2 > 0)):
        raise InputError("conditional variances must be strictly positive")
    const = gammaln((nu + 1.0) / 2.0) - gammaln(nu / 2.0) - 0.5 * math.log(math.pi * (nu - 2.0))
    ll = const - 0.5 * np.log(sigma2) - 0.5 * (nu + 1.0) * np.log1p(
        resids ** 2 / ((nu - 2.0) * sigma2))
    return ll if per_obs else float(ll.sum())


def gaussian_loglik(resids, sigma2, per_obs=False):
    if np.any(~(sigma2 > 0)):
        raise InputError("conditional variances must be strictly positive")
    ll = -0.5 * (LOG_2PI + np.log(sigma2) + resids ** 2 / sigma2)
    return ll if per_obs else float(ll.sum())
