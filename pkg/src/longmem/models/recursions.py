"""Conditional-variance recursions for GARCH(1,1), FIGARCH(1,d,1), FIEGARCH(1,d,1).

The filters take demeaned residuals. Pre-sample squared residuals and
variances are set to ``backcast`` (the mean squared residual by default).
"""
import math

import numba
import numpy as np
from scipy.signal import lfilter
from scipy.special import gammaln

from ..fracdiff import _frac_coeffs, figarch_lag_coeffs

LOG_VARIANCE_BOUND = 50.0


def garch_variance(resids, a0, alpha, beta, backcast):
    """``s2[t] = a0 + alpha * e[t-1]^2 + beta * s2[t-1]``."""
    e2 = resids ** 2
    drive = np.empty_like(e2)
    drive[0] = a0 + alpha * backcast
    drive[1:] = a0 + alpha * e2[:-1]
    return lfilter([1.0], [1.0, -beta], drive, zi=[beta * backcast])[0]


def figarch_variance(resids, a, d, phi1, b1, K, backcast):
    """``(1 - b1 L) s2 = a + [(1 - b1 L) - (1 - phi1 L)(1 - L)^d] e^2``.

    The fractional polynomial is truncated at lag ``K``. With ``d = 0`` the
    recursion is exactly GARCH(1,1) with ``alpha = phi1 - b1``.
    """
    n = resids.size
    coef = np.concatenate(([0.0], figarch_lag_coeffs(d, phi1, b1, K)))
    e2 = np.concatenate((np.full(K, backcast), resids ** 2))
    arch_part = np.convolve(e2, coef)[K : K + n]
    return lfilter([1.0], [1.0, -b1], a + arch_part, zi=[b1 * backcast])[0]


def expected_abs(nu):
    """E|z| for a unit-variance shock; ``nu=None`` or inf means Gaussian."""
    if nu is None or not math.isfinite(nu):
        return math.sqrt(2.0 / math.pi)
    return 2.0 * math.sqrt(nu - 2.0) * math.exp(
        gammaln((nu + 1.0) / 2.0) - gammaln(nu / 2.0)) / (math.sqrt(math.pi) * (nu - 1.0))


@numba.njit(cache=True)
def _fiegarch_core(x, simulate, level, magnitude, leverage, phi1, delta, vol_term, e_abs,
                   bound):
    n = x.size
    K1 = delta.size
    sigma2 = np.empty(n)
    eps = np.empty(n)
    g = np.zeros(n)
    clamped = 0
    u = 0.0
    for t in range(n):
        h = level + vol_term[t] + u
        if h > bound:
            h = bound
            clamped += 1
        elif h < -bound:
            h = -bound
            clamped += 1
        s2 = math.exp(h)
        sigma2[t] = s2
        if simulate:
            z = x[t]
            eps[t] = z * math.sqrt(s2)
        else:
            eps[t] = x[t]
            z = x[t] / math.sqrt(s2)
        g[t] = leverage * z + magnitude * (abs(z) - e_abs)
        acc = 0.0
        top = t + 1 if t + 1 < K1 else K1
        for k in range(top):
            acc += delta[k] * g[t - k]
        u = phi1 * u + acc
    return sigma2, eps, clamped


def fiegarch_variance(resids, a, magnitude, leverage, phi1, d, K, nu=None,
                      volume=None, volume_coef=0.0, simulate=False):
    """Log-variance recursion with an asymmetric news impact.

    ``ln s2[t] = a / (1 - phi1) + volume_coef * v[t] + u[t]`` with
    ``(1 - phi1 L) u[t] = (1 - L)^(-d) g(z[t-1])`` and
    ``g(z) = leverage * z + magnitude * (|z| - E|z|)``. Log variance is
    clamped to +-50.

    Returns ``(sigma2, eps, n_clamped)``; with ``simulate=True`` the input
    is read as standardized shocks and ``eps`` holds the generated residuals.
    """
    x = np.ascontiguousarray(resids, dtype=np.float64)
    delta = _frac_coeffs(-d, K) if d != 0.0 else np.array([1.0])
    if volume is None or volume_coef == 0.0:
        vol_term = np.zeros(x.size)
    else:
        vol_term = volume_coef * np.asarray(volume, dtype=np.float64)
    return _fiegarch_core(x, simulate, a / (1.0 - phi1), magnitude, leverage, phi1, delta,
                          vol_term, expected_abs(nu), LOG_VARIANCE_BOUND)


@numba.njit(cache=True)
def _figarch_simulate_core(z, a, b1, coef, start):
    n = z.size
    K = coef.size
    e2 = np.full(n + K, start)
    sigma2 = np.empty(n)
    eps = np.empty(n)
    prev = start
    for t in range(n):
        acc = 0.0
        for k in range(K):
            acc += coef[k] * e2[K + t - 1 - k]
        s2 = a + b1 * prev + acc
        sigma2[t] = s2
        eps[t] = z[t] * math.sqrt(s2)
        e2[K + t] = eps[t] * eps[t]
        prev = s2
    return sigma2, eps


def figarch_simulate(z, a, d, phi1, b1, K):
    """Run the FIGARCH recursion generatively from standardized shocks ``z``.

    Pre-sample values sit at the truncated model's stationary level
    ``a / (1 - b1 - sum(coef))``.
    """
    coef = figarch_lag_coeffs(d, phi1, b1, K)
    start = a / (1.0 - b1 - coef.sum())
    return _figarch_simulate_core(np.ascontiguousarray(z, dtype=np.float64), a, b1, coef, start)


@numba.njit(cache=True)
def _garch_simulate_core(z, a0, alpha, beta, start):
    n = z.size
    sigma2 = np.empty(n)
    eps = np.empty(n)
    prev_s2 = start
    prev_e2 = start
    for t in range(n):
        s2 = a0 + alpha * prev_e2 + beta * prev_s2
        sigma2[t] = s2
        eps[t] = z[t] * math.sqrt(s2)
        prev_s2 = s2
        prev_e2 = eps[t] * eps[t]
    return sigma2, eps


def garch_simulate(z, a0, alpha, beta):
    start = a0 / (1.0 - alpha - beta)
    return _garch_simulate_core(np.ascontiguousarray(z, dtype=np.float64), a0, alpha, beta, start)
