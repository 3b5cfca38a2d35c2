"""Fractional difference operator and FIGARCH ARCH(inf) weights."""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import lfilter

from ._validation import check_positive_int, check_series
from .exceptions import InputError

__all__ = [
    "FracDiffFilter", "ArchInftyWeights", "fracdiff_coeffs", "fracdiff_filter",
    "arch_infty_weights", "figarch_lag_coeffs",
]


@dataclass(frozen=True)
class FracDiffFilter:
    """Truncated expansion of ``(1 - L)^d`` as coefficients ``pi_0..pi_K``."""

    d: float
    coeffs: np.ndarray

    @property
    def truncation_K(self):
        return self.coeffs.size - 1


@dataclass(frozen=True)
class ArchInftyWeights:
    d: float
    phi1: float
    b1: float
    lam: np.ndarray  # lam[0] is the lag-1 weight
    first_negative: Optional[int]  # 1-based lag of the first negative weight

    @property
    def admissible(self):
        return self.first_negative is None


def _frac_coeffs(d, K):
    # pi_k = pi_{k-1} * (k - 1 - d) / k
    k = np.arange(1, K + 1, dtype=np.float64)
    out = np.empty(K + 1)
    out[0] = 1.0
    out[1:] = np.cumprod((k - 1.0 - d) / k)
    return out


def fracdiff_coeffs(d, K):
    """Coefficients of ``(1 - L)^d`` up to lag ``K`` by forward recursion.

    Parameters
    ----------
    d : float
        Memory parameter in (-1, 1].
    K : int
        Truncation lag.
    """
    d = float(d)
    if not -1.0 < d <= 1.0:
        raise InputError(f"d must lie in (-1, 1], got {d}")
    K = check_positive_int(K, "K")
    return FracDiffFilter(d, _frac_coeffs(d, K))


def fracdiff_filter(x, d, K=None):
    """Apply the truncated ``(1 - L)^d`` to ``x`` with zero pre-sample values."""
    x = check_series(x, "x")
    if K is None:
        K = max(x.size - 1, 1)
    pi = fracdiff_coeffs(d, K).coeffs
    return np.convolve(x, pi)[: x.size]


def figarch_lag_coeffs(d, phi1, b1, K):
    """Lag polynomial ``b(L) - phi(L)(1-L)^d`` of the FIGARCH(1,d,1) recursion.

    Returns coefficients for lags 1..K (the lag-0 term is identically zero).
    """
    pi = _frac_coeffs(d, K)
    c = pi.copy()
    c[1:] -= phi1 * pi[:-1]
    out = -c[1:]
    out[0] -= b1
    return out


def arch_infty_weights(d, phi1, b1, K=1000):
    """ARCH(inf) weights ``lambda_1..lambda_K`` of a FIGARCH(1,d,1).

    ``lambda(L) = 1 - phi(L)(1-L)^d / b(L)`` expanded by the recursion
    ``lambda_k = b1 * lambda_{k-1} + (pi'_k - phi1 * pi'_{k-1})``. Negative
    weights are reported through ``first_negative`` rather than raised.
    """
    d = float(d)
    if not 0.0 <= d < 1.0:
        raise InputError(f"d must lie in [0, 1), got {d}")
    K = check_positive_int(K, "K")
    lam = lfilter([1.0], [1.0, -float(b1)], figarch_lag_coeffs(d, phi1, b1, K))
    neg = np.flatnonzero(lam < 0)
    return ArchInftyWeights(d, float(phi1), float(b1), lam, int(neg[0]) + 1 if neg.size else None)
