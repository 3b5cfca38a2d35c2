"""Public conditional-variance filters and admissibility checks."""
import warnings
from dataclasses import replace

import numpy as np

from .._validation import check_series
from ..exceptions import FitQualityWarning, InputError
from ..fracdiff import arch_infty_weights
from .base import Family
from . import recursions

__all__ = ["garch_filter", "figarch_filter", "fiegarch_filter", "inadmissibility",
           "garch_params_to_figarch"]


def _resids(r):
    return check_series(getattr(r, "values", r), "residuals", min_length=2)


def _backcast(e, backcast):
    return float(np.mean(e ** 2)) if backcast is None else float(backcast)


def inadmissibility(family, params, K=1000, strict=True):
    """Reason a parameter point is inadmissible, or ``None`` if it is fine.

    ``strict`` adds the box constraints used during optimization; with
    ``strict=False`` only the conditions needed for a valid likelihood
    remain (used for numerical Hessians at the boundary).
    """
    family = Family(family)
    if not params.nu > 2:
        return "nu must exceed 2"
    if family is Family.GARCH:
        if not params.a > 0:
            return "a must be positive"
        if strict and (params.arch1 < 0 or params.garch1 < 0):
            return "arch1 and garch1 must be nonnegative"
        if not abs(params.garch1) < 1 or not params.arch1 + params.garch1 < 1:
            return "arch1 + garch1 must be below 1"
        return None
    if family is Family.FIGARCH:
        if not params.a > 0:
            return "a must be positive"
        if not 0 <= params.d < 1:
            return "d must lie in [0, 1)"
        if not abs(params.garch1) < 1:
            return "garch1 must lie in (-1, 1)"
        if strict and (params.arch1 < 0 or params.garch1 < 0):
            return "arch1 and garch1 must be nonnegative"
        w = arch_infty_weights(params.d, params.arch1, params.garch1, K)
        if not w.admissible:
            return f"negative ARCH(inf) weight at lag {w.first_negative}"
        return None
    if not abs(params.garch1) < 1:
        return "garch1 root must lie inside the unit interval"
    if not (0 <= params.d < 1 if strict else -1 < params.d < 1):
        return "d must lie in [0, 1)"
    return None


def _require(family, params, K):
    reason = inadmissibility(family, params, K, strict=False)
    if reason:
        raise InputError(f"inadmissible {Family(family).value} parameters: {reason}")


def garch_filter(resids, params, backcast=None):
    """GARCH(1,1) conditional variances of demeaned residuals.

    Pre-sample variance and squared residual are both set to ``backcast``
    (default: mean squared residual).
    """
    e = _resids(resids)
    _require(Family.GARCH, params, 1)
    return recursions.garch_variance(e, params.a, params.arch1, params.garch1,
                                     _backcast(e, backcast))


def figarch_filter(resids, params, K=1000, backcast=None):
    """FIGARCH(1,d,1) conditional variances; the fractional filter is cut at lag K."""
    e = _resids(resids)
    _require(Family.FIGARCH, params, K)
    return recursions.figarch_variance(e, params.a, params.d, params.arch1, params.garch1,
                                       int(K), _backcast(e, backcast))


def fiegarch_filter(resids, params, K=1000, volume=None):
    """FIEGARCH(1,d,1) conditional variances.

    ``params.nu`` sets E|z| in the news-impact function (infinite means
    Gaussian). ``volume`` is the aligned exogenous regressor.
    """
    e = _resids(resids)
    _require(Family.FIEGARCH, params, K)
    if volume is not None and np.asarray(volume).size != e.size:
        raise InputError("volume regressor length differs from residuals")
    sigma2, _, clamped = recursions.fiegarch_variance(
        e, params.a, params.arch1, params.leverage, params.garch1, params.d, int(K),
        params.nu, volume, params.volume_coef)
    if clamped:
        warnings.warn(f"log variance clamped at +-{recursions.LOG_VARIANCE_BOUND:g} "
                      f"on {clamped} observations", FitQualityWarning)
    return sigma2


def garch_params_to_figarch(params):
    """FIGARCH(1,0,1) point reproducing a GARCH(1,1): phi1 = alpha + beta, b1 = beta."""
    return replace(params, arch1=params.arch1 + params.garch1, d=0.0)
