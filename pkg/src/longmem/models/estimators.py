"""scikit-learn style wrappers around :func:`longmem.models.fit.fit`."""
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .._validation import check_series
from ..exceptions import InputError
from .base import Family, ModelSpec
from .fit import _loglik_terms, conditional_variance, fit


class _VolatilityModel(BaseEstimator):
    _family = None

    def _spec(self, exog=None):
        raise NotImplementedError

    def fit(self, X, y=None, exog=None):
        """Fit to a 1-d return series ``X``; ``exog`` is the aligned volume change."""
        self.fit_ = fit(X, self._spec(exog), nm_maxiter=self.nm_maxiter)
        self.params_ = self.fit_.params
        self.loglik_ = self.fit_.loglik
        self.aic_ = self.fit_.aic
        self.bic_ = self.fit_.bic
        self.conditional_volatility_ = self.fit_.conditional_volatility
        self.n_features_in_ = 1
        return self

    def _filter(self, X, exog=None):
        check_is_fitted(self, "fit_")
        r = check_series(getattr(X, "values", X), "X")
        resids = r - self.fit_.mean
        spec = self._spec(exog) if exog is not None else self.fit_.spec
        if spec.exog_volume is not None and spec.exog_volume.size != r.size:
            raise InputError("pass exog aligned with X; the fitted volume series does not match")
        sigma2, _ = conditional_variance(spec, self.params_, resids, float(np.mean(resids ** 2)))
        return resids, sigma2, spec

    def transform(self, X, exog=None):
        """Conditional variances of ``X`` under the fitted parameters."""
        return self._filter(X, exog)[1]

    def score(self, X, y=None, exog=None):
        """Average log-likelihood per observation of ``X``."""
        resids, sigma2, spec = self._filter(X, exog)
        return float(np.mean(_loglik_terms(spec, resids, sigma2, self.params_.nu)))


class GARCH(_VolatilityModel):
    """GARCH(1,1) with a constant mean."""

    def __init__(self, distribution="t", nm_maxiter=600):
        self.distribution = distribution
        self.nm_maxiter = nm_maxiter

    def _spec(self, exog=None):
        return ModelSpec(Family.GARCH, distribution=self.distribution)


class FIGARCH(_VolatilityModel):
    """FIGARCH(1,d,1) with a constant mean.

    Parameters
    ----------
    truncation_K : int
        Lag at which the fractional filter is cut.
    distribution : {"t", "normal"}
    nm_maxiter : int
    """

    def __init__(self, truncation_K=1000, distribution="t", nm_maxiter=600):
        self.truncation_K = truncation_K
        self.distribution = distribution
        self.nm_maxiter = nm_maxiter

    def _spec(self, exog=None):
        return ModelSpec(Family.FIGARCH, truncation_K=self.truncation_K,
                         distribution=self.distribution)


class FIEGARCH(_VolatilityModel):
    """FIEGARCH(1,d,1) with optional leverage and an exogenous volume term."""

    def __init__(self, leverage=True, truncation_K=1000, distribution="t", nm_maxiter=600):
        self.leverage = leverage
        self.truncation_K = truncation_K
        self.distribution = distribution
        self.nm_maxiter = nm_maxiter

    def _spec(self, exog=None):
        exog = None if exog is None else check_series(exog, "exog")
        return ModelSpec(Family.FIEGARCH, include_leverage=self.leverage, exog_volume=exog,
                         truncation_K=self.truncation_K, distribution=self.distribution)
