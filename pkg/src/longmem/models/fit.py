"""Maximum-likelihood fitting of GARCH / FIGARCH / FIEGARCH variance models."""
import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm

from .._validation import check_series
from ..acf import ljung_box
from ..exceptions import ConvergenceError, FitQualityWarning, InputError
from .base import Distribution, Family, ModelFit, ModelSpec, ParamVector
from .diagnostics import engle_lm, info_criteria
from .filters import inadmissibility
from .likelihood import gaussian_loglik, student_t_loglik
from . import recursions

logger = logging.getLogger(__name__)

__all__ = ["fit", "loglikelihood", "conditional_variance", "starting_points",
           "MIN_OBSERVATIONS"]

MIN_OBSERVATIONS = 500
NU_BOUNDS = (2.05, 300.0)
GRAD_TOL = 1e-4
_PENALTY = 1e6


def _sigmoid(u):
    return 0.5 * (1.0 + math.tanh(0.5 * u))


def _logit(p):
    p = min(max(p, 1e-10), 1.0 - 1e-10)
    return math.log(p / (1.0 - p))


def _to_nu(u):
    lo, hi = NU_BOUNDS
    return lo + (hi - lo) * _sigmoid(u)


def _from_nu(nu):
    lo, hi = NU_BOUNDS
    return _logit((nu - lo) / (hi - lo))


@dataclass
class _Codec:
    """Maps natural parameters to an unconstrained vector and back."""

    spec: ModelSpec

    def decode(self, u):
        fam = self.spec.family
        kw = {}
        if fam is Family.GARCH:
            persist, share = _sigmoid(u[1]), _sigmoid(u[2])
            kw.update(a=math.exp(u[0]), arch1=persist * share, garch1=persist * (1 - share))
            rest = u[3:]
        elif fam is Family.FIGARCH:
            kw.update(a=math.exp(u[0]), arch1=_sigmoid(u[1]), garch1=_sigmoid(u[2]),
                      d=_sigmoid(u[3]))
            rest = u[4:]
        else:
            kw.update(a=u[0], arch1=u[1], garch1=math.tanh(u[2]), d=_sigmoid(u[3]))
            rest = list(u[4:])
            if self.spec.include_leverage:
                kw["leverage"] = rest.pop(0)
            if self.spec.exog_volume is not None:
                kw["volume_coef"] = rest.pop(0)
        if self.spec.distribution is Distribution.STUDENT_T:
            kw["nu"] = _to_nu(rest[0])
        return ParamVector(**{k: float(v) for k, v in kw.items()})

    def encode(self, p):
        fam = self.spec.family
        if fam is Family.GARCH:
            persist = p.arch1 + p.garch1
            u = [math.log(p.a), _logit(persist), _logit(p.arch1 / persist)]
        elif fam is Family.FIGARCH:
            u = [math.log(p.a), _logit(p.arch1), _logit(p.garch1), _logit(p.d)]
        else:
            u = [p.a, p.arch1, math.atanh(p.garch1), _logit(p.d)]
            if self.spec.include_leverage:
                u.append(p.leverage)
            if self.spec.exog_volume is not None:
                u.append(p.volume_coef)
        if self.spec.distribution is Distribution.STUDENT_T:
            u.append(_from_nu(p.nu))
        return np.array(u, dtype=np.float64)


def conditional_variance(spec, params, resids, backcast):
    """Conditional variances and clamp count for ``params`` under ``spec``."""
    K = int(spec.truncation_K)
    if spec.family is Family.GARCH:
        return recursions.garch_variance(resids, params.a, params.arch1, params.garch1,
                                         backcast), 0
    if spec.family is Family.FIGARCH:
        return recursions.figarch_variance(resids, params.a, params.d, params.arch1,
                                           params.garch1, K, backcast), 0
    nu = params.nu if spec.distribution is Distribution.STUDENT_T else None
    sigma2, _, clamped = recursions.fiegarch_variance(
        resids, params.a, params.arch1, params.leverage, params.garch1, params.d, K, nu,
        spec.exog_volume, params.volume_coef)
    return sigma2, clamped


def _loglik_terms(spec, resids, sigma2, nu):
    if spec.distribution is Distribution.STUDENT_T:
        return student_t_loglik(resids, sigma2, nu, per_obs=True)
    return gaussian_loglik(resids, sigma2, per_obs=True)


def loglikelihood(spec, params, resids, backcast=None, strict=True, discard=0):
    """Total log-likelihood, or ``-inf`` when the point is inadmissible."""
    if backcast is None:
        backcast = float(np.mean(resids ** 2))
    if inadmissibility(spec.family, params, spec.truncation_K, strict=strict):
        return -math.inf
    sigma2, _ = conditional_variance(spec, params, resids, backcast)
    if not np.all(np.isfinite(sigma2)) or np.any(sigma2 <= 0):
        return -math.inf
    ll = _loglik_terms(spec, resids, sigma2, params.nu)[discard:].sum()
    return float(ll) if math.isfinite(ll) else -math.inf


def starting_points(spec, resids):
    """Five deterministic starting points in natural parameters."""
    var = float(np.mean(resids ** 2))
    nu = 8.0 if spec.distribution is Distribution.STUDENT_T else math.inf
    fam = spec.family
    out = []
    if fam is Family.GARCH:
        for alpha, beta in [(0.1, 0.85), (0.05, 0.9), (0.15, 0.75), (0.03, 0.95), (0.2, 0.6)]:
            out.append(ParamVector(a=var * (1 - alpha - beta), arch1=alpha, garch1=beta, nu=nu))
    elif fam is Family.FIGARCH:
        from ..fracdiff import figarch_lag_coeffs

        for d, phi1, b1 in [(0.35, 0.2, 0.45), (0.5, 0.1, 0.5), (0.25, 0.3, 0.3),
                            (0.4, 0.05, 0.2), (0.6, 0.2, 0.6)]:
            level = 1.0 - b1 - figarch_lag_coeffs(d, phi1, b1, spec.truncation_K).sum()
            out.append(ParamVector(a=var * level, arch1=phi1, garch1=b1, d=d, nu=nu))
    else:
        lev = spec.include_leverage
        for mag, phi1, gam, d in [(0.2, 0.3, -0.05, 0.4), (0.3, 0.1, 0.0, 0.5),
                                  (0.1, 0.5, -0.1, 0.3), (0.25, 0.6, -0.02, 0.2),
                                  (0.15, 0.2, 0.05, 0.6)]:
            out.append(ParamVector(a=math.log(var) * (1 - phi1), arch1=mag, garch1=phi1, d=d,
                                   leverage=gam if lev else 0.0, nu=nu))
    return out


def _central_gradient(f, u, step=1e-5):
    g = np.empty_like(u)
    for i in range(u.size):
        e = np.zeros_like(u)
        e[i] = step
        g[i] = (f(u + e) - f(u - e)) / (2 * step)
    return g


def _hessian(f, theta, rel_step=1e-4):
    """Central-difference Hessian of ``f`` with relative steps, symmetrized."""
    k = theta.size
    h = rel_step * np.maximum(np.abs(theta), 1e-2)
    f0 = f(theta)
    H = np.empty((k, k))
    for i in range(k):
        ei = np.zeros(k)
        ei[i] = h[i]
        H[i, i] = (f(theta + ei) - 2 * f0 + f(theta - ei)) / h[i] ** 2
        for j in range(i):
            ej = np.zeros(k)
            ej[j] = h[j]
            H[i, j] = H[j, i] = (f(theta + ei + ej) - f(theta + ei - ej)
                                 - f(theta - ei + ej) + f(theta - ei - ej)) / (4 * h[i] * h[j])
    return 0.5 * (H + H.T)


def _standard_errors(spec, params, resids, backcast, discard):
    names = spec.param_names
    theta = params.to_array(names)
    fixed = params.as_dict()

    def ll(vec):
        return loglikelihood(spec, ParamVector.from_array(vec, names, **fixed), resids,
                             backcast, strict=False, discard=discard)

    H = _hessian(ll, theta)
    nan = {k: math.nan for k in names}
    if not np.all(np.isfinite(H)):
        return nan, nan, False
    try:
        info = -H
        np.linalg.cholesky(info)
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError:
        return nan, nan, False
    se = np.sqrt(np.diag(cov))
    if not np.all(np.isfinite(se)) or np.any(se <= 0):
        return nan, nan, False
    pv = 2.0 * norm.sf(np.abs(theta / se))
    return dict(zip(names, se.tolist())), dict(zip(names, pv.tolist())), True


def fit(r, spec=None, starts=None, nm_maxiter=600, discard=0):
    """Fit a conditional-volatility model by maximum likelihood.

    The mean equation is a constant (the sample mean). Each starting point
    is refined by Nelder-Mead then BFGS on an unconstrained reparameterization;
    the highest likelihood wins.

    Parameters
    ----------
    r : array-like or ReturnSeries
        Percent returns, at least 500 observations.
    spec : ModelSpec
    starts : list of ParamVector, optional
        Override the five default starting points.
    nm_maxiter : int
        Nelder-Mead iteration cap per start.
    discard : int
        Number of leading likelihood terms to drop.

    Raises
    ------
    ConvergenceError
        If no start reaches a scaled gradient norm below ``GRAD_TOL``;
        ``incumbent`` carries the best fit found.
    """
    spec = ModelSpec() if spec is None else spec
    r = check_series(getattr(r, "values", r), "returns", min_length=MIN_OBSERVATIONS,
                     allow_constant=False)
    n = r.size
    if spec.exog_volume is not None and spec.exog_volume.size != n:
        raise InputError(f"volume regressor has {spec.exog_volume.size} rows, returns {n}")
    mean = float(r.mean())
    resids = r - mean
    backcast = float(np.mean(resids ** 2))
    codec = _Codec(spec)
    n_eff = n - discard

    def objective(u):
        try:
            params = codec.decode(u)
        except (OverflowError, ValueError):
            return _PENALTY
        ll = loglikelihood(spec, params, resids, backcast, discard=discard)
        return -ll / n_eff if math.isfinite(ll) else _PENALTY

    candidates = []
    for idx, start in enumerate(starts or starting_points(spec, resids)):
        if inadmissibility(spec.family, start, spec.truncation_K):
            logger.debug("skipping inadmissible start %d", idx)
            continue
        u0 = codec.encode(start)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            nm = minimize(objective, u0, method="Nelder-Mead",
                          options={"maxiter": nm_maxiter, "xatol": 1e-5, "fatol": 1e-9})
            qn = minimize(objective, nm.x, method="BFGS", options={"gtol": 1e-6, "maxiter": 300})
        u = qn.x if qn.fun <= nm.fun else nm.x
        fval = min(qn.fun, nm.fun)
        if fval >= _PENALTY:
            continue
        gnorm = float(np.linalg.norm(_central_gradient(objective, u)))
        candidates.append((fval, idx, u, gnorm))
    if not candidates:
        raise ConvergenceError("no admissible starting point produced a finite likelihood")

    def rank(c):
        fval, idx, u, _ = c
        p = codec.decode(u)
        _, bic = info_criteria(-fval * n_eff, len(spec.param_names), n_eff)
        return (fval, bic, tuple(p.to_array(spec.param_names)))

    candidates.sort(key=rank)
    fval, idx, u, gnorm = candidates[0]
    params = codec.decode(u)
    result = _assemble(spec, params, resids, backcast, mean, n, discard, gnorm, idx)
    if gnorm >= GRAD_TOL:
        raise ConvergenceError(f"{spec.label}: best start has gradient norm {gnorm:.2e}",
                               incumbent=result)
    return result


def _assemble(spec, params, resids, backcast, mean, n, discard, gnorm, idx):
    sigma2, clamped = conditional_variance(spec, params, resids, backcast)
    if clamped:
        warnings.warn(f"{spec.label}: log variance clamped on {clamped} observations",
                      FitQualityWarning)
    ll = float(_loglik_terms(spec, resids, sigma2, params.nu)[discard:].sum())
    se, pv, ok = _standard_errors(spec, params, resids, backcast, discard)
    if not ok:
        warnings.warn(f"{spec.label}: Hessian not positive definite; standard errors "
                      "unavailable", FitQualityWarning)
    aic, bic = info_criteria(ll, len(spec.param_names), n - discard)
    z = resids / np.sqrt(sigma2)
    return ModelFit(
        spec=spec, params=params, std_errors=se, p_values=pv, loglik=ll, aic=aic, bic=bic,
        sigma2_path=sigma2, std_residuals=z, lm12=engle_lm(z, 12), q2_12=ljung_box(z ** 2, 12),
        mean=mean, n=n, converged=gnorm < GRAD_TOL, grad_norm=gnorm, hessian_ok=ok,
        n_clamped=int(clamped), start_index=idx,
    )
