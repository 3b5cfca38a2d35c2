"""Simulated paths with known memory parameters and a Monte Carlo harness.

Random numbers come from numpy's Philox4x64 counter-based generator. Normal
variates use the inverse CDF of the uniform stream, Student-t variates the
Student-t inverse CDF rescaled to unit variance.
"""
import csv
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, Optional, Union

import numpy as np
from scipy.special import ndtri, stdtrit

from .exceptions import InputError, LongMemError
from .models.base import Distribution, Family, ModelSpec, ParamVector
from .models.filters import inadmissibility
from .models import recursions

logger = logging.getLogger(__name__)

__all__ = [
    "GENERATOR_NAME", "SimFamily", "SimConfig", "SimulatedPath", "make_rng", "uniforms",
    "standard_normal", "standardized_t", "simulate_arfima", "simulate_volmodel",
    "arfima_acf", "monte_carlo", "MonteCarloSummary", "ESTIMATORS", "replication_seed",
]

GENERATOR_NAME = "numpy.random.Philox (Philox4x64-10)"


class SimFamily(str, Enum):
    ARFIMA = "arfima"
    GARCH = "garch"
    FIGARCH = "figarch"
    FIEGARCH = "fiegarch"


def make_rng(seed):
    return np.random.Generator(np.random.Philox(int(seed) & (2 ** 64 - 1)))


def uniforms(rng, size):
    """Uniforms on the open interval (0, 1) from 53-bit integers."""
    return (rng.integers(0, 2 ** 53, size=size, dtype=np.int64) + 0.5) / 2.0 ** 53


def standard_normal(rng, size):
    return ndtri(uniforms(rng, size))


def standardized_t(rng, size, nu):
    """Student-t draws rescaled to unit variance."""
    return stdtrit(nu, uniforms(rng, size)) * math.sqrt((nu - 2.0) / nu)


def replication_seed(seed, rep):
    """Seed for replication ``rep``: ``seed XOR rep``."""
    return int(seed) ^ int(rep)


@dataclass(frozen=True)
class SimConfig:
    """Simulation design.

    ``true_params`` is a ParamVector for the volatility families and the
    memory parameter ``d`` for ARFIMA(0,d,0). ``burn_in=None`` uses twice the
    truncation lag.
    """

    family: SimFamily
    true_params: Union[ParamVector, float]
    n: int = 4096
    burn_in: Optional[int] = None
    seed: int = 20061101
    replications: int = 1
    truncation_K: int = 1000
    distribution: Distribution = Distribution.STUDENT_T
    include_leverage: bool = False
    volume_sd: float = 0.0
    split_seeds: bool = True

    def __post_init__(self):
        object.__setattr__(self, "family", SimFamily(self.family))
        object.__setattr__(self, "distribution", Distribution(self.distribution))
        if self.n < 256:
            raise InputError(f"simulated paths need n >= 256, got {self.n}")
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", 2 * int(self.truncation_K))
        if self.family is not SimFamily.ARFIMA and self.family is not SimFamily.GARCH \
                and self.burn_in < self.truncation_K:
            raise InputError("burn_in must cover the truncation lag")
        if self.replications < 1:
            raise InputError("replications must be positive")

    @property
    def model_spec(self):
        """ModelSpec matching this design (without the volume series itself)."""
        return ModelSpec(Family(self.family.value), include_leverage=self.include_leverage,
                         truncation_K=self.truncation_K, distribution=self.distribution)


@dataclass(frozen=True)
class SimulatedPath:
    values: np.ndarray
    truth: object
    seed: int
    sigma2: Optional[np.ndarray] = field(default=None, repr=False)
    volume: Optional[np.ndarray] = field(default=None, repr=False)


def simulate_arfima(d, n=4096, burn_in=2000, seed=0):
    """ARFIMA(0,d,0) path: Gaussian noise filtered through ``(1 - L)^(-d)``.

    The MA(inf) expansion is applied over the full noise stream (truncation
    ``n + burn_in``), then the first ``burn_in`` points are dropped.
    """
    d = float(d)
    if not abs(d) < 0.5:
        raise InputError(f"ARFIMA simulation requires |d| < 1/2, got {d}")
    total = int(n) + int(burn_in)
    noise = standard_normal(make_rng(seed), total)
    if d == 0.0:
        x = noise
    else:
        psi = recursions._frac_coeffs(-d, total - 1)
        x = np.convolve(noise, psi)[:total]
    return SimulatedPath(x[burn_in:].copy(), d, int(seed))


def arfima_acf(d, max_lag):
    """Theoretical ACF of ARFIMA(0,d,0): ``prod_{k<=j} (k - 1 + d) / (k - d)``."""
    k = np.arange(1, max_lag + 1, dtype=np.float64)
    return np.cumprod((k - 1.0 + d) / (k - d))


def _shocks(config, rng, size):
    if config.distribution is Distribution.GAUSSIAN:
        return standard_normal(rng, size)
    return standardized_t(rng, size, config.true_params.nu)


def simulate_volmodel(config, seed=None):
    """Generate returns ``r_t = sigma_t z_t`` from a GARCH-family truth.

    For FIEGARCH with ``volume_sd > 0`` an i.i.d. Gaussian volume-change series
    with that standard deviation is drawn first and enters the log variance
    with coefficient ``true_params.volume_coef``.
    """
    if config.family is SimFamily.ARFIMA:
        raise InputError("use simulate_arfima for ARFIMA designs")
    p = config.true_params
    if not isinstance(p, ParamVector):
        raise InputError("volatility designs need a ParamVector truth")
    reason = inadmissibility(config.family.value, p, config.truncation_K)
    if reason:
        raise InputError(f"inadmissible truth: {reason}")
    seed = config.seed if seed is None else seed
    rng = make_rng(seed)
    total = config.n + config.burn_in
    volume = None
    if config.family is SimFamily.FIEGARCH and config.volume_sd > 0:
        volume = config.volume_sd * standard_normal(rng, total)
    z = _shocks(config, rng, total)
    K = config.truncation_K
    if config.family is SimFamily.GARCH:
        sigma2, eps = recursions.garch_simulate(z, p.a, p.arch1, p.garch1)
    elif config.family is SimFamily.FIGARCH:
        sigma2, eps = recursions.figarch_simulate(z, p.a, p.d, p.arch1, p.garch1, K)
    else:
        nu = p.nu if config.distribution is Distribution.STUDENT_T else None
        sigma2, eps, _ = recursions.fiegarch_variance(
            z, p.a, p.arch1, p.leverage, p.garch1, p.d, K, nu, volume, p.volume_coef,
            simulate=True)
    b = config.burn_in
    return SimulatedPath(eps[b:].copy(), p, int(seed), sigma2[b:].copy(),
                         None if volume is None else volume[b:].copy())


def _draw(config, seed):
    if config.family is SimFamily.ARFIMA:
        return simulate_arfima(config.true_params, config.n, config.burn_in, seed)
    return simulate_volmodel(config, seed)


def _est_gph(path, config):
    from .memory import gph_estimate

    res = gph_estimate(path.values)
    sig = int(res.significance)
    return {"estimate": res.d_estimate, "statistic": res.t_statistic}, sig


def _est_rs(path, config, transform=None):
    from .memory import modified_rs

    x = path.values if transform is None else transform(path.values)
    res = modified_rs(x)
    return {"estimate": res.d_estimate, "statistic": res.q_stat}, int(res.significance)


def _est_rs_abs(path, config):
    return _est_rs(path, config, np.abs)


def _est_gph_abs(path, config):
    from .memory import gph_estimate

    res = gph_estimate(np.abs(path.values))
    return {"estimate": res.d_estimate, "statistic": res.t_statistic}, int(res.significance)


def _portmanteau_sig(res):
    return 2 if res.p_value < 0.01 else (1 if res.p_value < 0.05 else 0)


def _est_ljung_box(path, config):
    from .acf import ljung_box

    res = ljung_box(path.values ** 2, 12)
    return {"estimate": res.statistic, "statistic": res.statistic}, _portmanteau_sig(res)


def _est_engle_lm(path, config):
    from .models.diagnostics import engle_lm

    res = engle_lm(path.values, 12)
    return {"estimate": res.statistic, "statistic": res.statistic}, _portmanteau_sig(res)


def _model_estimator(field_name):
    def run(path, config):
        from .models.fit import fit

        spec = config.model_spec
        if path.volume is not None:
            spec = replace(spec, exog_volume=path.volume)
        res = fit(path.values, spec)
        value = getattr(res.params, field_name)
        se = res.std_errors.get(field_name, math.nan)
        out = {"estimate": value, "statistic": value / se if se > 0 else math.nan}
        out.update({f"param_{k}": getattr(res.params, k) for k in spec.param_names})
        sig = 0
        pv = res.p_values.get(field_name, math.nan)
        if pv < 0.01:
            sig = 2
        elif pv < 0.05:
            sig = 1
        return out, sig

    return run


ESTIMATORS: Dict[str, Callable] = {
    "gph": _est_gph,
    "gph_abs": _est_gph_abs,
    "rs": _est_rs,
    "rs_abs": _est_rs_abs,
    "ljung_box": _est_ljung_box,
    "engle_lm": _est_engle_lm,
    "model_d": _model_estimator("d"),
    "model_leverage": _model_estimator("leverage"),
    "model_volume": _model_estimator("volume_coef"),
    "model_arch1": _model_estimator("arch1"),
}


@dataclass
class MonteCarloSummary:
    estimator: str
    rows: list
    failures: int

    @property
    def estimates(self):
        return np.array([r["estimate"] for r in self.rows if not r["failed"]])

    @property
    def mean(self):
        est = self.estimates
        return float(est.mean()) if est.size else math.nan

    @property
    def std(self):
        est = self.estimates
        return float(est.std(ddof=1)) if est.size > 1 else math.nan

    def rejection_rate(self, level=0.05):
        col = "reject5" if level == 0.05 else "reject1"
        ok = [r[col] for r in self.rows if not r["failed"]]
        return float(np.mean(ok)) if ok else math.nan

    def to_csv(self, path):
        keys = ["rep", "seed"]
        for r in self.rows:
            for k in r:
                if k not in keys and k not in ("reject5", "reject1", "failed", "error"):
                    keys.append(k)
        keys += ["reject5", "reject1", "failed"]
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=keys, extrasaction="ignore", lineterminator="\n")
            w.writeheader()
            for r in self.rows:
                w.writerow({k: _fmt(r.get(k, "")) for k in keys})


def _fmt(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(float(v))
    return v


def monte_carlo(config, estimator):
    """Run ``config.replications`` draws through a named estimator.

    Replication ``r`` uses ``seed XOR r`` unless ``config.split_seeds`` is
    false, in which case every replication reuses ``config.seed``. Estimator
    failures are recorded per row and counted, never raised.
    """
    if config.replications < 2:
        raise InputError("monte_carlo needs at least 2 replications")
    run = ESTIMATORS[estimator] if isinstance(estimator, str) else estimator
    name = estimator if isinstance(estimator, str) else getattr(estimator, "__name__", "custom")
    rows = []
    failures = 0
    for rep in range(config.replications):
        seed = replication_seed(config.seed, rep) if config.split_seeds else config.seed
        row = {"rep": rep, "seed": seed}
        try:
            values, sig = run(_draw(config, seed), config)
            row.update(values)
            row.update(reject5=sig >= 1, reject1=sig >= 2, failed=False)
        except (LongMemError, ArithmeticError, np.linalg.LinAlgError) as exc:
            failures += 1
            logger.warning("replication %d failed: %s", rep, exc)
            row.update(estimate=math.nan, reject5=False, reject1=False, failed=True,
                       error=str(exc))
        rows.append(row)
    return MonteCarloSummary(name, rows, failures)
