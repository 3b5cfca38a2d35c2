import importlib
import math
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate, stats
from sklearn.base import clone

from longmem.cli.ingest import ColumnMapping, ingest_csv
from longmem.exceptions import ConvergenceError, FitQualityWarning, InputError
from longmem.models import (
    FIEGARCH, GARCH, Family, ModelSpec, ParamVector, engle_lm,
    fiegarch_filter, figarch_filter, fit, garch_filter, garch_params_to_figarch,
    gaussian_loglik, info_criteria, inadmissibility, student_t_loglik,
)
from longmem.models.fit import loglikelihood
from longmem.models.recursions import expected_abs
from longmem.series import log_returns
from longmem.sim import SimConfig, simulate_volmodel
from tests.helpers import gaussian

fit_module = importlib.import_module("longmem.models.fit")

FIGARCH_TRUTH = ParamVector(a=0.05, arch1=0.2, garch1=0.45, d=0.35, nu=8.0)
GARCH_TRUTH = ParamVector(a=0.05, arch1=0.1, garch1=0.85, nu=8.0)


@pytest.fixture(scope="module")
def fixture_returns(fixture_csv):
    return log_returns(ingest_csv(fixture_csv)).values


def figarch_path(seed, n=4000):
    return simulate_volmodel(SimConfig("figarch", FIGARCH_TRUTH, n=n), seed=seed).values


# filters

def test_garch_filter_constant_without_dynamics(rng):
    e = rng.standard_normal(100)
    s2 = garch_filter(e, ParamVector(a=0.7))
    assert_allclose(s2, 0.7, rtol=0, atol=1e-15)


def test_garch_filter_fixed_point():
    s2 = garch_filter(np.ones(500), ParamVector(a=0.05, arch1=0.1, garch1=0.85), backcast=1.0)
    assert_allclose(s2, 1.0, rtol=1e-12)


def test_garch_filter_recursion_and_positivity(rng):
    e = 3 * rng.standard_t(4, 300)
    p = ParamVector(a=0.02, arch1=0.12, garch1=0.8)
    s2 = garch_filter(e, p)
    bc = np.mean(e ** 2)
    prev_e2, prev_s2 = bc, bc
    for t in range(300):
        expected = 0.02 + 0.12 * prev_e2 + 0.8 * prev_s2
        assert s2[t] == pytest.approx(expected, rel=1e-12)
        prev_e2, prev_s2 = e[t] ** 2, s2[t]
    assert np.all(s2 >= 0.02)


def test_garch_filter_rejects_inadmissible(rng):
    with pytest.raises(InputError):
        garch_filter(rng.standard_normal(50), ParamVector(a=0.1, arch1=0.5, garch1=0.6))
    with pytest.raises(InputError):
        garch_filter(rng.standard_normal(50), ParamVector(a=-0.1, arch1=0.1, garch1=0.6))


def test_figarch_filter_constant_variance(rng):
    s2 = figarch_filter(rng.standard_normal(200), ParamVector(a=1.3), K=50)
    assert_allclose(s2, 1.3, atol=1e-15)


def test_figarch_nests_garch(rng):
    e = gaussian(3, 3000) * 1.4
    p = GARCH_TRUTH
    g = garch_filter(e, p)
    f = figarch_filter(e, garch_params_to_figarch(p), K=1000)
    assert np.max(np.abs(g[1000:] - f[1000:])) <= 1e-8


def test_figarch_impulse_response_is_arch_infinity_weights():
    from longmem.fracdiff import arch_infty_weights

    K, n = 300, 400
    p = FIGARCH_TRUTH
    e = np.zeros(n)
    e[0] = 1.0
    s2 = figarch_filter(e, p, K=K, backcast=0.0)
    t = np.arange(n)
    base = p.a * (1 - p.garch1 ** (t + 1)) / (1 - p.garch1)
    lam = arch_infty_weights(p.d, p.arch1, p.garch1, K).lam
    assert_allclose((s2 - base)[1 : K + 1], lam, rtol=1e-10, atol=1e-15)


def test_figarch_filter_rejects_negative_weights(rng):
    with pytest.raises(InputError):
        figarch_filter(rng.standard_normal(50), ParamVector(a=0.1, arch1=0.0, garch1=0.6, d=0.1))


def test_fiegarch_constant_without_news():
    e = gaussian(2, 400)
    p = ParamVector(a=0.3, arch1=0.0, garch1=0.4, d=0.3, nu=8.0)
    assert_allclose(fiegarch_filter(e, p, K=100), math.exp(0.3 / 0.6), rtol=1e-12)


@pytest.mark.parametrize("s", [0.5, 1.0, 2.5])
def test_fiegarch_leverage_asymmetry(s):
    gamma = -0.06
    p = ParamVector(a=0.1, arch1=0.2, garch1=0.5, d=0.4, leverage=gamma, nu=8.0)
    base = gaussian(6, 60)
    sigma_t = math.sqrt(fiegarch_filter(base, p, K=100)[40])
    down, up = base[:42].copy(), base[:42].copy()
    down[40] = -s * sigma_t
    up[40] = s * sigma_t
    diff = math.log(fiegarch_filter(down, p, K=100)[41]) - math.log(fiegarch_filter(up, p, K=100)[41])
    assert diff == pytest.approx(-2 * gamma * s, rel=1e-10)
    assert diff > 0


def test_fiegarch_volume_enters_contemporaneously():
    e = gaussian(7, 200)
    v = gaussian(8, 200)
    p = ParamVector(a=0.1, arch1=0.1, garch1=0.3, d=0.2, volume_coef=0.02, nu=8.0)
    # shift the residuals so the path depends on volume only through the level
    flat = replace(p, arch1=0.0)
    s2 = fiegarch_filter(e, flat, K=50, volume=v)
    assert_allclose(np.log(s2), 0.1 / 0.7 + 0.02 * v, rtol=1e-12)
    with pytest.raises(InputError):
        fiegarch_filter(e, p, K=50, volume=v[:-1])


def test_fiegarch_clamp_warns():
    p = ParamVector(a=60.0, garch1=0.0, nu=8.0)
    with pytest.warns(FitQualityWarning):
        s2 = fiegarch_filter(gaussian(1, 20), p, K=10)
    assert_allclose(s2, math.exp(50.0))


def test_expected_abs():
    assert expected_abs(None) == pytest.approx(math.sqrt(2 / math.pi))
    nu = 6.0
    scale = math.sqrt((nu - 2) / nu)
    value, _ = integrate.quad(lambda x: abs(x) * stats.t.pdf(x / scale, nu) / scale, -np.inf, np.inf)
    assert expected_abs(nu) == pytest.approx(value, rel=1e-9)


# likelihood

def test_student_t_loglik_matches_density(rng):
    e = rng.standard_normal(50)
    s2 = rng.uniform(0.5, 2.0, 50)
    nu = 7.0
    scale = np.sqrt(s2 * (nu - 2) / nu)
    assert student_t_loglik(e, s2, nu) == pytest.approx(
        np.sum(stats.t.logpdf(e / scale, nu) - np.log(scale)), rel=1e-12)


def test_student_t_density_integrates_to_one():
    dens = lambda x: math.exp(student_t_loglik(np.array([x]), np.array([1.0]), 5.0))
    total, _ = integrate.quad(dens, -np.inf, np.inf)
    assert total == pytest.approx(1.0, abs=1e-9)
    var, _ = integrate.quad(lambda x: x * x * dens(x), -np.inf, np.inf)
    assert var == pytest.approx(1.0, abs=1e-7)
    scale = math.sqrt(3.0 / 5.0)
    assert dens(0.0) == pytest.approx(stats.t.pdf(0.0, 5.0) / scale, rel=1e-12)


def test_student_t_gaussian_limit():
    e = gaussian(9, 1000)
    s2 = np.full(1000, 1.5)
    assert abs(student_t_loglik(e, s2, 1e6) - gaussian_loglik(e, s2)) <= 1e-3


@pytest.mark.parametrize("c", [0.1, 3.0, 250.0])
def test_loglik_scaling_identity(c, rng):
    e = rng.standard_normal(200)
    s2 = rng.uniform(0.5, 2.0, 200)
    lhs = student_t_loglik(c * e, c * c * s2, 6.0)
    assert lhs == pytest.approx(student_t_loglik(e, s2, 6.0) - 200 * math.log(c), rel=1e-12)


def test_loglik_errors():
    with pytest.raises(InputError):
        student_t_loglik(np.ones(3), np.ones(3), 2.0)
    with pytest.raises(InputError):
        student_t_loglik(np.ones(3), np.array([1.0, 0.0, 1.0]), 5.0)


def test_loglikelihood_inadmissible_is_minus_inf(rng):
    spec = ModelSpec(Family.FIGARCH, truncation_K=100)
    bad = ParamVector(a=0.1, arch1=0.0, garch1=0.6, d=0.1, nu=8.0)
    assert loglikelihood(spec, bad, rng.standard_normal(600)) == -math.inf


def test_nesting_on_fixture(fixture_returns):
    e = fixture_returns - fixture_returns.mean()
    p = ParamVector(a=0.03, arch1=0.08, garch1=0.9, nu=7.0)
    lg = loglikelihood(ModelSpec(Family.GARCH), p, e)
    lf = loglikelihood(ModelSpec(Family.FIGARCH), garch_params_to_figarch(p), e)
    assert abs(lg - lf) / e.size <= 1e-6


# ModelSpec validation

def test_spec_validation():
    with pytest.raises(InputError):
        ModelSpec(Family.GARCH, include_leverage=True)
    with pytest.raises(InputError):
        ModelSpec(Family.FIGARCH, exog_volume=np.ones(10))
    with pytest.raises(InputError):
        ModelSpec(Family.FIEGARCH, exog_volume=np.array([1.0, np.nan]))
    spec = ModelSpec("fiegarch", include_leverage=True, exog_volume=np.ones(5))
    assert spec.param_names == ["a", "arch1", "garch1", "d", "leverage", "volume_coef", "nu"]
    assert ModelSpec("garch", distribution="normal").param_names == ["a", "arch1", "garch1"]
    assert spec.label == "FIEGARCH+volume"


def test_admissibility_rules():
    assert inadmissibility("garch", ParamVector(a=0.1, arch1=0.1, garch1=0.8, nu=5)) is None
    assert inadmissibility("garch", ParamVector(a=0.1, arch1=0.1, garch1=0.8, nu=2)) is not None
    assert inadmissibility("fiegarch", ParamVector(a=-3, garch1=1.0, nu=5)) is not None
    assert inadmissibility("fiegarch", ParamVector(a=-3, garch1=-0.9, nu=5)) is None


def test_param_vector_round_trip():
    p = ParamVector(a=0.1, arch1=0.2, garch1=0.3, d=0.4, leverage=-0.05, nu=9.0)
    names = ["a", "arch1", "garch1", "d", "leverage", "nu"]
    assert ParamVector.from_array(p.to_array(names), names) == p


# diagnostics

def test_engle_lm_matches_regression(rng):
    z = rng.standard_normal(400)
    res = engle_lm(z, 3)
    y = z ** 2
    X = np.column_stack([np.ones(397), y[2:-1], y[1:-2], y[:-3]])
    beta, *_ = np.linalg.lstsq(X, y[3:], rcond=None)
    fitted = X @ beta
    r2 = np.sum((fitted - y[3:].mean()) ** 2) / np.sum((y[3:] - y[3:].mean()) ** 2)
    assert res.statistic == pytest.approx(397 * r2, rel=1e-10)
    assert res.p_value == pytest.approx(stats.chi2.sf(397 * r2, 3), rel=1e-9)


def test_engle_lm_errors():
    with pytest.raises(InputError):
        engle_lm(np.arange(10.0), 12)
    with pytest.raises(Exception):
        engle_lm(np.ones(100), 2)


def test_engle_lm_power():
    cfg = SimConfig("garch", ParamVector(a=1.0, arch1=0.3, garch1=0.0), n=4000, burn_in=500,
                    distribution="normal")
    hits = sum(engle_lm(simulate_volmodel(cfg, seed=s).values, 12).p_value < 0.05
               for s in range(100))
    assert hits / 100 > 0.95


def test_info_criteria():
    aic, bic = info_criteria(0.0, 1, math.e ** 2)
    assert aic == pytest.approx(2.0) and bic == pytest.approx(2.0)
    assert info_criteria(-10.0, 0, 50) == (20.0, 20.0)
    b1 = info_criteria(-1000.0, 4, 4175)[1]
    b2 = info_criteria(-1000.0, 5, 4175)[1]
    assert b2 - b1 == pytest.approx(8.337, abs=5e-4)


# fitting

def test_fit_requires_500_observations():
    with pytest.raises(InputError):
        fit(gaussian(1, 499), ModelSpec(Family.GARCH))


def test_fit_rejects_misaligned_volume():
    with pytest.raises(InputError):
        fit(gaussian(1, 600), ModelSpec(Family.FIEGARCH, exog_volume=np.ones(599)))


@pytest.fixture(scope="module")
def garch_fits():
    cfg = SimConfig("garch", GARCH_TRUTH, n=4000, burn_in=1000)
    return [fit(simulate_volmodel(cfg, seed=s).values, ModelSpec(Family.GARCH))
            for s in range(20)]


def test_garch_recovery(garch_fits):
    ok = sum(abs(f.params.arch1 - 0.1) <= 0.05 and abs(f.params.garch1 - 0.85) <= 0.05
             for f in garch_fits)
    assert ok >= 18


def test_fit_invariants(garch_fits):
    for f in garch_fits:
        assert np.all(f.sigma2_path > 0)
        assert 0.8 <= np.var(f.std_residuals) <= 1.2
        assert f.grad_norm < fit_module.GRAD_TOL and f.converged
        assert f.aic == pytest.approx(-2 * f.loglik + 2 * 4)
        assert f.bic == pytest.approx(-2 * f.loglik + 4 * math.log(4000))
        assert set(f.std_errors) == {"a", "arch1", "garch1", "nu"}
        assert all(se > 0 for se in f.std_errors.values())
        assert len(f.coefficient_table()) == 4


def test_non_convergence_carries_incumbent(monkeypatch):
    monkeypatch.setattr(fit_module, "GRAD_TOL", 0.0)
    cfg = SimConfig("garch", GARCH_TRUTH, n=1000, burn_in=500)
    with pytest.raises(ConvergenceError) as info:
        fit(simulate_volmodel(cfg, seed=3).values, ModelSpec(Family.GARCH))
    inc = info.value.incumbent
    assert inc is not None and not inc.converged


@pytest.fixture(scope="module")
def fixture_fits(fixture_returns):
    g = fit(fixture_returns, ModelSpec(Family.GARCH))
    f = fit(fixture_returns, ModelSpec(Family.FIGARCH))
    return g, f


def test_figarch_likelihood_dominates_garch(fixture_fits):
    g, f = fixture_fits
    assert f.loglik >= g.loglik - 1e-6 * f.n
    assert f.grad_norm < fit_module.GRAD_TOL


@pytest.mark.slow
def test_truncation_sensitivity(fixture_returns, fixture_fits):
    d1000 = fixture_fits[1].params.d
    d2000 = fit(fixture_returns, ModelSpec(Family.FIGARCH, truncation_K=2000)).params.d
    assert abs(d1000 - d2000) < 0.01


@pytest.mark.slow
def test_standard_errors_shrink_with_n():
    se = {}
    for n in (2000, 4000):
        se[n] = np.mean([fit(figarch_path(100 + s, n), ModelSpec(Family.FIGARCH)).std_errors["d"]
                         for s in range(8)])
    assert 1.2 <= se[2000] / se[4000] <= 1.7


# estimator wrappers

def test_estimators_sklearn_api(fixture_returns):
    m = GARCH()
    assert m.get_params() == {"distribution": "t", "nm_maxiter": 600}
    assert clone(FIEGARCH(leverage=False)).get_params()["leverage"] is False
    m.fit(fixture_returns)
    assert m.transform(fixture_returns) == pytest.approx(m.fit_.sigma2_path)
    assert m.score(fixture_returns) == pytest.approx(m.loglik_ / fixture_returns.size)
    assert m.conditional_volatility_.size == fixture_returns.size


def test_fiegarch_estimator_exog_alignment(fixture_csv, fixture_returns):
    from longmem.series import volume_change

    v = volume_change(ingest_csv(fixture_csv, ColumnMapping(volume="volume")))
    m = FIEGARCH().fit(fixture_returns, exog=v)
    assert "volume_coef" in m.fit_.spec.param_names
    assert m.conditional_volatility_.size == fixture_returns.size
    with pytest.raises(InputError):
        m.transform(fixture_returns[:-10])
