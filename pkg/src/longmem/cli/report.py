"""Plain-text report laid out like the summary, memory-test and model tables."""
import math

from ..memory import Significance


def stat4(x):
    return "nan" if math.isnan(x) else f"{x:.4g}"


def coef5(x):
    return "nan" if math.isnan(x) else f"{x:.5f}"


def pval(p):
    if math.isnan(p):
        return "n/a"
    return f"{p:.2E}" if p < 1e-4 else f"{p:.4f}"


def _stars(level):
    return Significance(level).stars


def render_report(bundle):
    cfg = bundle.config
    out = [f"Input: {cfg.input_path}", f"Returns: {bundle.n_returns} observations",
           f"GPH bandwidth m = {bundle.gph_bandwidth}",
           f"Newey-West lags q = {bundle.nw_lags}", ""]

    out.append("Summary statistics (mean and std dev in percent)")
    out.append(f"{'':<10}{'Mean':>12}{'Std Dev':>12}{'Skewness':>12}{'Kurtosis':>12}"
               f"{'Normality':>14}")
    for row in bundle.summary:
        out.append(f"{row['series']:<10}{stat4(row['mean']):>12}{stat4(row['std_dev']):>12}"
                   f"{stat4(row['skewness']):>12}{stat4(row['kurtosis']):>12}"
                   f"{stat4(row['jarque_bera']):>14}")
    out.append("")

    out.append("Long-memory diagnostics (* 5%, ** 1%)")
    out.append(f"{'series':<10}{'k':>6}{'R/S':>12}{'GPH':>12}{'R/S d':>12}{'Periodogram d':>16}")
    for row in bundle.longmem:
        k = "" if row["series"] == "returns" else f"{row['k']:g}"
        out.append(f"{row['series']:<10}{k:>6}"
                   f"{stat4(row['rs']) + _stars(row['rs_sig']):>12}"
                   f"{stat4(row['gph']) + _stars(row['gph_sig']):>12}"
                   f"{stat4(row['rs_d']):>12}{stat4(row['gph_d']):>16}")
    out.append("")

    for name, res in bundle.fits.items():
        out.append(f"{res.spec.label} (student-t)" if res.spec.distribution.value == "t"
                   else res.spec.label)
        out.append(f"{'':<14}{'Coefficient':>14}{'Std err':>12}{'p-value':>12}")
        for term, coef, se, p in res.coefficient_table():
            out.append(f"{term:<14}{coef5(coef):>14}{coef5(se):>12}{pval(p):>12}")
        out.append(f"{'LM(12)':<14}{stat4(res.lm12.statistic):>14}{'':>12}"
                   f"{pval(res.lm12.p_value):>12}")
        out.append(f"{'Q2(12)':<14}{stat4(res.q2_12.statistic):>14}{'':>12}"
                   f"{pval(res.q2_12.p_value):>12}")
        out.append(f"loglik {res.loglik:.3f}  AIC {res.aic:.3f}  BIC {res.bic:.3f}")
        out.append("")
    return "\n".join(out)
