"""End-to-end analysis: returns, moments, ACFs, memory tests, model fits, outputs."""
import contextlib
import json
import logging
import math
import os
import platform
import shutil
import tempfile
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List

import numpy as np

from .. import __version__
from ..acf import acf
from ..exceptions import InputError, LongMemError
from ..memory import default_nw_lags, gph_bandwidth, gph_estimate, modified_rs
from ..models.base import Family, ModelSpec
from ..models.fit import fit
from ..series import log_returns, summary_stats, volatility_proxy, volume_change
from ..sim import GENERATOR_NAME
from . import plots
from .ingest import ColumnMapping, ingest_csv
from .report import render_report

logger = logging.getLogger(__name__)


class StageError(LongMemError):
    """An analysis stage failed; ``cause`` holds the original exception."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@contextlib.contextmanager
def stage(name):
    logger.info("stage: %s", name)
    try:
        yield
    except StageError:
        raise
    except (LongMemError, ValueError, ArithmeticError, OSError) as exc:
        raise StageError(name, exc) from exc


@dataclass
class ReportBundle:
    config: object
    n_returns: int
    gph_bandwidth: int
    nw_lags: int
    summary: List[dict] = field(default_factory=list)
    longmem: List[dict] = field(default_factory=list)
    fits: Dict[str, object] = field(default_factory=dict)
    plots: Dict[str, str] = field(default_factory=dict)

    def check_proxy_symmetry(self):
        """Squared-proxy cells at power k must equal absolute cells at 2k exactly."""
        cells = {(r["series"], r["k"]): r for r in self.longmem}
        stats = ("rs", "gph", "rs_d", "gph_d")
        for (series, k), row in cells.items():
            if series != "squared":
                continue
            twin = cells.get(("absolute", 2.0 * k))
            if twin is None:
                continue
            for s in stats:
                a, b = row[s], twin[s]
                if not (a == b or (math.isnan(a) and math.isnan(b))):
                    raise LongMemError(f"proxy identity violated: squared k={k} {s}={a!r} "
                                       f"vs absolute k={2 * k} {s}={b!r}")


def _memory_row(series, k, x, m, q):
    rs = modified_rs(x, q)
    g = gph_estimate(x, m)
    return {
        "series": series, "k": k, "rs": rs.q_stat, "rs_sig": int(rs.significance),
        "gph": g.t_statistic, "gph_sig": int(g.significance), "rs_d": rs.d_estimate,
        "gph_d": g.d_estimate, "m": g.bandwidth_m, "q": rs.bandwidth_q,
    }


def _summary_row(label, x):
    s = summary_stats(x)
    return {"series": label, "mean": s.mean, "std_dev": s.std_dev, "skewness": s.skewness,
            "kurtosis": s.kurtosis, "jarque_bera": s.jarque_bera, "n": s.n}


def _model_specs(config, volume):
    specs = {}
    K = config.trunc_k
    for name in config.models:
        if name == "garch":
            specs[name] = ModelSpec(Family.GARCH, truncation_K=K)
        elif name == "figarch":
            specs[name] = ModelSpec(Family.FIGARCH, truncation_K=K)
        elif name == "fiegarch":
            specs[name] = ModelSpec(Family.FIEGARCH, include_leverage=True, truncation_K=K)
        elif name == "fiegarch_volume":
            if volume is None:
                logger.info("no volume column; skipping fiegarch_volume")
                continue
            specs[name] = ModelSpec(Family.FIEGARCH, include_leverage=True, exog_volume=volume,
                                    truncation_K=K)
    return specs


def analyze(config):
    """Run every stage in memory and return the :class:`ReportBundle`."""
    if not config.input_path:
        raise StageError("ingest", InputError("no input file given"))
    with stage("ingest"):
        prices = ingest_csv(config.input_path,
                            ColumnMapping(config.date_col, config.price_col, config.volume_col))
    with stage("returns"):
        returns = log_returns(prices)
        r = returns.values
        if np.ptp(r) == 0.0:
            raise InputError("returns have zero variance (constant prices)")
        dates = returns.timestamps
        volume = volume_change(prices) if prices.volume is not None else None
    n = r.size
    m = config.gph_m if config.gph_m is not None else gph_bandwidth(n, config.gph_power)
    q = config.nw_q if config.nw_q is not None else default_nw_lags(n)
    bundle = ReportBundle(config, n, m, q)

    with stage("summary"):
        bundle.summary = [_summary_row("returns", r),
                          _summary_row("absolute", volatility_proxy(r, "absolute", 1.0)),
                          _summary_row("squared", volatility_proxy(r, "squared", 1.0))]

    with stage("acf"):
        bundle.plots.update(plots.series_plot("fig1_returns", "Daily returns", dates, r))
        bundle.plots.update(plots.acf_plot("acf_returns", "ACF: returns", acf(r, config.acf_lags)))
        for base in ("absolute", "squared"):
            bundle.plots.update(plots.series_plot(
                f"fig1_{base}", f"{base} volatility", dates, volatility_proxy(r, base, 1.0).values))
            for k in config.powers:
                x = volatility_proxy(r, base, k).values
                bundle.plots.update(plots.acf_plot(f"acf_{base}_k{k:g}",
                                                   f"ACF: {base} volatility, k={k:g}",
                                                   acf(x, config.acf_lags)))
        if prices.volume is not None:
            bundle.plots.update(plots.series_plot("fig5_volume", "Volume",
                                                  prices.timestamps, prices.volume, "volume"))
            bundle.plots.update(plots.series_plot("fig6_volume_change", "Change in volume",
                                                  dates, volume, "volume_change"))

    with stage("long-memory"):
        bundle.longmem.append(_memory_row("returns", 0.0, r, m, q))
        for base in ("absolute", "squared"):
            for k in config.powers:
                bundle.longmem.append(_memory_row(base, k,
                                                  volatility_proxy(r, base, k).values, m, q))
        bundle.check_proxy_symmetry()

    for name, spec in _model_specs(config, volume).items():
        with stage(f"fit:{name}"):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                res = fit(r, spec)
            bundle.fits[name] = res
            bundle.plots.update(plots.series_plot(
                f"condvol_{name}", f"{spec.label} conditional volatility", dates,
                res.conditional_volatility, "sigma"))
    return bundle


def _fmt(v):
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def _table_csv(rows):
    if not rows:
        return ""
    keys = list(rows[0])
    lines = [",".join(keys)]
    lines += [",".join(_fmt(r[k]) for k in keys) for r in rows]
    return "\n".join(lines) + "\n"


def model_rows(bundle):
    rows = []
    for name, res in bundle.fits.items():
        for param, coef, se, pv in res.coefficient_table():
            rows.append({"model": name, "term": param, "coefficient": coef, "std_error": se,
                         "p_value": pv})
        for term, value, pv in (("LM(12)", res.lm12.statistic, res.lm12.p_value),
                                ("Q2(12)", res.q2_12.statistic, res.q2_12.p_value)):
            rows.append({"model": name, "term": term, "coefficient": value,
                         "std_error": math.nan, "p_value": pv})
        for term, value in (("loglik", res.loglik), ("AIC", res.aic), ("BIC", res.bic)):
            rows.append({"model": name, "term": term, "coefficient": value,
                         "std_error": math.nan, "p_value": math.nan})
    return rows


def bundle_files(bundle):
    """Every output file as ``relative path -> text``."""
    cfg = bundle.config
    files = {
        "summary.csv": _table_csv(bundle.summary),
        "longmem.csv": _table_csv(bundle.longmem),
        "report.txt": render_report(bundle),
    }
    if bundle.fits:
        files["models.csv"] = _table_csv(model_rows(bundle))
    for name, text in bundle.plots.items():
        files[f"plots/{name}"] = text
    manifest = {
        "package": "longmem", "version": __version__, "python": platform.python_version(),
        "numpy": np.__version__, "generator": GENERATOR_NAME, "seed": cfg.seed,
        "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(cfg).items()},
        "n_returns": bundle.n_returns, "gph_bandwidth": bundle.gph_bandwidth,
        "nw_lags": bundle.nw_lags, "files": sorted(files),
    }
    files["manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    return files


def write_outputs(files, out_dir):
    """Stage every file in a temporary directory, then move them into place."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        staging = Path(tempfile.mkdtemp(prefix=".longmem-", dir=out))
    except OSError as exc:
        raise StageError("write", exc) from exc
    try:
        for rel, text in files.items():
            path = staging / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        for rel in files:
            target = out / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            os.replace(staging / rel, target)
    except OSError as exc:
        raise StageError("write", exc) from exc
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    return [out / rel for rel in files]


def run_analysis(config):
    bundle = analyze(config)
    write_outputs(bundle_files(bundle), config.out)
    return bundle
