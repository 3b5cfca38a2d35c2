"""``longmem`` command line: analyze, simulate, mc."""
import argparse
import datetime as dt
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from ..exceptions import ConvergenceError, LongMemError, NumericalError
from ..models.base import ParamVector
from ..sim import (GENERATOR_NAME, ESTIMATORS, SimConfig, SimFamily, make_rng, monte_carlo,
                   simulate_arfima, simulate_volmodel, standard_normal)
from .config import build_config
from .pipeline import StageError, run_analysis

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_CONVERGENCE = 4

logger = logging.getLogger("longmem")


def exit_code_for(exc):
    cause = exc.cause if isinstance(exc, StageError) else exc
    if isinstance(cause, ConvergenceError):
        return EXIT_CONVERGENCE
    if isinstance(cause, (NumericalError, ArithmeticError, np.linalg.LinAlgError)):
        return EXIT_NUMERIC
    return EXIT_INPUT


def _add_truth_args(p):
    p.add_argument("--family", choices=[f.value for f in SimFamily], default="figarch")
    p.add_argument("--d", type=float, default=0.35)
    p.add_argument("--a", type=float, default=0.05)
    p.add_argument("--arch1", type=float, default=0.2)
    p.add_argument("--garch1", type=float, default=0.45)
    p.add_argument("--leverage", type=float, default=0.0)
    p.add_argument("--volume-coef", type=float, default=0.0)
    p.add_argument("--volume-sd", type=float, default=0.0)
    p.add_argument("--nu", type=float, default=8.0)
    p.add_argument("--gaussian", action="store_true", help="normal shocks instead of student-t")
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--trunc-k", type=int, default=1000)
    p.add_argument("--seed", type=int, default=20061101)


def _sim_config(args, replications=1):
    if args.family == "arfima":
        truth = args.d
    else:
        truth = ParamVector(a=args.a, arch1=args.arch1, garch1=args.garch1, d=args.d,
                            leverage=args.leverage, volume_coef=args.volume_coef,
                            nu=math.inf if args.gaussian else args.nu)
    burn = args.burn_in
    if burn is None and args.family == "arfima":
        burn = 2000
    return SimConfig(args.family, truth, n=args.n, burn_in=burn, seed=args.seed,
                     replications=replications, truncation_K=args.trunc_k,
                     distribution="normal" if args.gaussian else "t",
                     include_leverage=args.leverage != 0.0, volume_sd=args.volume_sd)


def build_parser():
    parser = argparse.ArgumentParser(prog="longmem", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="full returns -> tables -> model-fit pipeline")
    a.add_argument("--config", help="flat key = value configuration file")
    a.add_argument("--input")
    a.add_argument("--date-col")
    a.add_argument("--price-col")
    a.add_argument("--volume-col")
    a.add_argument("--powers", help="comma-separated power grid, e.g. 0.25,0.5,1,1.5,2")
    a.add_argument("--gph-m", help="GPH bandwidth or 'auto'")
    a.add_argument("--nw-q", help="Newey-West lags or 'auto'")
    a.add_argument("--models", help="comma list of garch,figarch,fiegarch,fiegarch_volume or none")
    a.add_argument("--trunc-k", type=int)
    a.add_argument("--seed", type=int)
    a.add_argument("--out")

    s = sub.add_parser("simulate", help="write a simulated price CSV with known truth")
    _add_truth_args(s)
    s.add_argument("--start-date", default="1990-01-02")
    s.add_argument("--out", required=True)

    m = sub.add_parser("mc", help="Monte Carlo size/power/recovery experiment")
    _add_truth_args(m)
    m.add_argument("--estimator", choices=sorted(ESTIMATORS), default="gph")
    m.add_argument("--reps", type=int, default=50)
    m.add_argument("--no-split", action="store_true", help="reuse one seed for every replication")
    m.add_argument("--out", help="CSV file for per-replication rows")
    return parser


def _cmd_analyze(args):
    from .config import _optional_int, _parse_list

    overrides = {
        "input_path": args.input, "date_col": args.date_col, "price_col": args.price_col,
        "volume_col": args.volume_col, "trunc_k": args.trunc_k, "seed": args.seed,
        "out": args.out,
        "powers": None if args.powers is None else _parse_list(args.powers, float),
        "models": None if args.models is None else _parse_list(args.models, str),
    }
    for key in ("gph_m", "nw_q"):
        raw = getattr(args, key)
        if raw is not None:
            overrides[key] = _optional_int(raw)
    cfg = build_config(args.config, overrides)
    bundle = run_analysis(cfg)
    print(f"returns: {bundle.n_returns}")
    print(f"GPH bandwidth: {bundle.gph_bandwidth}")
    print(f"Newey-West lags: {bundle.nw_lags}")
    for name, res in bundle.fits.items():
        print(f"{name}: loglik {res.loglik:.3f} d {res.params.d:.5f}")
    print(f"outputs written to {cfg.out}")
    return EXIT_OK


def _business_days(start, count):
    day = dt.date.fromisoformat(start)
    out = []
    while len(out) < count:
        if day.weekday() < 5:
            out.append(day)
        day += dt.timedelta(days=1)
    return out


def _cmd_simulate(args):
    cfg = _sim_config(args)
    if cfg.family is SimFamily.ARFIMA:
        path = simulate_arfima(cfg.true_params, cfg.n, cfg.burn_in, cfg.seed)
    else:
        path = simulate_volmodel(cfg)
    r = path.values
    volume = path.volume
    if volume is None and args.volume_sd > 0:
        volume = args.volume_sd * standard_normal(make_rng(cfg.seed ^ 0x5EED), r.size)
    prices = 100.0 * np.exp(np.concatenate(([0.0], np.cumsum(r) / 100.0)))
    dates = _business_days(args.start_date, prices.size)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    header = "date,price" + (",volume" if volume is not None else "")
    lines = [header]
    vol_level = None
    if volume is not None:
        vol_level = 1e6 * np.exp(np.concatenate(([0.0], np.cumsum(volume) / 100.0)))
    for i, day in enumerate(dates):
        row = f"{day.isoformat()},{float(prices[i])!r}"
        if vol_level is not None:
            row += f",{float(vol_level[i])!r}"
        lines.append(row)
    out.write_text("\n".join(lines) + "\n")
    truth = path.truth if isinstance(path.truth, float) else path.truth.as_dict()
    meta = {"family": cfg.family.value, "truth": truth, "n_returns": int(r.size),
            "seed": cfg.seed, "generator": GENERATOR_NAME, "burn_in": cfg.burn_in,
            "truncation_K": cfg.truncation_K}
    out.with_suffix(".truth.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"wrote {prices.size} prices to {out}")
    return EXIT_OK


def _cmd_mc(args):
    cfg = _sim_config(args, replications=args.reps)
    cfg = SimConfig(**{**cfg.__dict__, "split_seeds": not args.no_split})
    summary = monte_carlo(cfg, args.estimator)
    if args.out:
        summary.to_csv(args.out)
    print(f"estimator {args.estimator}: reps {len(summary.rows)} failures {summary.failures}")
    print(f"mean {summary.mean:.6g} sd {summary.std:.6g}")
    print(f"reject5 {summary.rejection_rate(0.05):.4f} reject1 {summary.rejection_rate(0.01):.4f}")
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"analyze": _cmd_analyze, "simulate": _cmd_simulate, "mc": _cmd_mc}[args.command]
    try:
        return handler(args)
    except (LongMemError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
