import csv
import dataclasses
import io
import json
import logging
import math
import re

import pytest
from numpy.testing import assert_array_equal

from longmem.cli.config import AnalysisConfig, build_config, parse_config_text
from longmem.cli.ingest import ColumnMapping, ingest_csv
from longmem.cli.main import EXIT_CONVERGENCE, EXIT_INPUT, EXIT_NUMERIC, exit_code_for, main
from longmem.cli.pipeline import StageError, analyze, bundle_files, run_analysis, write_outputs
from longmem.cli.report import coef5, pval, stat4
from longmem.exceptions import ConvergenceError, InputError, LongMemError, NumericalError

ROWS = [
    ("1990-01-02", "100.0", "1000"),
    ("1990-01-03", "101.5", "1100"),
    ("1990-01-04", "100.9", "900"),
    ("1990-01-05", "102.2", "1200"),
    ("1990-01-08", "101.0", "1000"),
    ("1990-01-09", "99.8", "950"),
    ("1990-01-10", "100.4", "1010"),
]


def write_csv(path, rows, header=("date", "price", "volume")):
    path.write_text("\n".join([",".join(header)] + [",".join(r) for r in rows]) + "\n")
    return path


# ingestion

def test_ingest_three_rows(tmp_path):
    p = ingest_csv(write_csv(tmp_path / "a.csv", ROWS[:3]))
    assert len(p.prices) == 3 and p.volume is None
    assert_array_equal(p.prices, [100.0, 101.5, 100.9])


def test_ingest_with_volume_and_us_dates(tmp_path):
    rows = [("01/02/1990", "100", "5"), ("01/03/1990", "\"1,001.5\"", "6")]
    p = ingest_csv(write_csv(tmp_path / "us.csv", rows), ColumnMapping(volume="volume"))
    assert_array_equal(p.prices, [100.0, 1001.5])
    assert_array_equal(p.volume, [5.0, 6.0])
    assert str(p.timestamps[0]) == "1990-01-02"


def test_ingest_negative_price_cites_line(tmp_path):
    rows = list(ROWS)
    rows[5] = ("1990-01-09", "-1", "950")  # data row 6 sits on file line 7
    with pytest.raises(InputError, match="line 7") as info:
        ingest_csv(write_csv(tmp_path / "bad.csv", rows))
    assert info.value.row == 7


def test_ingest_bad_date_cites_line(tmp_path):
    rows = list(ROWS)
    rows[1] = ("1990-13-45", "101.5", "1")
    with pytest.raises(InputError, match="line 3"):
        ingest_csv(write_csv(tmp_path / "bad.csv", rows))


def test_ingest_shuffled_equals_sorted(tmp_path):
    order = [3, 0, 6, 2, 5, 1, 4]
    a = ingest_csv(write_csv(tmp_path / "s.csv", ROWS), ColumnMapping(volume="volume"))
    b = ingest_csv(write_csv(tmp_path / "x.csv", [ROWS[i] for i in order]),
                   ColumnMapping(volume="volume"))
    assert_array_equal(a.timestamps, b.timestamps)
    assert_array_equal(a.prices, b.prices)
    assert_array_equal(a.volume, b.volume)


def test_ingest_duplicates(tmp_path, caplog):
    with caplog.at_level(logging.WARNING):
        p = ingest_csv(write_csv(tmp_path / "d.csv", ROWS[:3] + [ROWS[1]]))
    assert len(p.prices) == 3
    assert "duplicates" in caplog.text
    with pytest.raises(InputError, match="conflicting"):
        ingest_csv(write_csv(tmp_path / "c.csv", ROWS[:3] + [("1990-01-03", "99", "1")]))


def test_ingest_missing_column_and_file(tmp_path):
    with pytest.raises(InputError, match="close"):
        ingest_csv(write_csv(tmp_path / "a.csv", ROWS), ColumnMapping(price="close"))
    with pytest.raises(InputError):
        ingest_csv(tmp_path / "nope.csv")
    (tmp_path / "empty.csv").write_text("")
    with pytest.raises(InputError):
        ingest_csv(tmp_path / "empty.csv")


# configuration

def test_config_defaults():
    cfg = AnalysisConfig()
    assert cfg.powers == (0.25, 0.5, 1.0, 1.5, 2.0)
    assert cfg.trunc_k == 1000 and cfg.gph_m is None


def test_config_file_parsing():
    text = "# comment\ninput = data.csv\npowers = 1, 2  # trailing\ngph_m = auto\nnw-q = 7\n"
    assert parse_config_text(text) == {"input_path": "data.csv", "powers": (1.0, 2.0),
                                       "gph_m": None, "nw_q": 7}
    with pytest.raises(InputError, match="unknown key"):
        parse_config_text("colour = red")
    with pytest.raises(InputError, match=":2:"):
        parse_config_text("seed = 1\nseed = x")


def test_config_precedence(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text("powers = 1, 2\nseed = 5\nout = from-file\n")
    cfg = build_config(f, {"seed": 9, "out": None})
    assert cfg.powers == (1.0, 2.0)
    assert cfg.seed == 9
    assert cfg.out == "from-file"
    assert build_config(None, {}).seed == AnalysisConfig().seed


def test_config_validation():
    with pytest.raises(InputError):
        AnalysisConfig(powers=(1.0, 0.0))
    with pytest.raises(InputError):
        AnalysisConfig(models=("arma",))


# report formatting

def test_report_formatting():
    assert stat4(3.856612) == "3.857"
    assert stat4(4925.838) == "4926"
    assert coef5(0.0566241) == "0.05662"
    assert pval(3.2e-7) == "3.20E-07"
    assert pval(0.1176) == "0.1176"
    assert pval(math.nan) == "n/a"


# exit codes

def test_exit_code_mapping():
    assert exit_code_for(InputError("x")) == EXIT_INPUT
    assert exit_code_for(StageError("fit:figarch", ConvergenceError("x"))) == EXIT_CONVERGENCE
    assert exit_code_for(StageError("long-memory", NumericalError("x"))) == EXIT_NUMERIC
    assert len({0, EXIT_INPUT, EXIT_NUMERIC, EXIT_CONVERGENCE}) == 4


def test_cli_missing_input(tmp_path, capsys):
    assert main(["analyze", "--input", str(tmp_path / "none.csv"), "--out",
                 str(tmp_path / "o")]) == EXIT_INPUT
    assert "[ingest]" in capsys.readouterr().err


def test_cli_constant_prices(tmp_path, capsys):
    rows = [(f"1990-01-{d:02d}", "50.0", "1") for d in range(1, 29)]
    out = tmp_path / "o"
    code = main(["analyze", "--input", str(write_csv(tmp_path / "c.csv", rows)),
                 "--out", str(out), "--models", "none"])
    assert code == EXIT_INPUT
    assert "[returns]" in capsys.readouterr().err
    assert not out.exists()


def test_write_outputs_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(StageError):
        write_outputs({"a.csv": "1\n"}, blocker / "sub")


def test_simulate_and_mc_commands(tmp_path, capsys):
    out = tmp_path / "sim.csv"
    argv = ["simulate", "--family", "arfima", "--d", "0.2", "--n", "600", "--seed", "3",
            "--out", str(out)]
    assert main(argv) == 0
    first = out.read_text()
    assert main(argv) == 0
    assert out.read_text() == first
    truth = json.loads(out.with_suffix(".truth.json").read_text())
    assert truth["truth"] == 0.2 and truth["n_returns"] == 600 and "Philox" in truth["generator"]
    lines = first.splitlines()
    assert lines[0] == "date,price" and len(lines) == 602
    mc = tmp_path / "mc.csv"
    assert main(["mc", "--family", "arfima", "--d", "0.0", "--n", "1024", "--reps", "3",
                 "--estimator", "gph", "--out", str(mc)]) == 0
    assert len(list(csv.DictReader(mc.open()))) == 3
    assert "reject5" in capsys.readouterr().out


# pipeline on the simulated fixture

@pytest.fixture(scope="module")
def memory_bundle(fixture_csv):
    cfg = AnalysisConfig(input_path=str(fixture_csv), volume_col="volume", models=())
    return analyze(cfg)


def test_bundle_bandwidths(memory_bundle):
    assert memory_bundle.n_returns == 4175
    assert memory_bundle.gph_bandwidth == 788
    assert memory_bundle.nw_lags == 9


def test_volatility_cells_significant_at_one_percent(memory_bundle):
    vol = [r for r in memory_bundle.longmem if r["series"] != "returns"]
    assert len(vol) == 10
    assert all(r["rs_sig"] == 2 and r["gph_sig"] == 2 for r in vol)


def test_returns_rs_cell_insignificant(memory_bundle):
    row = memory_bundle.longmem[0]
    assert row["series"] == "returns" and row["rs_sig"] == 0


def test_returns_gph_cell_insignificant(memory_bundle):
    assert memory_bundle.longmem[0]["gph_sig"] == 0


def test_proxy_symmetry_enforced(memory_bundle):
    memory_bundle.check_proxy_symmetry()
    broken = dataclasses.replace(memory_bundle, longmem=[dict(r) for r in memory_bundle.longmem])
    cell = next(r for r in broken.longmem if r["series"] == "squared" and r["k"] == 0.5)
    cell["gph"] += 1e-9
    with pytest.raises(LongMemError, match="proxy identity"):
        broken.check_proxy_symmetry()


def read_plot(files, name):
    return list(csv.reader(io.StringIO(files[f"plots/{name}.csv"])))


def test_acf_plot_contract(memory_bundle):
    files = bundle_files(memory_bundle)
    names = [f for f in files if f.startswith("plots/acf_") and f.endswith(".csv")]
    assert len(names) == 11
    rows = read_plot(files, "acf_absolute_k1")
    assert rows[0] == ["lag", "rho", "ci"] and len(rows) == 101
    band = {float(r[2]) for r in rows[1:]}
    assert len(band) == 1
    assert abs(band.pop() - 1.96 / math.sqrt(4175)) <= 1e-12
    assert [int(r[0]) for r in rows[1:]] == list(range(1, 101))


def test_svg_numbers_match_csv(memory_bundle):
    files = bundle_files(memory_bundle)
    rows = read_plot(files, "acf_squared_k0.5")
    svg = files["plots/acf_squared_k0.5.svg"]
    bars = [float(v) for v in re.findall(r'<line x1="[^"]+" y1="0" x2="[^"]+" y2="([^"]+)"/>', svg)]
    assert len(bars) == 100
    for (lag, rho, ci), y in zip(rows[1:], bars):
        assert y == float(f"{float(rho):.6g}")
    series = read_plot(files, "fig1_returns")
    pts = re.search(r'points="([^"]+)"', files["plots/fig1_returns.svg"]).group(1).split()
    assert len(pts) == len(series) - 1 == 4175
    for (date, value), pt in zip(series[1:], pts):
        assert float(pt.split(",")[1]) == float(f"{float(value):.6g}")


def test_bundle_files_and_manifest(memory_bundle):
    files = bundle_files(memory_bundle)
    assert {"summary.csv", "longmem.csv", "report.txt", "manifest.json"} <= set(files)
    assert "models.csv" not in files
    manifest = json.loads(files["manifest.json"])
    assert manifest["gph_bandwidth"] == 788 and manifest["seed"] == 20061101
    assert "Philox" in manifest["generator"]
    assert "GPH bandwidth m = 788" in files["report.txt"]
    assert "plots/fig6_volume_change.csv" in files
    summary = list(csv.DictReader(io.StringIO(files["summary.csv"])))
    assert [r["series"] for r in summary] == ["returns", "absolute", "squared"]


def test_fiegarch_condvol_plot(fixture_csv, tmp_path):
    cfg = AnalysisConfig(input_path=str(fixture_csv), models=("fiegarch",), powers=(1.0,),
                         out=str(tmp_path / "out"))
    bundle = run_analysis(cfg)
    rows = list(csv.reader((tmp_path / "out" / "plots" / "condvol_fiegarch.csv").open()))
    assert rows[0] == ["date", "sigma"]
    assert len(rows) - 1 == bundle.n_returns
    models = list(csv.DictReader((tmp_path / "out" / "models.csv").open()))
    terms = [r["term"] for r in models]
    assert {"leverage", "d", "LM(12)", "Q2(12)", "AIC", "BIC"} <= set(terms)
    assert not any(p.name.startswith(".longmem-") for p in (tmp_path / "out").iterdir())
