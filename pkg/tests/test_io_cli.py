import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bivgarch import cli, io, pipeline
from bivgarch.errors import EmptySeries, ParseError, PipelineError


def write_text(path, text):
    path.write_text(text)
    return path


def test_load_two_columns(tmp_path):
    rows = "\n".join(f"{i * 0.5},{-i}" for i in range(10))
    s = io.load_series(write_text(tmp_path / "a.csv", "r1,r2\n" + rows + "\n"))
    assert s.values.shape == (10, 2)
    assert s.columns == ["r1", "r2"] and s.timestamps is None
    assert s.values[3].tolist() == [1.5, -3.0]


def test_time_column_kept_out_of_values(tmp_path):
    text = "time,r1,r2\n2020-01-01,1,2\n2020-01-02,3,4\n"
    s = io.load_series(write_text(tmp_path / "t.csv", text), columns=["r1", "r2"])
    assert s.values.tolist() == [[1.0, 2.0], [3.0, 4.0]]
    assert s.timestamps == ["2020-01-01", "2020-01-02"]
    out = io.write_series(tmp_path / "o.csv", s.values, s.columns, s.timestamps)
    assert out.read_text().splitlines()[1] == "2020-01-01,1.0,2.0"


def test_parse_error_names_row(tmp_path):
    lines = ["a,b"] + [f"{i},{i}" for i in range(1, 11)]
    lines[7] = "7,oops"
    with pytest.raises(ParseError) as err:
        io.load_series(write_text(tmp_path / "bad.csv", "\n".join(lines) + "\n"))
    assert err.value.row == 7 and err.value.column == "b"


def test_missing_and_empty(tmp_path):
    with pytest.raises(FileNotFoundError):
        io.load_series(tmp_path / "nope.csv")
    with pytest.raises(EmptySeries):
        io.load_series(write_text(tmp_path / "h.csv", "a,b\n"))
    with pytest.raises(EmptySeries):
        io.load_series(write_text(tmp_path / "e.csv", ""))
    with pytest.raises(KeyError):
        io.load_series(write_text(tmp_path / "k.csv", "a,b\n1,2\n"), columns=["c"])


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 30), st.integers(1, 3)),
              elements=st.floats(allow_nan=False, allow_infinity=False)))
def test_write_load_round_trip(tmp_path_factory, x):
    path = tmp_path_factory.mktemp("rt") / "x.csv"
    cols = [f"c{i}" for i in range(x.shape[1])]
    io.write_series(path, x, cols)
    back = io.load_series(path)
    assert np.array_equal(back.values, x)
    assert np.array_equal(np.signbit(back.values), np.signbit(x))


def test_cli_bands_and_manifest_rerun(tmp_path):
    assert cli.main(["simulate", "--example", "5", "--n", "4000", "--seed", "3", "--out", str(tmp_path / "sim")]) == 0
    series = tmp_path / "sim" / "series.csv"
    args = ["bands", "--input", str(series), "--lags", "10", "--n-perm", "20", "--seed", "2"]
    assert cli.main(args + ["--out", str(tmp_path / "b1")]) == 0
    header = (tmp_path / "b1" / "bands.csv").read_text().splitlines()[0]
    assert header == "lag,rho11,rho12,rho21,rho22,band11,band12,band21,band22"
    manifest = json.loads((tmp_path / "b1" / "manifest.json").read_text())
    assert manifest["seed"] == 2 and manifest["config"]["n_perm"] == 20
    assert manifest["config"]["quantile"] == 0.98 and manifest["config"]["band_q"] == 0.96
    assert cli.main(["bands", "--config", str(tmp_path / "b1" / "manifest.json"), "--out", str(tmp_path / "b2")]) == 0
    for name in ("bands.csv", "manifest.json"):
        assert (tmp_path / "b1" / name).read_bytes() == (tmp_path / "b2" / name).read_bytes()


def test_cli_options_override_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 500, "seed": 9, "example": 2}))
    args = cli.build_parser().parse_args(["simulate", "--config", str(cfg), "--seed", "4"])
    resolved = cli.resolve(args)
    assert resolved["n"] == 500 and resolved["seed"] == 4 and resolved["example"] == 2
    args = cli.build_parser().parse_args(["tail-index", "--a1", "0.3", "--b1", "0.7", "--df", "none"])
    assert pipeline.innovation_df(cli.resolve(args)["df"]) is None


@pytest.mark.parametrize("command,extra,expected", [
    ("extremogram", ["--set-a", "lower", "--set-b", "lower"], "extremogram.csv"),
    ("fit-uni", ["--dist", "t"], "fit_uni.json"),
    ("var", ["--max-order", "3"], "var.json"),
    ("qq", ["--qq-df", "5"], "qq.csv"),
    ("acf", ["--transform", "square"], "acf.csv"),
    ("clock-profile", ["--period", "24"], "clock_profile.csv"),
])
def test_cli_data_commands(tmp_path, command, extra, expected):
    cli.main(["simulate", "--example", "3", "--n", "3000", "--out", str(tmp_path)])
    out = tmp_path / command
    assert cli.main([command, "--input", str(tmp_path / "series.csv"), "--lags", "10", "--out", str(out)] + extra) == 0
    assert (out / expected).exists() and (out / "manifest.json").exists()


def test_cli_model_commands(tmp_path):
    assert cli.main(["lyapunov", "--example", "1", "--n", "2000", "--out", str(tmp_path / "l")]) == 0
    lyap = json.loads((tmp_path / "l" / "lyapunov.json").read_text())
    assert lyap["lyapunov"] < 0 and lyap["spectral_radius"] == pytest.approx(0.9)
    assert cli.main(["tail-index", "--a1", "0.3", "--b1", "0.7", "--df", "none", "--out", str(tmp_path / "t")]) == 0
    ti = json.loads((tmp_path / "t" / "tail_index.json").read_text())
    assert ti["univariate"]["alpha"] == pytest.approx(2.0, abs=0.05)
    assert cli.main(["tail-index", "--example", "1", "--df", "none", "--replicates", "2000",
                     "--out", str(tmp_path / "tb")]) == 0


def test_cli_reports_errors(tmp_path, capsys):
    empty = write_text(tmp_path / "e.csv", "a,b\n")
    assert cli.main(["acf", "--input", str(empty), "--out", str(tmp_path)]) == 1
    assert "error" in capsys.readouterr().err


def test_pipeline_empty_input_stage(tmp_path):
    empty = write_text(tmp_path / "e.csv", "a,b\n")
    with pytest.raises(PipelineError) as err:
        pipeline.run_pipeline({"input": str(empty)}, tmp_path / "out")
    assert err.value.stage == "load"
    assert isinstance(err.value.error, EmptySeries)


def test_pipeline_rerun_bit_identical(tmp_path):
    cfg = {"example": 11, "n": 3000, "seed": 5, "lags": 10, "n_perm": 20, "var_max_order": 2}
    first = pipeline.run_pipeline(cfg, tmp_path / "p1")
    assert np.array_equal(first["fit"].sigma_filtered * first["fit"].residuals,
                          io.load_series(tmp_path / "p1" / "var_residuals.csv").values)
    assert cli.main(["pipeline", "--config", str(tmp_path / "p1" / "manifest.json"),
                     "--out", str(tmp_path / "p2")]) == 0
    names = sorted(p.name for p in (tmp_path / "p1").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "p2").iterdir())
    assert {"extremogram_raw.csv", "extremogram_resid.csv", "qq.csv", "acf_raw.csv", "acf_resid.csv",
            "clock_profile.csv", "fit_biv.json", "manifest.json"} <= set(names)
    for name in names:
        assert (tmp_path / "p1" / name).read_bytes() == (tmp_path / "p2" / name).read_bytes(), name
