import numpy as np
import pytest

import oracles
from lbrc.cli import main
from lbrc.errors import InvalidDataError
from lbrc.io import parse_dataset, write_dataset_csv
from lbrc.simulate import sample_lbrc
from lbrc.truth import ExponentialModel


class TestParseDataset:
    def test_residual_schema(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,v,delta\n1.0,2.0,1\n")
        d = parse_dataset(p)
        assert d.n == 1
        assert d.y[0] == 3.0

    def test_total_time_schema(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,y,delta\n1.0,3.0,1\n")
        d = parse_dataset(p)
        assert d.v[0] == 2.0
        assert d.y[0] == 3.0

    def test_negative_entry_rejected_with_row(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,v,delta\n-1.0,2.0,1\n")
        with pytest.raises(InvalidDataError, match=r"row 1.*'a'"):
            parse_dataset(p)

    def test_bad_delta_rejected(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,v,delta\n1.0,2.0,1\n0.5,1.0,2\n")
        with pytest.raises(InvalidDataError, match=r"row 2.*'delta'"):
            parse_dataset(p)

    def test_non_numeric_rejected(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,v,delta\n1.0,oops,1\n")
        with pytest.raises(InvalidDataError, match=r"row 1.*'v'"):
            parse_dataset(p)

    def test_total_less_than_entry_rejected(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,y,delta\n2.0,1.0,1\n")
        with pytest.raises(InvalidDataError, match=r"row 1.*'y'"):
            parse_dataset(p)

    def test_wrong_header_rejected(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("x,v,delta\n1.0,2.0,1\n")
        with pytest.raises(InvalidDataError, match="header"):
            parse_dataset(p)

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,v,delta\n")
        with pytest.raises(InvalidDataError, match="no observations"):
            parse_dataset(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidDataError, match="no such file"):
            parse_dataset(tmp_path / "absent.csv")

    def test_round_trip_bit_exact(self, tmp_path):
        model = ExponentialModel(censor_rate=0.5, rate=1.0)
        d = sample_lbrc(model, 200, seed=99)
        p = tmp_path / "d.csv"
        write_dataset_csv(p, d)
        back = parse_dataset(p)
        assert np.array_equal(back.a, d.a)
        assert np.array_equal(back.v, d.v)
        assert np.array_equal(back.delta, d.delta)


class TestEstimateCommand:
    def test_tiny_file_writes_five_curves(self, tmp_path, capsys):
        src = tmp_path / "d.csv"
        src.write_text("a,v,delta\n1.0,2.0,1\n")
        out = tmp_path / "curves"
        assert main(["estimate", str(src), "--out", str(out)]) == 0
        files = sorted(f.name for f in out.iterdir())
        assert files == [
            "f_bar.csv",
            "f_tilde.csv",
            "f_tjw.csv",
            "lambda_tilde.csv",
            "s_a.csv",
        ]
        body = (out / "f_bar.csv").read_text()
        assert "3.0,0.5" in body

    def test_estimator_selection(self, tmp_path):
        src = tmp_path / "d.csv"
        src.write_text("a,v,delta\n1.0,2.0,1\n")
        out = tmp_path / "only_tjw"
        assert main(["estimate", str(src), "--estimator", "tjw", "--out", str(out)]) == 0
        assert [f.name for f in out.iterdir()] == ["f_tjw.csv"]

    def test_empty_input_fails(self, tmp_path):
        src = tmp_path / "d.csv"
        src.write_text("a,v,delta\n")
        assert main(["estimate", str(src), "--out", str(tmp_path / "o")]) == 1

    def test_tjw_matches_kaplan_meier_file(self, tmp_path):
        # no truncation: the classical product-limit output is Kaplan-Meier
        rng = np.random.default_rng(123)
        times = rng.uniform(0.2, 3.0, 40)
        events = (rng.random(40) > 0.3).astype(int)
        src = tmp_path / "d.csv"
        lines = ["a,v,delta"] + [
            f"0.0,{repr(float(t))},{e}" for t, e in zip(times, events)
        ]
        src.write_text("\n".join(lines) + "\n")
        out = tmp_path / "km"
        assert main(["estimate", str(src), "--estimator", "tjw", "--out", str(out)]) == 0
        rows = [
            line.split(",")
            for line in (out / "f_tjw.csv").read_text().splitlines()
            if line and not line.startswith("#") and not line.startswith("t,")
        ]
        for t_str, val_str in rows:
            want = oracles.kaplan_meier_cdf_at(times, events, float(t_str))
            assert float(val_str) == want

    def test_grid_flag_adds_points(self, tmp_path):
        src = tmp_path / "d.csv"
        src.write_text("a,v,delta\n1.0,2.0,1\n")
        out = tmp_path / "gridded"
        assert main(
            ["estimate", str(src), "--grid", "n:5", "--out", str(out)]
        ) == 0
        rows = [
            line
            for line in (out / "f_tilde.csv").read_text().splitlines()
            if line and not line.startswith("#") and not line.startswith("t,")
        ]
        assert len(rows) >= 5

    def test_bad_grid_flag(self, tmp_path):
        src = tmp_path / "d.csv"
        src.write_text("a,v,delta\n1.0,2.0,1\n")
        assert main(["estimate", str(src), "--grid", "bogus", "--out", str(tmp_path)]) == 1


class TestSimulateCommand:
    def test_byte_identical_for_same_seed(self, tmp_path):
        f1, f2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        args = ["simulate", "--n", "5", "--seed", "42"]
        assert main(args + ["--out", str(f1)]) == 0
        assert main(args + ["--out", str(f2)]) == 0
        assert f1.read_bytes() == f2.read_bytes()

    def test_censor_none_gives_all_events(self, tmp_path):
        f = tmp_path / "s.csv"
        assert main(
            ["simulate", "--n", "50", "--seed", "1", "--censor-rate", "none", "--out", str(f)]
        ) == 0
        d = parse_dataset(f)
        assert np.all(d.delta == 1)

    def test_round_trip_reproduces_dataset(self, tmp_path):
        f = tmp_path / "s.csv"
        assert main(["simulate", "--n", "64", "--seed", "9", "--out", str(f)]) == 0
        model = ExponentialModel(censor_rate=0.5, rate=1.0)
        direct = sample_lbrc(model, 64, seed=9)
        back = parse_dataset(f)
        assert np.array_equal(back.a, direct.a)
        assert np.array_equal(back.v, direct.v)
        assert np.array_equal(back.delta, direct.delta)

    def test_mean_exit_time_matches_quadrature(self, tmp_path):
        f = tmp_path / "s.csv"
        assert main(["simulate", "--n", "100000", "--seed", "5", "--out", str(f)]) == 0
        d = parse_dataset(f)
        model = ExponentialModel(censor_rate=0.5, rate=1.0)
        want = model.mean_exit_time()
        se = d.y.std() / np.sqrt(d.n)
        assert abs(d.y.mean() - want) < 3 * se

    def test_bad_parameters_fail(self, tmp_path):
        assert main(
            ["simulate", "--n", "5", "--seed", "1", "--rate", "-2.0", "--out", str(tmp_path / "x.csv")]
        ) == 1


def write_config(path, **overrides):
    base = {
        "family": "exponential",
        "rate": "1.0",
        "censor_rate": "0.5",
        "sizes": "60,120",
        "reps": "50",
        "which": "Lemma35",
        "grid": "quantiles:0.10:0.90:8",
        "seed": "7",
    }
    base.update(overrides)
    path.write_text("".join(f"{k}={v}\n" for k, v in base.items() if v is not None))


class TestRateExperimentCommand:
    def test_runs_and_is_deterministic(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        write_config(cfg)
        out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
        assert main(["rate-experiment", str(cfg), "--out", str(out1)]) == 0
        assert main(["rate-experiment", str(cfg), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        text = out1.read_text()
        assert "# slope=" in text
        assert "n,rep,sup_residual" in text

    def test_single_size_exits_nonzero(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        write_config(cfg, sizes="100")
        assert main(["rate-experiment", str(cfg), "--out", str(tmp_path / "r.csv")]) == 1
        assert "2 sizes" in capsys.readouterr().err

    def test_unknown_key_exits_nonzero(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        write_config(cfg)
        cfg.write_text(cfg.read_text() + "bogus_key=1\n")
        assert main(["rate-experiment", str(cfg), "--out", str(tmp_path / "r.csv")]) == 1
        assert "bogus_key" in capsys.readouterr().err

    def test_missing_key_named(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        write_config(cfg, seed=None)
        assert main(["rate-experiment", str(cfg), "--out", str(tmp_path / "r.csv")]) == 1
        assert "seed" in capsys.readouterr().err

    def test_window_refusal_exits_2(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        write_config(cfg, grid="quantiles:0.10:0.999:8")
        assert main(["rate-experiment", str(cfg), "--out", str(tmp_path / "r.csv")]) == 2


class TestInfluenceCommand:
    def test_single_row_smoke(self, tmp_path):
        src = tmp_path / "d.csv"
        src.write_text("a,v,delta\n1.0,2.0,1\n")
        out = tmp_path / "ci.csv"
        assert main(["influence", str(src), "--out", str(out)]) == 0
        lines = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
        assert lines[0] == "t,cdf,se,ci_low,ci_high,d,v"
        vals = [float(x) for x in lines[1].split(",")]
        assert all(np.isfinite(vals))

    def test_invalid_level(self, tmp_path):
        src = tmp_path / "d.csv"
        src.write_text("a,v,delta\n1.0,2.0,1\n")
        assert main(["influence", str(src), "--level", "1.5", "--out", str(tmp_path / "x")]) == 1

    def test_ci_width_shrinks_with_n(self):
        # interval width drops by about 1/sqrt(2) when the sample doubles
        from lbrc.influence import plugin_variance
        from lbrc.stepfun import EvalGrid

        model = ExponentialModel(censor_rate=0.5, rate=1.0)
        grid = EvalGrid.of_points([model.quantile(0.5)])
        widths = []
        for si, n in enumerate((1000, 2000)):
            per = [
                np.sqrt(plugin_variance(
                    sample_lbrc(model, n, np.random.SeedSequence(6, spawn_key=(si, r))), grid
                ))[0]
                for r in range(40)
            ]
            widths.append(np.median(per))
        assert 0.6 <= widths[1] / widths[0] <= 0.8

    def test_help_exits_zero(self):
        assert main(["--help"]) == 0
