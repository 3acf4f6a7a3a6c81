import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srgbm import analytics as an
from srgbm.harness import cli
from srgbm.harness.config import ConfigError, default_config, parse, render
from srgbm.harness.experiments import cell_seed, run, write_outputs
from srgbm.harness.table import ResultTable


class TestConfig:
    def test_empty_text_gives_defaults(self):
        assert parse("") == default_config("single-path")

    def test_render_parse_round_trip(self):
        for exp in ("single-path", "ergodicity-sweep", "self-averaging", "regimes-timeseries", "analytics-table"):
            cfg = default_config(exp)
            assert parse(render(cfg)) == cfg

    def test_range_syntax(self):
        cfg = parse("r_list = 0:0.1:0.002\nN_list = 1, 100")
        assert len(cfg.r_list) == 51 and cfg.r_list[-1] == pytest.approx(0.1) and cfg.r_list[25] == 0.05
        assert cfg.N_list == (1, 100)

    def test_experiment_override(self):
        cfg = parse("experiment = single-path\nmu = 0.03", experiment="self-averaging")
        assert cfg.experiment == "self-averaging" and cfg.mu == 0.03

    @pytest.mark.parametrize(
        "text",
        [
            "bogus = 1",
            "mu = abc",
            "experiment = nope",
            "N_list = 0",
            "r_list = 0:1",
            "fraction = 0",
            "method = rk4",
            "sigma2 = -1",
            "r = 50\ndt = 0.1",
            "emit_plots = maybe",
            "no equals sign here",
        ],
    )
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            parse(text)

    def test_hash_ignores_output_location(self):
        cfg = default_config("single-path")
        assert cfg.config_hash() == replace(cfg, output_dir="elsewhere", emit_plots=True).config_hash()
        assert cfg.config_hash() != replace(cfg, master_seed=1).config_hash()


def test_cell_seeds_distinct_and_stable():
    seeds = {cell_seed(5, i, j, k) for i in range(4) for j in range(4) for k in range(4)}
    assert len(seeds) == 64
    assert cell_seed(5, 1, 2, 3) == cell_seed(5, 1, 2, 3)


class TestTable:
    @settings(max_examples=100)
    @given(
        rows=st.lists(
            st.tuples(
                st.floats(allow_nan=True, allow_infinity=True),
                st.integers(-(2**62), 2**62),
                st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc")), max_size=12),
            ),
            max_size=20,
        )
    )
    def test_csv_round_trip(self, rows):
        table = ResultTable(["x", "n", "s"], ["float", "int", "str"], metadata={"seed": "1", "created": "now"})
        for row in rows:
            table.append(*row)
        back = ResultTable.from_csv(table.to_csv())
        assert back.equals(table)
        assert back.metadata == table.metadata

    def test_volatile_key_ignored_on_request(self):
        a = ResultTable(["x"], ["float"], metadata={"created": "1"})
        b = ResultTable(["x"], ["float"], metadata={"created": "2"})
        assert a.equals(b, include_volatile=False) and not a.equals(b)

    def test_row_length_checked(self):
        with pytest.raises(ValueError):
            ResultTable(["x"], ["float"]).append(1.0, 2.0)


def small(exp, **kw):
    return replace(default_config(exp), **kw).validate()


SMALL = {
    "single-path": dict(horizon=10.0, dt=0.001, stride=10),
    "ergodicity-sweep": dict(horizon=50.0, r_list=(0.0, 0.02, 0.08), N_list=(1, 100), realizations=5),
    "self-averaging": dict(r_list=(0.0, 0.01, 0.02, 0.03, 0.08), N_list=(1, 100)),
    "regimes-timeseries": dict(horizon=20.0, dt=0.01, stride=100, N_list=(200,), r_list=(0.01, 0.08),
                               realizations=3, timeseries_realizations=2),
    "analytics-table": dict(mc_samples=20_000),
}


class TestRunners:
    @pytest.mark.parametrize("exp", list(SMALL))
    def test_rerun_bodies_identical(self, exp, tmp_path):
        cfg = small(exp, **SMALL[exp])
        first = run(cfg)
        write_outputs(cfg, first, tmp_path / "a", plots=True)
        write_outputs(cfg, run(cfg), tmp_path / "b", plots=True)
        for name in first:
            a = ResultTable.read(tmp_path / "a" / f"{name}.csv")
            b = ResultTable.read(tmp_path / "b" / f"{name}.csv")
            assert a.body() == b.body()
            assert a.metadata["config_hash"] == cfg.config_hash()
            assert a.metadata["seed"] == str(cfg.master_seed)
            assert {"experiment", "version", "created"} <= set(a.metadata)
        assert (tmp_path / "a" / "meta.txt").read_text().startswith(f"config_hash: {cfg.config_hash()}")

    def test_seed_changes_results(self):
        cfg = small("single-path", **SMALL["single-path"])
        a = run(cfg)["single-path"]
        b = run(replace(cfg, master_seed=cfg.master_seed + 1))["single-path"]
        assert a.body() != b.body()

    def test_single_path_euler_tracks_renewal(self):
        tab = run(small("single-path", **SMALL["single-path"]))["single-path"]
        xe, xr = np.array(tab.column("x_euler")), np.array(tab.column("x_renewal"))
        reset = np.array(tab.column("is_reset")) == 1
        assert np.all(xe[reset] == 1.0) and np.all(xr[reset] == 1.0)
        # strong order: relative gap O(sqrt(dt)) at worst over a horizon of 10
        assert np.max(np.abs(xe / xr - 1)) < 0.05

    def test_sweep_analytic_column(self):
        cfg = small("ergodicity-sweep", **SMALL["ergodicity-sweep"])
        tab = run(cfg)["ergodicity-sweep"]
        for r, mean in zip(tab.column("r"), tab.column("analytic_mean")):
            assert mean == an.moment(cfg.params.replace(r=r), 1, 50.0)

    def test_self_averaging_columns(self):
        cfg = small("self-averaging", **SMALL["self-averaging"])
        tab = run(cfg)["self-averaging"]
        rows = {(r, n): row for r, n, row in zip(tab.column("r"), tab.column("N"), tab.rows)}
        assert rows[(0.08, 100)][3] == "never"
        assert math.isnan(rows[(0.03, 100)][4]) and not math.isnan(rows[(0.03, 100)][5])
        assert rows[(0.01, 1)][6] == "Frozen"
        assert math.isnan(rows[(0.0, 1)][7])
        assert rows[(0.0, 100)][7] == pytest.approx(an.optimal_reset_rate(cfg.params, 100))

    def test_analytics_table_mc_agrees(self):
        tab = run(small("analytics-table", **SMALL["analytics-table"]))["analytics-table"]
        for row in tab.rows:
            _, m, kind, _, _, exact, mc, se = row
            if m == 1:
                assert abs(mc - exact) < 5 * se
        assert set(tab.column("behavior")) == {"exponential", "linear", "convergent"}


class TestCli:
    def test_print_config(self, capsys):
        assert cli.main(["print-config", "--experiment", "self-averaging"]) == 0
        assert parse(capsys.readouterr().out).experiment == "self-averaging"

    def test_tc_success(self, tmp_path, capsys):
        conf = tmp_path / "c.ini"
        conf.write_text("r_list = 0.01, 0.08\nN_list = 10\n")
        out = tmp_path / "out"
        assert cli.main(["tc", "--config", str(conf), "--out", str(out), "--plots"]) == 0
        assert (out / "self-averaging.csv").exists() and (out / "self-averaging.svg").exists()
        assert str(out / "meta.txt") in capsys.readouterr().out

    def test_simulate_experiment_choice(self, tmp_path):
        conf = tmp_path / "c.ini"
        conf.write_text("horizon = 5\nstride = 50\nN_list = 50\nr_list = 0.08\nrealizations = 2\n"
                        "timeseries_realizations = 2\n")
        out = tmp_path / "o"
        assert cli.main(["simulate", "--experiment", "regimes-timeseries", "--config", str(conf), "--out", str(out)]) == 0
        assert (out / "regimes-timeseries.csv").exists() and (out / "regimes-longtime.csv").exists()

    def test_seed_flag(self, tmp_path):
        out = tmp_path / "o"
        assert cli.main(["table", "--seed", "3", "--out", str(out)]) == 0
        assert ResultTable.read(out / "analytics-table.csv").metadata["seed"] == "3"

    def test_config_error_exit_2(self, tmp_path):
        conf = tmp_path / "bad.ini"
        conf.write_text("sigma2 = -1\n")
        assert cli.main(["tc", "--config", str(conf), "--out", str(tmp_path)]) == 2

    def test_numerical_error_exit_3(self, tmp_path):
        conf = tmp_path / "c.ini"
        conf.write_text("sigma2 = 400\nr = 0\ndt = 0.5\nhorizon = 500\n")
        assert cli.main(["simulate", "--config", str(conf), "--out", str(tmp_path / "o")]) == 3

    def test_missing_config_exit_4(self, tmp_path):
        assert cli.main(["tc", "--config", str(tmp_path / "missing.ini")]) == 4

    def test_unwritable_output_exit_4(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        conf = tmp_path / "c.ini"
        conf.write_text("r_list = 0.08\nN_list = 10\n")
        assert cli.main(["tc", "--config", str(conf), "--out", str(blocker / "sub")]) == 4


def test_sweep_reproduces_ergodicity_breaking():
    # medians scatter around the ensemble value by ~1.25 * sqrt(R_N / realizations)
    reals = 21
    cfg = small("ergodicity-sweep", r_list=(0.03, 0.05, 0.08), realizations=reals)
    tab = run(cfg)["ergodicity-sweep"]
    t = cfg.horizon
    for r in cfg.r_list:
        p = cfg.params.replace(r=r)
        rows = [row for row in tab.rows if row[0] == r]
        ns = [row[1] for row in rows]
        med = [row[2] for row in rows]
        limit = r / (r - p.mu) * p.x0
        se = [1.2533 * math.sqrt(an.analytic_relative_variance(p, n, t) / reals) * rows[0][3] for n in ns]
        for i in range(len(ns) - 1):
            assert med[i + 1] >= med[i] - 3 * (se[i] + se[i + 1])
        for m, s in zip(med, se):
            assert m <= limit + 3 * s
        # single walker: x0 scale, well below the ensemble value
        assert 0.5 * p.x0 < med[0] < 2.0 * p.x0 and med[0] < 0.8 * limit
