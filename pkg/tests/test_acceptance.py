"""Exit criteria. Run with ``pytest tests/test_acceptance.py -v -rA``.

Each test asserts its criterion verbatim, including the wall-clock limit, and
records the measured quantities. Seeds are fixed in advance.
"""

import math
import time

import numpy as np
import pytest
from scipy import stats

from srgbm import analytics as an
from srgbm.core import ModelParams, RngStream, SimGrid, final_positions, generate_ensemble, sample_position_exact, simulate_euler
from srgbm.ensemble import (
    EnsembleSnapshot,
    empirical_relative_variance,
    growth_rate_estimate,
    top_share_series,
)
from srgbm.harness.experiments import cell_seed

FIG1 = ModelParams(mu=0.05, sigma2=0.02, r=0.16)
FIG3 = ModelParams(mu=0.02, sigma2=0.01, r=0.0)
SEED = 20200917
RATES = (0.01, 0.02, 0.03, 0.05, 0.08)

pytestmark = pytest.mark.slow


class Clock:
    def __init__(self, limit):
        self.limit = limit
        self.start = time.perf_counter()

    def check(self, record):
        elapsed = time.perf_counter() - self.start
        record("runtime_s", round(elapsed, 2))
        assert elapsed < self.limit, f"runtime {elapsed:.1f} s exceeds {self.limit} s"


def _expected_behavior(r, m):
    r_m = m * FIG3.mu + 0.5 * m * (m - 1) * FIG3.sigma2
    if math.isclose(r, r_m, rel_tol=0, abs_tol=1e-12):
        return "linear"
    return "exponential" if r < r_m else "convergent"


@pytest.mark.acceptance("1a", "moment regime classification, m in {1,2} over five rates")
def test_c1a_moment_classification(record_property):
    clock = Clock(1.0)
    table = {(0.01, 1): "exponential", (0.02, 1): "linear", (0.03, 1): "convergent",
             (0.05, 1): "convergent", (0.08, 1): "convergent",
             (0.01, 2): "exponential", (0.02, 2): "exponential", (0.03, 2): "exponential",
             (0.05, 2): "linear", (0.08, 2): "convergent"}
    wrong = []
    for r in RATES:
        for m in (1, 2):
            kind, value = an.moment_behavior(FIG3.replace(r=r), m)
            assert _expected_behavior(r, m) == table[(r, m)]
            if kind != table[(r, m)]:
                wrong.append((r, m, kind))
            r_m = an.threshold_rate(FIG3, m)
            if kind == "exponential":
                assert value == pytest.approx(r_m - r, abs=1e-15)
            elif kind == "convergent":
                assert value == pytest.approx(r / (r - r_m), rel=1e-14)
            else:
                assert value == r
    record_property("misclassified", len(wrong))
    assert not wrong
    clock.check(record_property)


@pytest.mark.acceptance("1b", "log-slope of analytic moment on t in [100,200] equals r_m - r within 1e-9")
def test_c1b_moment_log_slope(record_property):
    clock = Clock(1.0)
    t = np.linspace(100.0, 200.0, 101)
    worst = 0.0
    for r in RATES:
        for m in (1, 2):
            p = FIG3.replace(r=r)
            if an.moment_behavior(p, m)[0] != "exponential":
                continue
            logs = np.array([an.log_moment(p, m, s) for s in t])
            slope = np.polyfit(t, logs, 1)[0]
            worst = max(worst, abs(slope - (an.threshold_rate(p, m) - r)))
    record_property("max_slope_error", f"{worst:.3e}")
    clock.check(record_property)
    assert worst < 1e-9


@pytest.mark.acceptance("2", "Euler ensemble mean at t=50 within 3 SE of the m=1 closed form")
def test_c2_euler_mean(record_property):
    clock = Clock(60.0)
    grid = SimGrid.from_horizon(50.0, 0.01)
    x = final_positions(generate_ensemble(FIG1, grid, 10_000, master_seed=SEED, stride=grid.n_steps))
    exact = an.moment(FIG1, 1, 50.0)
    se = x.std(ddof=1) / math.sqrt(x.size)
    record_property("mc_mean", round(float(x.mean()), 5))
    record_property("closed_form", round(exact, 5))
    record_property("z", round(float((x.mean() - exact) / se), 2))
    assert FIG1.r / (FIG1.r - FIG1.mu) == pytest.approx(1.4545, abs=1e-4)
    assert abs(x.mean() - exact) < 3 * se
    clock.check(record_property)


@pytest.mark.acceptance("3", "stationary tail slope -alpha-1 within 0.3 and KS < 0.01 on 1e6 draws")
def test_c3_stationary_tail(record_property):
    clock = Clock(120.0)
    p = FIG3.replace(r=0.1)
    alpha = an.alpha_exponent(p)
    assert alpha == pytest.approx(3.2170, abs=1e-4)
    x = sample_position_exact(p, 500.0, RngStream(SEED, 3), size=1_000_000)

    tail = x[x > 3 * p.x0]
    edges = np.geomspace(3 * p.x0, tail.max() * (1 + 1e-12), 41)
    counts, _ = np.histogram(tail, bins=edges)
    density = counts / (x.size * np.diff(edges))
    centers = np.sqrt(edges[:-1] * edges[1:])
    keep = counts >= 10
    slope = np.polyfit(np.log(centers[keep]), np.log(density[keep]), 1)[0]
    ks = stats.kstest(x, lambda v: an.stationary_cdf(p, v)).statistic

    record_property("tail_slope", round(float(slope), 4))
    record_property("target", round(-alpha - 1, 4))
    record_property("ks", f"{ks:.4g}")
    assert abs(slope - (-alpha - 1)) <= 0.3
    assert ks < 0.01
    clock.check(record_property)


@pytest.mark.acceptance("4", "time-average growth rate is zero; N=1 moments match closed forms")
def test_c4_time_average_growth(record_property):
    clock = Clock(300.0)
    t, reals = 1e4, 100
    grid = SimGrid.from_horizon(t, 0.01)

    # N = 1: Euler paths
    g1 = np.empty(reals)
    for k in range(reals):
        path = simulate_euler(FIG1, grid, RngStream(cell_seed(SEED, 4, 1, k)), stride=grid.n_steps)
        g1[k] = growth_rate_estimate(EnsembleSnapshot(t, path.positions[-1:]), FIG1.x0)
    # N = 100: exact sampler
    g100 = np.array([
        growth_rate_estimate(EnsembleSnapshot(t, sample_position_exact(FIG1, t, RngStream(cell_seed(SEED, 4, 100, k)), size=100)), FIG1.x0)
        for k in range(reals)
    ])
    med1, med100 = float(np.median(np.abs(g1))), float(np.median(np.abs(g100)))
    record_property("median_abs_g_N1", f"{med1:.3e}")
    record_property("median_abs_g_N100", f"{med100:.3e}")
    assert med1 < 0.005 and med100 < 0.005

    mean, var = an.growth_estimator_mean(FIG1, t), an.growth_estimator_variance(FIG1, t)
    s2 = g1.var(ddof=1)
    se_mean = g1.std(ddof=1) / math.sqrt(reals)
    se_var = math.sqrt((np.mean((g1 - g1.mean()) ** 4) - s2 * s2) / reals)
    record_property("z_mean", round(float((g1.mean() - mean) / se_mean), 2))
    record_property("z_var", round(float((s2 - var) / se_var), 2))
    assert abs(g1.mean() - mean) < 3 * se_mean
    assert abs(s2 - var) < 3 * se_var
    clock.check(record_property)


@pytest.mark.acceptance("5a", "optimal_reset_rate at N=1e4 is 0.02 +- 0.001")
def test_c5a_optimal_rate(record_property):
    clock = Clock(10.0)
    r_star = an.optimal_reset_rate(FIG3, 10**4)
    record_property("r_star", round(r_star, 6))
    assert abs(r_star - 0.02) <= 0.001
    clock.check(record_property)


@pytest.mark.acceptance("5b", "exact t_c within 5% of the closed approximations, N >= 1e3, 0.1 mu from boundaries")
def test_c5b_approximation_bridge(record_property):
    clock = Clock(10.0)
    mu, r2 = FIG3.mu, 2 * FIG3.mu + FIG3.sigma2
    margin = 0.1 * mu
    frozen = np.linspace(0.0, mu - margin, 19)
    unstable = np.linspace(mu + margin, r2 - margin, 27)
    worst, where = 0.0, None
    for n in (10**3, 10**4):
        for r in frozen:
            p = FIG3.replace(r=float(r))
            gap = abs(an.critical_time_frozen_approx(p, n) / an.critical_time(p, n).t_c - 1)
            if gap > worst:
                worst, where = gap, (float(r), n)
        for r in unstable:
            p = FIG3.replace(r=float(r))
            gap = abs(an.critical_time_unstable_approx(p, n) / an.critical_time(p, n).t_c - 1)
            if gap > worst:
                worst, where = gap, (float(r), n)
    record_property("max_gap", f"{worst:.4f}")
    record_property("at_r_N", where)
    clock.check(record_property)
    assert worst < 0.05


@pytest.mark.acceptance("6", "stable-regime relative variance R_100 = 0.005 within 20% over 1e3 realizations")
def test_c6_stable_relative_variance(record_property):
    clock = Clock(300.0)
    p = FIG3.replace(r=0.08)
    t, n, reals = 2000.0, 100, 1000
    analytic = an.analytic_relative_variance(p, n, t)
    assert analytic == pytest.approx(0.005, rel=1e-9)
    x = sample_position_exact(p, t, RngStream(SEED, 6), size=(reals, n))
    emp = empirical_relative_variance(x.mean(axis=1))
    record_property("empirical", f"{emp:.5f}")
    assert abs(emp / analytic - 1) < 0.2
    clock.check(record_property)


@pytest.mark.acceptance("7", "r=0.051: N=18 self-averages for all t, N=17 does not")
def test_c7_self_averaging_threshold(record_property):
    clock = Clock(1.0)
    p = FIG3.replace(r=0.051)
    ts = np.logspace(-3, 7, 4001)
    peak18 = max(an.analytic_relative_variance(p, 18, t) for t in ts)
    peak17 = max(an.analytic_relative_variance(p, 17, t) for t in ts)
    record_property("max_R_18", round(peak18, 5))
    record_property("max_R_17", round(peak17, 5))
    assert peak18 < 1 < peak17
    assert an.min_self_averaging_sample(p) == 18
    clock.check(record_property)


def _top_share_paths(r, seed_index, reals, n=1000, t=1000.0, dt=0.01, stride=100):
    grid = SimGrid.from_horizon(t, dt)
    out = []
    for k in range(reals):
        ens = generate_ensemble(FIG3.replace(r=r), grid, n, cell_seed(SEED, 8, seed_index, k), stride=stride)
        out.append(top_share_series(np.vstack([tr.positions for tr in ens]), 0.01))
    return ens[0].times, np.array(out)


@pytest.mark.acceptance("8", "regime phenomenology of the top-1% share at N=1e3, t=1e3")
def test_c8_regime_phenomenology(record_property):
    clock = Clock(600.0)
    reals = 5

    times, frozen = _top_share_paths(0.01, 0, reals)
    med = np.median(frozen, axis=0)
    blocks = np.array([b.mean() for b in np.array_split(med[1:], 10)])
    late = med[times >= 0.9 * times[-1]].mean()
    record_property("frozen_late_mean", round(float(late), 3))
    frozen_ok = late >= 0.8 and bool(np.all(np.diff(blocks) >= -0.05))

    times, unstable = _top_share_paths(0.03, 1, reals)
    tc = an.critical_time(FIG3.replace(r=0.03), 1000).t_c
    after = times >= tc
    ranges = unstable[:, after].max(axis=1) - unstable[:, after].min(axis=1)
    record_property("unstable_median_range", round(float(np.median(ranges)), 3))
    unstable_ok = np.median(ranges) > 0.4

    times, stable = _top_share_paths(0.08, 2, reals)
    burn = max(10 / 0.08, 0.5 * times[-1])
    sd = stable[:, times >= burn].std(axis=1)
    record_property("stable_median_sd", round(float(np.median(sd)), 4))
    stable_ok = np.median(sd) < 0.1

    assert frozen_ok and unstable_ok and stable_ok
    clock.check(record_property)


@pytest.mark.acceptance("9", "Euler vs exact sampler KS < 0.02 at t=10, dt=1e-3")
def test_c9_euler_vs_exact(record_property):
    clock = Clock(60.0)
    grid = SimGrid.from_horizon(10.0, 1e-3)
    euler = final_positions(generate_ensemble(FIG1, grid, 10_000, master_seed=SEED + 9, stride=grid.n_steps))
    exact = sample_position_exact(FIG1, 10.0, RngStream(SEED, 9), size=10_000)
    ks = stats.ks_2samp(euler, exact).statistic
    record_property("ks", f"{ks:.4f}")
    assert ks < 0.02
    clock.check(record_property)
