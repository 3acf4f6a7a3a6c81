"""Experiment runners behind the command-line harness.

Each runner maps an :class:`ExperimentConfig` to one or more
:class:`ResultTable` objects. Cell seeds are a pure function of
``(master_seed, r-index, N-index, realization)``, so results do not depend on
worker count or scheduling.
"""

from __future__ import annotations

import datetime as _dt
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .. import __version__
from .. import analytics as an
from ..core import RngStream, _worker_count, final_positions, generate_ensemble, sample_position_exact, simulate_euler
from ..ensemble import EnsembleSnapshot, median_over_realizations, top_share, top_share_series
from . import svg
from .config import ExperimentConfig
from .table import ResultTable

logger = logging.getLogger(__name__)

NAN = float("nan")


def cell_seed(master_seed: int, *indices: int) -> int:
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(i) for i in indices))
    return int(seq.generate_state(1, np.uint64)[0])


def _map(fn, items):
    items = list(items)
    workers = min(_worker_count(None), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _table(cfg: ExperimentConfig, experiment: str, columns, types) -> ResultTable:
    meta = {
        "experiment": experiment,
        "config_hash": cfg.config_hash(),
        "seed": str(cfg.master_seed),
        "version": __version__,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    return ResultTable(columns=list(columns), types=list(types), metadata=meta)


def renewal_path(params, dt: float, noise: np.ndarray, reset_steps: np.ndarray) -> np.ndarray:
    """Evaluate ``x0 exp(a (t - t_l) + sigma (W(t) - W(t_l)))`` on the full grid.

    ``noise`` are the standard-normal Euler increments, so ``W`` is the same
    Wiener path the Euler scheme saw.
    """
    n = len(noise)
    w = np.concatenate(([0.0], np.cumsum(noise) * math.sqrt(dt)))
    marker = np.zeros(n + 1, dtype=np.int64)
    marker[reset_steps] = reset_steps
    last = np.maximum.accumulate(marker)
    k = np.arange(n + 1)
    return params.x0 * np.exp(params.log_drift * (k - last) * dt + params.sigma * (w - w[last]))


def run_single_path(cfg: ExperimentConfig) -> ResultTable:
    """One Euler path next to the renewal solution driven by the same noise."""
    params, grid = cfg.params, cfg.grid
    path = simulate_euler(params, grid, RngStream(cfg.master_seed, 0), keep_noise=True)
    renewal = renewal_path(params, grid.dt, path.noise, path.reset_steps)
    is_reset = np.zeros(grid.n_steps + 1, dtype=bool)
    is_reset[path.reset_steps] = True

    idx = np.arange(0, grid.n_steps + 1, cfg.stride)
    if idx[-1] != grid.n_steps:
        idx = np.append(idx, grid.n_steps)
    table = _table(cfg, "single-path", ["t", "x_euler", "x_renewal", "is_reset"], ["float", "float", "float", "int"])
    for k in idx:
        table.append(k * grid.dt, path.positions[k], renewal[k], int(is_reset[k]))
    return table


def run_ergodicity_sweep(cfg: ExperimentConfig) -> ResultTable:
    """Median finite-sample average at the horizon for every ``(r, N)`` cell."""
    t = cfg.horizon
    base = cfg.params
    cells = [(ri, r, ni, n) for ri, r in enumerate(cfg.r_list) for ni, n in enumerate(cfg.N_list)]

    def one(cell):
        ri, r, ni, n = cell
        params = base.replace(r=r)
        averages = []
        for k in range(cfg.realizations):
            seed = cell_seed(cfg.master_seed, ri, ni, k)
            if cfg.method == "exact":
                x = sample_position_exact(params, t, RngStream(seed), size=n)
            else:
                x = final_positions(generate_ensemble(params, cfg.grid, n, seed, stride=cfg.grid.n_steps, workers=1))
            averages.append(x.mean())
        tc = an.critical_time(params, n)
        if not tc.finite:
            logger.info("r=%g N=%d: self-averaging at every t", r, n)
        elif t < tc.t_c:
            logger.warning("r=%g N=%d: horizon %g is below t_c=%g; sample average still ensemble-like", r, n, t, tc.t_c)
        mean_tl, _ = an.last_reset_moments(r, t)
        time_avg = params.x0 * math.exp(params.log_drift * (t - mean_tl))
        return (r, n, median_over_realizations(averages), an.moment(params, 1, t), time_avg)

    table = _table(
        cfg, "ergodicity-sweep",
        ["r", "N", "median_sample_avg", "analytic_mean", "time_avg_reference"],
        ["float", "int", "float", "float", "float"],
    )
    for row in _map(one, cells):
        table.append(*row)
    return table.sort("r", "N")


def run_self_averaging(cfg: ExperimentConfig) -> ResultTable:
    """Exact and approximate critical self-averaging times over the ``(r, N)`` grid."""
    base = cfg.params
    r_star = {n: (an.optimal_reset_rate(base, n) if n >= 2 else NAN) for n in cfg.N_list}
    table = _table(
        cfg, "self-averaging",
        ["r", "N", "t_c_exact", "tc_method", "t_c_frozen", "t_c_unstable", "regime", "r_star"],
        ["float", "int", "float", "str", "float", "float", "str", "float"],
    )
    for r in cfg.r_list:
        params = base.replace(r=r)
        regime = an.classify_regime(params)
        for n in cfg.N_list:
            tc = an.critical_time(params, n)
            if not tc.finite:
                logger.info("r=%g N=%d never loses self-averaging", r, n)
            frozen = an.critical_time_frozen_approx(params, n) if r < params.mu else NAN
            unstable = NAN
            if params.mu < r < an.threshold_rate(params, 2):
                unstable = an.critical_time_unstable_approx(params, n)
            table.append(r, n, tc.t_c, tc.method, frozen, unstable, regime.tag.value, r_star[n])
    return table.sort("r", "N")


def _quantiles(values, axis=0):
    return (
        np.median(values, axis=axis),
        np.quantile(values, 0.05, axis=axis),
        np.quantile(values, 0.95, axis=axis),
    )


def run_regimes_timeseries(cfg: ExperimentConfig) -> ResultTable:
    """Top-share time series for one resetting rate per regime (Euler paths)."""
    n = max(cfg.N_list)
    grid = cfg.grid
    jobs = [(gi, r, k) for gi, r in enumerate(cfg.regime_rates) for k in range(cfg.timeseries_realizations)]

    def one(job):
        gi, r, k = job
        ens = generate_ensemble(cfg.params.replace(r=r), grid, n, cell_seed(cfg.master_seed, gi, 0, k),
                                stride=cfg.stride, workers=1)
        positions = np.vstack([tr.positions for tr in ens])
        return gi, ens[0].times, top_share_series(positions, cfg.fraction)

    results = _map(one, jobs)
    table = _table(
        cfg, "regimes-timeseries",
        ["r", "t", "p_top_median", "p_top_q05", "p_top_q95", "regime"],
        ["float", "float", "float", "float", "float", "str"],
    )
    for gi, r in enumerate(cfg.regime_rates):
        series = np.vstack([s for g, _, s in results if g == gi])
        times = next(t for g, t, _ in results if g == gi)
        med, q05, q95 = _quantiles(series)
        label = an.classify_regime(cfg.params.replace(r=r)).tag.value
        for j, t in enumerate(times):
            table.append(r, t, med[j], q05[j], q95[j], label)
    return table.sort("r", "t")


def run_regimes_longtime(cfg: ExperimentConfig) -> ResultTable:
    """Top share at the horizon versus ``r`` with 5th/95th percentile bands (exact sampler)."""
    n = max(cfg.N_list)
    t = cfg.horizon

    def one(item):
        ri, r = item
        params = cfg.params.replace(r=r)
        shares = []
        for k in range(cfg.realizations):
            x = sample_position_exact(params, t, RngStream(cell_seed(cfg.master_seed, ri, 1, k)), size=n)
            shares.append(top_share(EnsembleSnapshot(t, x), cfg.fraction).p_top)
        med, q05, q95 = _quantiles(np.array(shares))
        return r, float(med), float(q05), float(q95), an.classify_regime(params).tag.value

    table = _table(
        cfg, "regimes-longtime",
        ["r", "p_top_median", "p_top_q05", "p_top_q95", "regime"],
        ["float", "float", "float", "float", "str"],
    )
    for row in _map(one, enumerate(cfg.r_list)):
        table.append(*row)
    return table.sort("r")


def describe_behavior(kind: str, value: float) -> str:
    if kind == "exponential":
        return f"exponential, rate {value:.6g}"
    if kind == "linear":
        return "linear, ~ r t"
    return f"convergent, limit {value:.6g}"


def run_analytics_table(cfg: ExperimentConfig) -> ResultTable:
    """Long-time moment behavior per ``(r, m)`` with a Monte Carlo check at the horizon."""
    t = cfg.horizon
    table = _table(
        cfg, "analytics-table",
        ["r", "m", "behavior", "rate_or_limit", "description", "analytic_moment", "mc_moment", "mc_stderr"],
        ["float", "int", "str", "float", "str", "float", "float", "float"],
    )
    for ri, r in enumerate(cfg.r_list):
        params = cfg.params.replace(r=r)
        for m in (1, 2):
            kind, value = an.moment_behavior(params, m)
            x = sample_position_exact(params, t, RngStream(cell_seed(cfg.master_seed, ri, m, 0)), size=cfg.mc_samples)
            xm = x**m
            table.append(
                r, m, kind, value, describe_behavior(kind, value), an.moment(params, m, t),
                xm.mean(), xm.std(ddof=1) / math.sqrt(len(xm)),
            )
    return table.sort("r", "m")


RUNNERS = {
    "single-path": [("single-path", run_single_path)],
    "ergodicity-sweep": [("ergodicity-sweep", run_ergodicity_sweep)],
    "self-averaging": [("self-averaging", run_self_averaging)],
    "regimes-timeseries": [("regimes-timeseries", run_regimes_timeseries), ("regimes-longtime", run_regimes_longtime)],
    "analytics-table": [("analytics-table", run_analytics_table)],
}


def run(cfg: ExperimentConfig) -> dict[str, ResultTable]:
    return {name: fn(cfg) for name, fn in RUNNERS[cfg.experiment]}


def _plot(name: str, table: ResultTable, cfg: ExperimentConfig, path: Path) -> None:
    mu, r2 = cfg.mu, 2 * cfg.mu + cfg.sigma2
    if name == "single-path":
        svg.line_chart(path, [("Euler", table.column("t"), table.column("x_euler")),
                              ("renewal", table.column("t"), table.column("x_renewal"))],
                       title="single path", xlabel="t", ylabel="x(t)")
    elif name == "ergodicity-sweep":
        series = []
        rs, ns = np.array(table.column("r")), np.array(table.column("N"))
        vals = np.array(table.column("median_sample_avg"))
        for n in sorted(set(ns)):
            sel = ns == n
            series.append((f"N={n}", rs[sel], vals[sel]))
        first = ns == ns.min()
        series.append(("ensemble", rs[first], np.array(table.column("analytic_mean"))[first]))
        series.append(("time avg", rs[first], np.array(table.column("time_avg_reference"))[first]))
        svg.line_chart(path, series, title=f"sample average at t={cfg.horizon:g}", xlabel="r",
                       ylabel="<x>_N", logy=True, vlines=(mu,))
    elif name == "self-averaging":
        rs, ns = np.array(table.column("r")), np.array(table.column("N"))
        tc = np.array(table.column("t_c_exact"))
        series = [(f"N={n}", rs[ns == n], tc[ns == n]) for n in sorted(set(ns))]
        svg.line_chart(path, series, title="critical self-averaging time", xlabel="r", ylabel="t_c",
                       logy=True, vlines=(mu, r2))
    elif name == "regimes-timeseries":
        rs = np.array(table.column("r"))
        t = np.array(table.column("t"))
        med = np.array(table.column("p_top_median"))
        series = [(f"r={r:g}", t[rs == r], med[rs == r]) for r in sorted(set(rs))]
        svg.line_chart(path, series, title="top-share over time", xlabel="t", ylabel="P_top")
    elif name == "regimes-longtime":
        rs = table.column("r")
        svg.line_chart(path, [("median", rs, table.column("p_top_median")),
                              ("5%", rs, table.column("p_top_q05")),
                              ("95%", rs, table.column("p_top_q95"))],
                       title=f"top-share at t={cfg.horizon:g}", xlabel="r", ylabel="P_top", vlines=(mu, r2))
    # analytics-table: no chart


def write_outputs(cfg: ExperimentConfig, tables: dict[str, ResultTable], out_dir, plots: bool = False) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, table in tables.items():
        written.append(table.write(out / f"{name}.csv"))
        if plots and name != "analytics-table":
            svg_path = out / f"{name}.svg"
            _plot(name, table, cfg, svg_path)
            written.append(svg_path)
    meta = out / "meta.txt"
    meta.write_text(
        f"config_hash: {cfg.config_hash()}\nseed: {cfg.master_seed}\nversion: {__version__}\n\n{cfg.canonical()}\n",
        encoding="utf-8",
    )
    written.append(meta)
    return written
