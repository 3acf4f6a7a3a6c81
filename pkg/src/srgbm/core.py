"""Sample-path generation for geometric Brownian motion with Poissonian resetting.

Two independent routes are provided:

* :func:`simulate_euler` discretizes the Langevin dynamics on a uniform grid.
  At every step the walker either jumps back to ``x0`` (probability ``r*dt``)
  or takes a multiplicative Euler step ``x <- x * (1 + mu*dt + sigma*sqrt(dt)*eta)``.
* :func:`sample_position_exact` draws ``x(t)`` from its exact law via the renewal
  representation: only the age since the last reset matters, and between resets
  the walker is plain GBM.

Randomness comes from :class:`RngStream`, a Philox (counter-based) generator keyed
by ``(master_seed, stream_id)``, so ensembles are reproducible under any
execution order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DiscretizationError, ParameterError

__all__ = [
    "ModelParams",
    "SimGrid",
    "RngStream",
    "Trajectory",
    "simulate_euler",
    "sample_last_reset_time",
    "sample_position_exact",
    "generate_ensemble",
    "final_positions",
]

# Independent sub-streams within one RngStream.
_NOISE_CHANNEL = 0
_RESET_CHANNEL = 1

# Steps processed per vectorized block; bounds memory for 1e6+ step paths.
_CHUNK = 1 << 16


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the reset GBM.

    Parameters
    ----------
    mu : float
        Drift rate.
    sigma2 : float
        Noise variance ``sigma**2``.
    r : float
        Poissonian resetting rate.
    x0 : float
        Initial and reset position.
    """

    mu: float
    sigma2: float
    r: float
    x0: float = 1.0

    def __post_init__(self):
        for name in ("mu", "sigma2", "r", "x0"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)):
                raise ParameterError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.sigma2 < 0:
            raise ParameterError(f"sigma2 must be >= 0, got {self.sigma2}")
        if self.r < 0:
            raise ParameterError(f"r must be >= 0, got {self.r}")
        if self.x0 <= 0:
            raise ParameterError(f"x0 must be > 0, got {self.x0}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def log_drift(self) -> float:
        """Ito-corrected drift ``mu - sigma2/2`` of ``log x``."""
        return self.mu - 0.5 * self.sigma2

    def replace(self, **changes) -> "ModelParams":
        fields_ = {"mu": self.mu, "sigma2": self.sigma2, "r": self.r, "x0": self.x0}
        fields_.update(changes)
        return ModelParams(**fields_)


@dataclass(frozen=True)
class SimGrid:
    """Uniform time grid ``t_k = k * dt`` for ``k = 0..n_steps``."""

    dt: float
    n_steps: int

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ParameterError(f"dt must be finite and > 0, got {self.dt}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ParameterError(f"n_steps must be an integer >= 1, got {self.n_steps}")
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @classmethod
    def from_horizon(cls, t: float, dt: float) -> "SimGrid":
        n = int(round(t / dt))
        return cls(dt=dt, n_steps=max(n, 1))

    @property
    def horizon(self) -> float:
        return self.n_steps * self.dt

    def check_rate(self, r: float) -> None:
        if r * self.dt >= 1.0:
            raise ParameterError(
                f"r*dt = {r * self.dt:g} is not a valid per-step reset probability; "
                "reduce dt"
            )


@dataclass(frozen=True)
class RngStream:
    """Deterministic random source for one trajectory.

    The pair ``(master_seed, stream_id)`` is hashed through
    :class:`numpy.random.SeedSequence` into the key of a Philox generator.
    Distinct stream ids give statistically independent sequences; the same
    pair always reproduces the same variates.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if int(self.master_seed) != self.master_seed or self.master_seed < 0:
            raise ParameterError(f"master_seed must be a non-negative integer, got {self.master_seed}")
        if self.master_seed >= 2**64:
            raise ParameterError("master_seed must fit in 64 bits")
        if int(self.stream_id) != self.stream_id or self.stream_id < 0:
            raise ParameterError(f"stream_id must be a non-negative integer, got {self.stream_id}")

    def generator(self, channel: int = _NOISE_CHANNEL) -> np.random.Generator:
        seq = np.random.SeedSequence(int(self.master_seed), spawn_key=(int(self.stream_id), channel))
        return np.random.Generator(np.random.Philox(seq))


@dataclass
class Trajectory:
    """A discretized sample path.

    ``reset_steps`` holds the step indices ``k`` (1-based grid index) at which a
    reset occurred, whether or not that step was recorded under striding.
    """

    times: np.ndarray
    positions: np.ndarray
    reset_steps: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    noise: np.ndarray | None = None

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> float:
        return float(self.positions[-1])


def simulate_euler(
    params: ModelParams,
    grid: SimGrid,
    stream: RngStream,
    stride: int = 1,
    keep_noise: bool = False,
) -> Trajectory:
    """Integrate one reset-GBM path with the Euler scheme.

    Parameters
    ----------
    params : ModelParams
    grid : SimGrid
        ``r * grid.dt`` must be < 1.
    stream : RngStream
    stride : int, optional
        Record every ``stride``-th grid point (the final point is always kept).
    keep_noise : bool, optional
        Also return the standard-normal increments ``eta_k`` (length ``n_steps``),
        so the renewal solution can be evaluated on the same Wiener path.

    Returns
    -------
    Trajectory

    Raises
    ------
    ParameterError
        If ``r*dt >= 1`` or ``stride < 1``.
    DiscretizationError
        If a non-reset step would produce ``x <= 0``.
    """
    grid.check_rate(params.r)
    if stride < 1:
        raise ParameterError(f"stride must be >= 1, got {stride}")

    dt, n = grid.dt, grid.n_steps
    p_reset = params.r * dt
    drift = params.mu * dt
    vol = params.sigma * math.sqrt(dt)
    log_x0 = math.log(params.x0)

    g_noise = stream.generator(_NOISE_CHANNEL)
    g_reset = stream.generator(_RESET_CHANNEL)

    record = np.arange(0, n + 1, stride)
    if record[-1] != n:
        record = np.append(record, n)
    positions = np.empty(len(record))
    positions[0] = params.x0
    resets = []
    noise = np.empty(n) if keep_noise else None

    log_x = log_x0
    rec_ptr = 1
    for start in range(0, n, _CHUNK):
        m = min(_CHUNK, n - start)
        eta = g_noise.standard_normal(m)
        u = g_reset.random(m)
        is_reset = u < p_reset
        factor = 1.0 + drift + vol * eta
        bad = (factor <= 0.0) & ~is_reset
        if bad.any():
            k = start + int(np.argmax(bad)) + 1
            raise DiscretizationError(
                f"Euler step {k} would give x <= 0 (sigma*sqrt(dt) = {vol:g}); dt is too coarse"
            )
        log_f = np.where(is_reset, 0.0, np.log(np.where(is_reset, 1.0, factor)))
        cum = np.cumsum(log_f)
        marker = np.where(is_reset, np.arange(m), -1)
        last = np.maximum.accumulate(marker)
        base = np.where(last >= 0, log_x0 - cum[np.maximum(last, 0)], log_x)
        chunk_log_x = base + cum

        steps = np.arange(start + 1, start + m + 1)
        if is_reset.any():
            resets.append(steps[is_reset])
        # record[rec_ptr:] are the grid indices still to be written
        hi = np.searchsorted(record, start + m, side="right")
        want = record[rec_ptr:hi]
        if len(want):
            local = want - start - 1
            vals = np.exp(chunk_log_x[local])
            vals[is_reset[local]] = params.x0
            positions[rec_ptr:hi] = vals
            rec_ptr = hi
        log_x = log_x0 if is_reset[-1] else chunk_log_x[-1]
        if keep_noise:
            noise[start:start + m] = eta

    reset_steps = np.concatenate(resets) if resets else np.empty(0, dtype=np.int64)
    return Trajectory(
        times=record * dt,
        positions=positions,
        reset_steps=reset_steps.astype(np.int64),
        noise=noise,
    )


def _check_time(t: float) -> float:
    if not (math.isfinite(t) and t >= 0):
        raise ParameterError(f"t must be finite and >= 0, got {t}")
    return float(t)


def _age(t: float, r: float, gen: np.random.Generator, size) -> np.ndarray | float:
    """Time elapsed since the last reset, ``min(E, t)`` with ``E ~ Exp(r)``."""
    if r == 0.0:
        return np.full(size, t) if size is not None else t
    e = gen.exponential(1.0 / r, size=size)
    return np.minimum(e, t)


def sample_last_reset_time(t: float, r: float, stream: RngStream, size=None):
    """Draw the epoch ``t_l`` of the last reset before ``t``.

    Draws ``E ~ Exp(r)`` and returns ``0`` when ``E >= t`` (no reset occurred,
    probability ``exp(-r t)``), otherwise ``t - E``.

    Returns a float when ``size`` is None, else an array.
    """
    t = _check_time(t)
    if not (math.isfinite(r) and r >= 0):
        raise ParameterError(f"r must be finite and >= 0, got {r}")
    age = _age(t, float(r), stream.generator(_RESET_CHANNEL), size)
    t_l = t - age
    if size is None:
        return float(t_l)
    return t_l


def sample_position_exact(params: ModelParams, t: float, stream: RngStream, size=None):
    """Draw ``x(t)`` from its exact law (no discretization error).

    ``x(t) = x0 * exp(a*A + sigma*sqrt(A)*Z)`` where ``a = mu - sigma2/2``,
    ``A = t - t_l`` is the age since the last reset and ``Z ~ N(0, 1)``.
    """
    t = _check_time(t)
    age = _age(t, params.r, stream.generator(_RESET_CHANNEL), size)
    z = stream.generator(_NOISE_CHANNEL).standard_normal(size)
    x = params.x0 * np.exp(params.log_drift * age + params.sigma * np.sqrt(age) * z)
    if size is None:
        return float(x)
    return x


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("SRGBM_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def generate_ensemble(
    params: ModelParams,
    grid: SimGrid,
    n_traj: int,
    master_seed: int,
    stride: int = 1,
    workers: int | None = None,
) -> list[Trajectory]:
    """Simulate ``n_traj`` independent Euler paths.

    Trajectory ``i`` is driven by ``RngStream(master_seed, i)``, so the output
    does not depend on ``workers`` or scheduling order. ``workers`` defaults to
    ``$SRGBM_WORKERS`` or the CPU count.
    """
    if int(n_traj) != n_traj or n_traj < 1:
        raise ParameterError(f"n_traj must be an integer >= 1, got {n_traj}")
    grid.check_rate(params.r)

    def one(i):
        return simulate_euler(params, grid, RngStream(master_seed, i), stride=stride)

    n_workers = min(_worker_count(workers), int(n_traj))
    if n_workers == 1:
        return [one(i) for i in range(n_traj)]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(one, range(n_traj)))


def final_positions(trajectories) -> np.ndarray:
    return np.array([tr.positions[-1] for tr in trajectories])
