"""Closed-form results for reset GBM.

Moments, the stationary density and its tail exponent, growth-rate estimator
statistics, the critical self-averaging time ``t_c`` and the resetting rate that
minimizes it, and the three-way regime classification.

Conventions: ``a = mu - sigma2/2`` is the drift of ``log x`` and
``r_m = m*mu + m*(m-1)*sigma2/2`` is the growth rate of the m-th moment without
resetting.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import ModelParams
from .exceptions import BracketingError, NumericalError, ParameterError, QuadratureError, RegimeError
from .solvers import bisect, golden_section

logger = logging.getLogger(__name__)

__all__ = [
    "Regime",
    "RegimeReport",
    "StationaryLaw",
    "CriticalTime",
    "threshold_rate",
    "moment",
    "log_moment",
    "moment_behavior",
    "alpha_exponent",
    "stationary_law",
    "gbm_propagator",
    "transient_pdf",
    "stationary_pdf",
    "stationary_cdf",
    "last_reset_moments",
    "growth_estimator_mean",
    "growth_estimator_variance",
    "moment_ratio",
    "log_moment_ratio",
    "stationary_moment_ratio",
    "analytic_relative_variance",
    "critical_time",
    "critical_time_frozen_approx",
    "critical_time_unstable_approx",
    "min_self_averaging_sample",
    "optimal_reset_rate",
    "classify_regime",
]

# |r - r_m| below this (times max(1, r_m)) is treated as the degenerate point.
DEGENERATE_TOL = 1e-9


class Regime(str, enum.Enum):
    FROZEN = "Frozen"
    UNSTABLE_ANNEALED = "UnstableAnnealed"
    STABLE_ANNEALED = "StableAnnealed"


@dataclass(frozen=True)
class RegimeReport:
    tag: Regime
    r_1: float
    r_2: float
    boundary: bool = False


@dataclass(frozen=True)
class StationaryLaw:
    """Two-branch power-law steady state.

    ``pdf(x) = norm * (x/x0)**(left_exponent)`` for ``x <= x0`` and
    ``norm * (x/x0)**(-alpha - 1)`` for ``x > x0``.
    """

    alpha: float
    beta: float
    norm: float
    x0: float
    unscaled_norm_ratio: float

    @property
    def left_exponent(self) -> float:
        return self.beta - 1.0


@dataclass(frozen=True)
class CriticalTime:
    t_c: float
    method: str  # exact_root | frozen_approx | unstable_approx | never

    @property
    def finite(self) -> bool:
        return math.isfinite(self.t_c)


def _check_order(m) -> int:
    if int(m) != m or m < 1:
        raise ParameterError(f"moment order must be an integer >= 1, got {m}")
    return int(m)


def _check_t(t: float, strict: bool = False) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0 or (strict and t == 0):
        raise ParameterError(f"t must be finite and {'>' if strict else '>='} 0, got {t}")
    return t


def threshold_rate(params: ModelParams, m: int) -> float:
    """Resetting rate ``r_m = m*mu + m*(m-1)*sigma2/2`` at which moment ``m`` stops diverging."""
    m = _check_order(m)
    return m * params.mu + 0.5 * m * (m - 1) * params.sigma2


def _is_degenerate(r: float, r_m: float) -> bool:
    return abs(r - r_m) < DEGENERATE_TOL * max(1.0, abs(r_m))


def log_moment(params: ModelParams, m: int, t: float) -> float:
    """``log <x^m(t)>``, finite for arbitrarily large ``t``."""
    m = _check_order(m)
    t = _check_t(t)
    r, r_m = params.r, threshold_rate(params, m)
    base = m * math.log(params.x0)
    k = r_m - r
    if t == 0.0:
        return base
    if _is_degenerate(r, r_m):
        return base + math.log1p(r * t)
    kt = k * t
    if kt > 30.0:
        # r_m * e^{kt} - r  =  e^{kt} * (r_m - r e^{-kt})
        return base + kt + math.log(r_m - r * math.exp(-kt)) - math.log(k)
    # <x^m>/x0^m = 1 + r_m * expm1(kt) / k, well conditioned near k = 0
    return base + math.log1p(r_m * t * _exprel(kt))


def _exprel(z: float) -> float:
    """``(e^z - 1)/z`` with the removable singularity at 0."""
    if abs(z) < 1e-8:
        return 1.0 + 0.5 * z
    return math.expm1(z) / z


def moment(params: ModelParams, m: int, t: float) -> float:
    """m-th moment ``<x^m(t)>``.

    ``x0^m * (r_m * exp((r_m - r) t) - r) / (r_m - r)``, and ``x0^m * (1 + r t)``
    at the degenerate point ``r = r_m``. May return ``inf`` when the moment
    overflows a double.
    """
    lm = log_moment(params, m, t)
    if lm > 709.0:
        return math.inf
    return math.exp(lm)


def moment_behavior(params: ModelParams, m: int) -> tuple[str, float]:
    """Long-time behavior of moment ``m``.

    Returns ``("exponential", r_m - r)``, ``("linear", r)`` or
    ``("convergent", r / (r - r_m))``; the number is the growth rate, the
    linear slope coefficient, or the limit of ``<x^m>/x0^m``.
    """
    r, r_m = params.r, threshold_rate(params, m)
    if _is_degenerate(r, r_m):
        return "linear", r
    if r < r_m:
        return "exponential", r_m - r
    return "convergent", r / (r - r_m)


def _require_noise(params: ModelParams) -> None:
    if params.sigma2 == 0.0:
        raise ParameterError("sigma2 = 0: the stationary law and tail exponent are undefined")


def _discriminant(params: ModelParams, s: float) -> float:
    a = params.log_drift
    return math.sqrt(a * a + 2.0 * params.sigma2 * s)


def alpha_exponent(params: ModelParams) -> float:
    """Right-tail exponent: positive root of ``(sigma2/2) z^2 + a z - r = 0``."""
    _require_noise(params)
    a = params.log_drift
    root = _discriminant(params, params.r)
    # Cancellation-free form of (root - a)/sigma2 when a > 0.
    if a > 0:
        return 2.0 * params.r / (root + a)
    return (root - a) / params.sigma2


def _beta_exponent(params: ModelParams) -> float:
    a = params.log_drift
    root = _discriminant(params, params.r)
    if a < 0:
        return 2.0 * params.r / (root - a)
    return (root + a) / params.sigma2


def stationary_law(params: ModelParams) -> StationaryLaw:
    """Exponents and numerically computed normalization of the steady state."""
    _require_noise(params)
    if params.r <= 0:
        raise ParameterError("r = 0: no stationary state exists")
    alpha = alpha_exponent(params)
    beta = _beta_exponent(params)
    x0 = params.x0

    def left(x):
        return (x / x0) ** (beta - 1.0)

    # Integrate the right branch in u = x0/x to map (x0, inf) onto (0, 1].
    left_mass, e1 = integrate.quad(left, 0.0, x0, epsabs=0.0, epsrel=1e-12, limit=200)
    right_mass, e2 = integrate.quad(lambda u: x0 * u ** (alpha - 1.0), 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
    total = left_mass + right_mass
    if not math.isfinite(total) or total <= 0 or (e1 + e2) > 1e-9 * total:
        raise QuadratureError(f"stationary normalization did not converge (mass={total}, err={e1 + e2})")
    norm = 1.0 / total
    unscaled = params.r / _discriminant(params, params.r)
    ratio = norm / unscaled
    if abs(ratio - 1.0) > 1e-6:
        logger.warning("stationary normalization is %.12g x the unscaled closed-form prefactor", ratio)
    return StationaryLaw(alpha=alpha, beta=beta, norm=norm, x0=x0, unscaled_norm_ratio=ratio)


def stationary_pdf(params: ModelParams, x, law: StationaryLaw | None = None):
    """Steady-state density, zero for ``x <= 0``. Accepts scalars or arrays."""
    law = law or stationary_law(params)
    xs = np.asarray(x, dtype=float)
    out = np.zeros_like(xs)
    pos = xs > 0
    ratio = xs[pos] / law.x0
    out[pos] = law.norm * np.where(ratio > 1.0, ratio ** (-law.alpha - 1.0), ratio ** (law.beta - 1.0))
    return float(out) if np.ndim(x) == 0 else out


def stationary_cdf(params: ModelParams, x, law: StationaryLaw | None = None):
    """Cumulative distribution of the steady state (closed-form branch integrals)."""
    law = law or stationary_law(params)
    xs = np.asarray(x, dtype=float)
    ratio = np.clip(xs / law.x0, 0.0, None)
    c = law.norm * law.x0
    below = c * ratio**law.beta / law.beta
    with np.errstate(divide="ignore"):
        above = c / law.beta + c * (1.0 - np.where(ratio > 0, ratio, 1.0) ** (-law.alpha)) / law.alpha
    out = np.where(ratio <= 1.0, below, above)
    return float(out) if np.ndim(x) == 0 else out


def gbm_propagator(params: ModelParams, x, t: float):
    """Log-normal density of reset-free GBM at time ``t`` (zero for ``x <= 0``)."""
    _require_noise(params)
    t = _check_t(t, strict=True)
    xs = np.asarray(x, dtype=float)
    out = np.zeros_like(xs)
    pos = xs > 0
    var = params.sigma2 * t
    z = np.log(xs[pos] / params.x0) - params.log_drift * t
    out[pos] = np.exp(-z * z / (2.0 * var)) / (xs[pos] * math.sqrt(2.0 * math.pi * var))
    return float(out) if np.ndim(x) == 0 else out


def transient_pdf(params: ModelParams, x: float, t: float, rtol: float = 1e-8) -> float:
    """Density of ``x(t)`` at finite ``t`` from the renewal formula.

    ``exp(-r t) P0(x, t) + r * int_0^t exp(-r u) P0(x, u) du``, the integral by
    adaptive quadrature. Raises :class:`QuadratureError` if the estimated
    relative error exceeds ``max(rtol, 1e-6)``.
    """
    _require_noise(params)
    t = _check_t(t, strict=True)
    x = float(x)
    if x <= 0:
        return 0.0
    r = params.r
    head = math.exp(-r * t) * gbm_propagator(params, x, t)
    if r == 0.0:
        return head

    lx = math.log(x / params.x0)
    a, s2 = params.log_drift, params.sigma2

    def integrand(u):
        if u <= 0.0:
            return 0.0
        z = lx - a * u
        return math.exp(-r * u - z * z / (2.0 * s2 * u)) / math.sqrt(2.0 * math.pi * s2 * u)

    # The integrand peaks near u* where the Gaussian in log x is centered; hint quad there.
    points = []
    if a != 0.0 and 0.0 < lx / a < t:
        points.append(lx / a)
    val, err, info = integrate.quad(
        integrand, 0.0, t, epsabs=0.0, epsrel=rtol, limit=500, points=points or None, full_output=1
    )[:3]
    integral = r * val / x
    total = head + integral
    tol = max(rtol, 1e-6)
    if not math.isfinite(total) or (total > 0 and r * err / x > tol * total):
        raise QuadratureError(f"transient_pdf quadrature at x={x:g}, t={t:g}: rel. error {r * err / x / total:.2e} > {tol:g}")
    return total


def last_reset_moments(r: float, t: float) -> tuple[float, float]:
    """Mean and variance of the last reset epoch ``t_l`` given observation time ``t``.

    ``<t_l> = t - (1 - e^{-rt})/r`` and
    ``Var[t_l] = 1/r^2 - 2 t e^{-rt}/r - e^{-2rt}/r^2``.
    """
    t = _check_t(t)
    if not (math.isfinite(r) and r >= 0):
        raise ParameterError(f"r must be finite and >= 0, got {r}")
    if r == 0.0 or t == 0.0:
        return 0.0, 0.0
    u = r * t
    mean = t * (1.0 + math.expm1(-u) / u)
    if u < 1e-3:
        var = t * t * (u / 3.0 - u * u / 3.0 + 11.0 * u**3 / 60.0)
    else:
        var = (1.0 - 2.0 * u * math.exp(-u) - math.exp(-2.0 * u)) / (r * r)
    return mean, var


def growth_estimator_mean(params: ModelParams, t: float) -> float:
    """Mean of the single-trajectory growth estimator ``(1/t) log(x(t)/x0)``."""
    t = _check_t(t, strict=True)
    mean_tl, _ = last_reset_moments(params.r, t)
    return params.log_drift * (1.0 - mean_tl / t)


def growth_estimator_variance(params: ModelParams, t: float) -> float:
    """Variance of the single-trajectory growth estimator."""
    t = _check_t(t, strict=True)
    mean_tl, var_tl = last_reset_moments(params.r, t)
    a = params.log_drift
    return a * a * var_tl / (t * t) + params.sigma2 / t * (1.0 - mean_tl / t)


def log_moment_ratio(params: ModelParams, t: float) -> float:
    return log_moment(params, 2, t) - 2.0 * log_moment(params, 1, t)


def moment_ratio(params: ModelParams, t: float) -> float:
    """``<x^2(t)> / <x(t)>^2`` (independent of ``x0``)."""
    lr = log_moment_ratio(params, t)
    return math.inf if lr > 709.0 else math.exp(lr)


def stationary_moment_ratio(params: ModelParams) -> float:
    """``lim_{t->inf} <x^2>/<x>^2``; ``inf`` unless ``r > 2 mu + sigma2``."""
    r, r2 = params.r, threshold_rate(params, 2)
    if r <= r2 or _is_degenerate(r, r2) or r <= params.mu:
        return math.inf
    return (r - params.mu) ** 2 / (r * (r - r2))


def analytic_relative_variance(params: ModelParams, N: int, t: float) -> float:
    """Relative variance ``R_N(t)`` of the N-sample average, from exact moments."""
    if int(N) != N or N < 1:
        raise ParameterError(f"N must be an integer >= 1, got {N}")
    t = _check_t(t)
    if t == 0.0:
        return 0.0
    # ratio - 1 computed as expm1 of the log ratio to keep small values accurate
    return math.expm1(log_moment_ratio(params, t)) / N


def critical_time(params: ModelParams, N: int, rtol: float = 1e-8, t_max: float = 1e12) -> CriticalTime:
    """Solve ``<x^2(t_c)>/<x(t_c)>^2 = N + 1`` for the self-averaging time.

    Bisection on ``log t`` between ``1e-6`` and an upper end doubled until the
    ratio exceeds ``N + 1``. Returns ``t_c = inf`` with ``method="never"``
    when the long-time ratio does not exceed ``N + 1``.
    """
    if int(N) != N or N < 1:
        raise ParameterError(f"N must be an integer >= 1, got {N}")
    target = math.log(N + 1.0)
    limit = stationary_moment_ratio(params)
    if limit <= N + 1.0:
        return CriticalTime(math.inf, "never")

    def g(log_t):
        return log_moment_ratio(params, math.exp(log_t)) - target

    lo = 1e-6
    if g(math.log(lo)) >= 0:
        raise BracketingError(f"moment ratio already exceeds N+1 at t={lo:g}")
    hi = 1.0
    while g(math.log(hi)) < 0:
        hi *= 2.0
        if hi > t_max:
            raise BracketingError(f"moment ratio stays below N+1={N + 1} up to t={t_max:g}")
    root = bisect(g, math.log(lo), math.log(hi), rtol=0.0, atol=rtol * 0.5)
    return CriticalTime(math.exp(root), "exact_root")


def critical_time_frozen_approx(params: ModelParams, N: int) -> float:
    """Closed-form ``t_c`` in the frozen regime ``r < mu``, from the divergent parts of both moments."""
    mu, s2, r = params.mu, params.sigma2, params.r
    if not r < mu:
        raise RegimeError(f"frozen approximation needs r < mu (r={r}, mu={mu})")
    r2 = 2 * mu + s2
    arg = (N + 1.0) * mu * mu * (r2 - r) / ((mu - r) ** 2 * r2)
    return math.log(arg) / (r + s2)


def critical_time_unstable_approx(params: ModelParams, N: int) -> float:
    """Closed-form ``t_c`` for ``mu < r < 2 mu + sigma2`` (converged mean, divergent second moment)."""
    mu, s2, r = params.mu, params.sigma2, params.r
    r2 = 2 * mu + s2
    if not mu < r < r2:
        raise RegimeError(f"unstable approximation needs mu < r < 2mu+sigma2 (r={r}, mu={mu}, 2mu+sigma2={r2})")
    arg = (N + 1.0) * r * r * (r2 - r) / ((r - mu) ** 2 * r2)
    return math.log(arg) / (r2 - r)


def min_self_averaging_sample(params: ModelParams) -> int:
    """Smallest sample size that stays self-averaging forever (``r > 2 mu + sigma2`` only)."""
    mu, s2, r = params.mu, params.sigma2, params.r
    if not r > 2 * mu + s2:
        raise RegimeError(f"needs r > 2mu+sigma2 (r={r}, 2mu+sigma2={2 * mu + s2})")
    bound = (mu * mu + r * s2) / ((r - 2 * mu - s2) * r)
    return math.floor(bound) + 1


def optimal_reset_rate(params: ModelParams, N: int, n_grid: int = 400, tol: float = 1e-9) -> float:
    """Resetting rate in ``(0, 2 mu + sigma2)`` that minimizes the exact ``t_c``.

    A coarse grid locates the basin, golden-section search refines it.
    """
    if int(N) != N or N < 2:
        raise ParameterError(f"N must be an integer >= 2, got {N}")
    r_hi = threshold_rate(params, 2)
    if r_hi <= 0:
        raise ParameterError(f"2mu+sigma2 = {r_hi} leaves no interval to search")

    # tight root so the objective is smooth at golden-section resolution
    def tc(r):
        return critical_time(params.replace(r=r), N, rtol=1e-13).t_c

    grid = np.linspace(0.0, r_hi, n_grid + 2)[1:-1]
    values = np.array([tc(r) for r in grid])
    if not np.isfinite(values).any():
        raise NumericalError("t_c is infinite across the whole interval (0, 2mu+sigma2)")
    i = int(np.nanargmin(values))
    lo = grid[i - 1] if i > 0 else 0.5 * grid[0]
    hi = grid[i + 1] if i + 1 < len(grid) else 0.5 * (grid[-1] + r_hi)
    r_star, _ = golden_section(tc, lo, hi, tol=tol)
    return r_star


def classify_regime(params: ModelParams) -> RegimeReport:
    """Frozen (``r < mu``), unstable annealed (``mu < r < 2mu+sigma2``) or stable annealed.

    Exact boundary values take the lower adjacent regime with ``boundary=True``.
    """
    r, r1, r2 = params.r, threshold_rate(params, 1), threshold_rate(params, 2)
    on_r1 = _is_degenerate(r, r1)
    on_r2 = _is_degenerate(r, r2)
    if on_r1 or r < r1:
        return RegimeReport(Regime.FROZEN, r1, r2, boundary=on_r1)
    if on_r2 or r < r2:
        return RegimeReport(Regime.UNSTABLE_ANNEALED, r1, r2, boundary=on_r2)
    return RegimeReport(Regime.STABLE_ANNEALED, r1, r2)
