"""Scalar bisection and golden-section search."""

from __future__ import annotations

import math

from .exceptions import BracketingError, NumericalError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect(f, lo: float, hi: float, rtol: float = 1e-12, atol: float = 0.0, max_iter: int = 400) -> float:
    """Root of ``f`` on ``[lo, hi]`` by bisection.

    ``f(lo)`` and ``f(hi)`` must have opposite signs (or one of them be zero).
    Stops when the bracket width is below ``atol + rtol * |midpoint|``.
    """
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if math.isnan(f_lo) or math.isnan(f_hi) or (f_lo > 0) == (f_hi > 0):
        raise BracketingError(f"f({lo:g}) = {f_lo:g} and f({hi:g}) = {f_hi:g} do not bracket a root")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= atol + rtol * abs(mid):
            return mid
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if math.isnan(f_mid):
            raise NumericalError(f"f({mid:g}) is NaN during bisection")
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_section(f, lo: float, hi: float, tol: float = 1e-10, max_iter: int = 500) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(argmin, f(argmin))``.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)
