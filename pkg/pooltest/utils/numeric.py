"""Scalar bisection and evaluation grids."""
import logging
import math
from typing import Callable

import numpy as np

from pooltest.errors import BracketError, DomainError, RootFindError
from pooltest.models import GridSpec, RootFindResult


logger = logging.getLogger(__name__)

MAX_BISECTION_ITERATIONS = 200
ENDPOINT_INSET = 1e-9


def bisect(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 1e-10,
    ftol: float = 1e-10,
    max_iter: int = MAX_BISECTION_ITERATIONS,
) -> RootFindResult:
    """Plain bisection on [lo, hi]; stops once both the width and |f| are below tolerance.

    An exact zero of func ends the search at once, so `width` can then exceed
    xtol; it reports the bracket that contained the returned point.
    """
    if not lo <= hi:
        raise DomainError(f"empty bracket [{lo}, {hi}]")
    bracket = (float(lo), float(hi))
    f_lo = func(lo)
    f_hi = func(hi)
    if f_lo == 0.0:
        return RootFindResult(x=lo, residual=0.0, iterations=0, bracket=bracket, width=0.0)
    if f_hi == 0.0:
        return RootFindResult(x=hi, residual=0.0, iterations=0, bracket=bracket, width=0.0)
    if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise BracketError(f"no sign change on [{lo:.12g}, {hi:.12g}]: f={f_lo:.3e}, {f_hi:.3e}")

    a, b = float(lo), float(hi)
    x, fx = a, f_lo
    for iteration in range(1, max_iter + 1):
        x = 0.5 * (a + b)
        fx = func(x)
        if fx == 0.0:
            return RootFindResult(x=x, residual=0.0, iterations=iteration, bracket=bracket, width=b - a)
        if math.copysign(1.0, fx) == math.copysign(1.0, f_lo):
            a, f_lo = x, fx
        else:
            b = x
        stalled = (b - a) <= 2.0 * math.ulp(x)
        if abs(fx) < ftol and ((b - a) < xtol or stalled):
            logger.debug("bisection converged after %d iterations at x=%.15g", iteration, x)
            return RootFindResult(x=x, residual=fx, iterations=iteration, bracket=bracket, width=b - a)
    raise RootFindError(
        f"bisection did not converge in {max_iter} iterations on [{lo:.12g}, {hi:.12g}] (last |f|={abs(fx):.3e})"
    )


def linear_grid(lo: float, hi: float, count: int, inset: float = ENDPOINT_INSET) -> np.ndarray:
    return np.linspace(lo + inset, hi - inset, count)


def log_grid(lo: float, hi: float, count: int) -> np.ndarray:
    return np.geomspace(lo, hi, count)


def interior_grid(lo: float, hi: float, count: int) -> np.ndarray:
    """`count` equally spaced points strictly inside (lo, hi)."""
    return np.linspace(lo, hi, count + 2)[1:-1]


def grid_spec(values: np.ndarray, spacing: str) -> GridSpec:
    return GridSpec(lo=float(values[0]), hi=float(values[-1]), count=int(values.size), spacing=spacing)


def count_sign_changes(values: np.ndarray) -> int:
    signs = np.sign(values)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def floor_sqrt(value: float) -> int:
    return int(math.floor(math.sqrt(value)))
