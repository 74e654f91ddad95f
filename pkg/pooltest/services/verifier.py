"""Numerical checks of the inequalities behind the optimal group size results.

Auxiliary functions:

* g_m(p), m in {-1, 0, 1}: g_1 > 1 and g_{-1} < 1 bracket the Sterrett
  minimizer N* in [sqrt(2/p) - 1, sqrt(2/p) + 1]; g_0 = 1 at a single p*.
* sterrett_gap(p) = t^(S)(floor(sqrt(2/p)) - 1) - t^(S)(floor(sqrt(2/p))) on (p*, Ungar).
* dorfman_region_margin(y) > 0 puts (p, sqrt(1/p) + 1 - 5p/2) inside t^(D) < 1, y = sqrt(p).
* dorfman_brace(theta, p) changes sign on [0, 1], bracing the Dorfman minimizer.

Near p = 0 the margins vanish like p^2, so every g claim compares ln g_m with
zero rather than g_m with one. Below p = 1e-9 nothing is evaluated.
"""
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple

import numpy as np

from pooltest.errors import BracketError, DomainError
from pooltest.models import GridSpec, PrevalenceLike, SchemeId, VerificationReport, as_prevalence
from pooltest.services.optimizer import (
    UNGAR_CUTOFF,
    closed_form_candidates,
    continuous_minimizer,
    default_n_max,
    optimal_group_size_bruteforce,
    optimal_group_size_closed_form,
)
from pooltest.services.schemes import cost_curve, cost_per_item
from pooltest.utils.numeric import (
    ENDPOINT_INSET,
    bisect,
    count_sign_changes,
    grid_spec,
    linear_grid,
    log_grid,
)


logger = logging.getLogger(__name__)

G_INDICES = (-1, 0, 1)
P_STAR_BRACKET = (0.05, 0.3)
STERRETT_BREAKPOINT = 2.0 / 9.0
MIN_GRID_POINTS = 10
SMALLEST_P = 1e-9
CANDIDATE_GRID_LO = 1e-6
UNGAR_GRID_POINTS = 20
UNGAR_GRID_HI = 0.99
UNGAR_MAX_N = 200
BRACE_SLOPE_THETAS = (0.25, 0.5, 0.75)
BRACE_STEP = 1e-3

_p_star_lock = threading.Lock()
_p_star: Optional[float] = None


def _check_below_ungar(p: PrevalenceLike) -> float:
    p = as_prevalence(p).p
    if p >= UNGAR_CUTOFF:
        raise DomainError(f"p must lie in (0, {UNGAR_CUTOFF:.12g}), got {p}")
    return p


def _check_g_index(m: int) -> int:
    if m not in G_INDICES:
        raise DomainError(f"m must be one of -1, 0, 1, got {m!r}")
    return int(m)


def log_g(m: int, p: PrevalenceLike) -> float:
    m = _check_g_index(m)
    p = _check_below_ungar(p)
    log_q = math.log1p(-p)
    q = 1.0 - p
    root = math.sqrt(p / 2.0)
    inner = (
        math.log1p(-2.0 * p * q)
        - (1.0 + m) * log_q
        - math.log1p(-log_q * (math.sqrt(2.0 / p) + m))
    )
    return root * inner - log_q


def g(m: int, p: PrevalenceLike) -> float:
    """(1/q) [ (1 - 2pq) / (q^(1+m) (1 - ln q sqrt(2/p) (1 + m sqrt(p/2)))) ]^sqrt(p/2)"""
    return math.exp(log_g(m, p))


def find_p_star() -> float:
    lo, hi = P_STAR_BRACKET
    try:
        result = bisect(lambda p: log_g(0, p), lo, hi, xtol=1e-15, ftol=1e-13)
    except BracketError as exc:
        raise BracketError(f"g_0 - 1 does not change sign on {P_STAR_BRACKET}") from exc
    logger.info("p* = %.12f (%d bisection steps)", result.x, result.iterations)
    return result.x


def get_p_star() -> float:
    global _p_star
    if _p_star is None:
        with _p_star_lock:
            if _p_star is None:
                _p_star = find_p_star()
    return _p_star


def sterrett_gap(p: PrevalenceLike, p_star: Optional[float] = None) -> float:
    p = as_prevalence(p).p
    p_star = get_p_star() if p_star is None else p_star
    if not p_star < p < UNGAR_CUTOFF:
        raise DomainError(f"p must lie in (p*, {UNGAR_CUTOFF:.12g}), got {p}")
    # floor(sqrt(2/p)) is 3 up to and including 2/9, and 2 beyond it
    k = 3 if p <= STERRETT_BREAKPOINT else 2
    return cost_per_item(SchemeId.S, k - 1, p) - cost_per_item(SchemeId.S, k, p)


def dorfman_region_margin(y: float) -> float:
    upper = math.sqrt(UNGAR_CUTOFF)
    if not 0.0 < y < upper:
        raise DomainError(f"y must lie in (0, {upper:.12g}), got {y}")
    a = 1.0 / y - 2.5 * y * y
    return a * math.log1p(-y * y) + math.log1p((1.0 - y * y) * a)


def brace_point(theta: float, p: PrevalenceLike) -> float:
    """N(theta) = sqrt(1/p) - p + theta (1 - 3p/2)."""
    p = as_prevalence(p).p
    return 1.0 / math.sqrt(p) - p + theta * (1.0 - 1.5 * p)


def dorfman_fixed_point_map(n: float, p: PrevalenceLike) -> float:
    """f(N, p) = -(q/p)(N^2 + (1/ln q)(1/q)^N) + 1/ln q; its fixed points are zeros of dt^(D)/dN."""
    p = as_prevalence(p).p
    q = 1.0 - p
    log_q = math.log1p(-p)
    return -(q / p) * (n * n + math.exp(-n * log_q) / log_q) + 1.0 / log_q


def dorfman_brace(theta: float, p: PrevalenceLike) -> float:
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f"theta must lie in [0, 1], got {theta}")
    p = _check_below_ungar(p)
    n = brace_point(theta, p)
    return p**1.5 * (dorfman_fixed_point_map(n, p) - n)


def in_region_A_D(n: float, p: PrevalenceLike) -> bool:
    """True iff p is below the Ungar cut-off and t^(D)(n, p) < 1, via x ln q + ln(1 + qx) > 0 with x = n - 1."""
    p = as_prevalence(p).p
    if not n >= 1.0:
        raise DomainError(f"n must be >= 1, got {n!r}")
    if p >= UNGAR_CUTOFF:
        return False
    x = n - 1.0
    return x * math.log1p(-p) + math.log1p((1.0 - p) * x) > 0.0


def sterrett_minimizer_half_bracket(p: PrevalenceLike, p_star: Optional[float] = None) -> Tuple[float, float]:
    """Half of [sqrt(2/p) - 1, sqrt(2/p) + 1] holding N*^(S), chosen by the side of p*."""
    p = _check_below_ungar(p)
    p_star = get_p_star() if p_star is None else p_star
    root = math.sqrt(2.0 / p)
    if p <= p_star:
        return root, root + 1.0
    return root - 1.0, root


# ---------------------------------------------------------------------------
# Grid verification
# ---------------------------------------------------------------------------


def _full_domain_grid(count: int) -> np.ndarray:
    return log_grid(SMALLEST_P, UNGAR_CUTOFF - ENDPOINT_INSET, count)


def _candidate_grid(count: int) -> np.ndarray:
    return log_grid(CANDIDATE_GRID_LO, UNGAR_CUTOFF - ENDPOINT_INSET, count)


def _report(claim_id: str, grid: GridSpec, margins: np.ndarray, locations: np.ndarray, ok: bool = True, **extra) -> VerificationReport:
    worst = int(np.argmin(margins))
    worst_margin = float(margins[worst])
    passed = bool(ok and np.all(np.isfinite(margins)) and worst_margin > 0.0)
    logger.info("%s: %s (worst margin %.3e at %.6g)", claim_id, "PASS" if passed else "FAIL", worst_margin, locations[worst])
    return VerificationReport(
        claim_id=claim_id,
        grid=grid,
        passed=passed,
        worst_margin=worst_margin,
        worst_location=float(locations[worst]),
        **extra,
    )


def _check_g_bound(m: int, count: int) -> VerificationReport:
    grid = _full_domain_grid(count)
    sign = 1.0 if m > 0 else -1.0
    margins = np.array([sign * log_g(m, p) for p in grid])
    claim_id = "g1_above_one" if m > 0 else "gminus1_below_one"
    return _report(claim_id, grid_spec(grid, "log"), margins, grid)


def _check_g0_crossing(count: int) -> VerificationReport:
    grid = log_grid(1e-4, UNGAR_CUTOFF - ENDPOINT_INSET, count)
    values = np.array([log_g(0, p) for p in grid])
    changes = count_sign_changes(values)
    margins = np.sign(grid - get_p_star()) * values
    return _report("g0_single_crossing", grid_spec(grid, "log"), margins, grid, ok=changes == 1, sign_changes=changes)


def _check_sterrett_gap(count: int) -> VerificationReport:
    grid = np.linspace(get_p_star() + 1e-6, UNGAR_CUTOFF - ENDPOINT_INSET, count)
    margins = np.array([sterrett_gap(p) for p in grid])
    return _report("sterrett_gap_positive", grid_spec(grid, "linear"), margins, grid)


def _check_region_margin(count: int) -> VerificationReport:
    grid = linear_grid(0.0, math.sqrt(UNGAR_CUTOFF), count)
    margins = np.array([dorfman_region_margin(y) for y in grid])
    return _report("dorfman_region_margin_positive", grid_spec(grid, "linear"), margins, grid)


def _brace_margin(p: float) -> float:
    slopes = [
        (dorfman_brace(theta + BRACE_STEP, p) - dorfman_brace(theta - BRACE_STEP, p)) / (2.0 * BRACE_STEP)
        for theta in BRACE_SLOPE_THETAS
    ]
    return min(dorfman_brace(0.0, p), -dorfman_brace(1.0, p), -max(slopes))


def _check_brace(count: int) -> VerificationReport:
    grid = _full_domain_grid(count)
    margins = np.array([_brace_margin(p) for p in grid])
    return _report("dorfman_brace_sign_and_slope", grid_spec(grid, "log"), margins, grid)


def _agreement_margin(scheme: SchemeId, p: float, p_star: float) -> Tuple[float, bool]:
    """Cost gap between the best size outside the candidate set and the optimum."""
    candidates = closed_form_candidates(scheme, p, p_star=p_star)
    brute = optimal_group_size_bruteforce(scheme, p)
    closed = optimal_group_size_closed_form(scheme, p, p_star=p_star)
    sizes = np.arange(1, default_n_max(p) + 1)
    costs = cost_curve(scheme, sizes, p)
    inside = np.isin(sizes, candidates)
    margin = float(costs[~inside].min() - costs[inside].min())
    return margin, brute.n_opt == closed.n_opt and brute.t_opt == closed.t_opt


def _check_agreement(scheme: SchemeId, count: int) -> VerificationReport:
    grid = _candidate_grid(count)
    p_star = get_p_star()
    results = [_agreement_margin(scheme, p, p_star) for p in grid]
    margins = np.array([margin for margin, _ in results])
    agree = all(same for _, same in results)
    return _report(f"closed_form_matches_brute_force_{scheme.value}", grid_spec(grid, "log"), margins, grid, ok=agree)


def _check_ungar() -> VerificationReport:
    grid = np.linspace(UNGAR_CUTOFF + ENDPOINT_INSET, UNGAR_GRID_HI, UNGAR_GRID_POINTS)
    sizes = np.arange(2, UNGAR_MAX_N + 1)
    margins = []
    individual = True
    for p in grid:
        for scheme in (SchemeId.D, SchemeId.S):
            margins.append(float(cost_curve(scheme, sizes, p).min() - 1.0))
            individual = individual and optimal_group_size_bruteforce(scheme, p).n_opt == 1
    margins = np.array(margins)
    locations = np.repeat(grid, 2)
    return _report("ungar_individual_testing", grid_spec(grid, "linear"), margins, locations, ok=individual)


def _check_sterrett_decreasing(count: int) -> VerificationReport:
    grid = _candidate_grid(count)
    minimizers = np.array([continuous_minimizer(SchemeId.S, p).x for p in grid])
    margins = minimizers[:-1] - minimizers[1:]
    return _report("sterrett_minimizer_decreasing", grid_spec(grid, "log"), margins, grid[:-1])


def _claims(grid_points: int) -> List[Callable[[], VerificationReport]]:
    return [
        lambda: _check_g_bound(1, grid_points),
        lambda: _check_g_bound(-1, grid_points),
        lambda: _check_g0_crossing(grid_points),
        lambda: _check_sterrett_gap(grid_points),
        lambda: _check_region_margin(grid_points),
        lambda: _check_brace(grid_points),
        lambda: _check_agreement(SchemeId.D0, grid_points),
        lambda: _check_agreement(SchemeId.D, grid_points),
        lambda: _check_agreement(SchemeId.S, grid_points),
        _check_ungar,
        lambda: _check_sterrett_decreasing(grid_points),
    ]


def verify_all(grid_points: int = 500, workers: int = 1) -> List[VerificationReport]:
    if int(grid_points) != grid_points or grid_points < MIN_GRID_POINTS:
        raise DomainError(f"grid_points must be an integer >= {MIN_GRID_POINTS}, got {grid_points!r}")
    grid_points = int(grid_points)
    get_p_star()
    claims = _claims(grid_points)
    if workers <= 1:
        return [claim() for claim in claims]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda claim: claim(), claims))
