"""Optimal group size: brute force, continuous minimizer and closed-form candidate sets."""
import logging
import math
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np

from pooltest.errors import CapBindingError, DomainError, UnsupportedSchemeError
from pooltest.models import (
    OptimalConfig,
    OptimalMethod,
    PrevalenceLike,
    RootFindResult,
    SchemeId,
    as_prevalence,
    as_scheme,
)
from pooltest.services.schemes import cost_curve, cost_derivative_in_n, cost_per_item
from pooltest.utils.numeric import bisect, floor_sqrt


logger = logging.getLogger(__name__)

UNGAR_CUTOFF = (3.0 - math.sqrt(5.0)) / 2.0
SAMUELS_CUTOFF = 1.0 - (1.0 / 3.0) ** (1.0 / 3.0)
MIN_BRUTE_FORCE_CAP = 64
ROOT_TOLERANCE = 1e-10


def default_n_max(p: PrevalenceLike) -> int:
    p = as_prevalence(p).p
    return max(MIN_BRUTE_FORCE_CAP, math.ceil(4.0 * math.sqrt(2.0 / p)))


def individual_testing_cutoff(scheme: Union[str, SchemeId]) -> float:
    """Prevalence from which N = 1 is optimal (Samuels for D0, Ungar otherwise)."""
    return SAMUELS_CUTOFF if as_scheme(scheme) is SchemeId.D0 else UNGAR_CUTOFF


def _argmin_over(scheme: SchemeId, p: float, candidates: Iterable[int]) -> Tuple[int, float]:
    """Smallest candidate with the lowest cost."""
    ordered = sorted(set(candidates))
    costs = cost_curve(scheme, np.array(ordered, dtype=float), p)
    best = ordered[int(np.argmin(costs))]
    return best, cost_per_item(scheme, best, p)


def optimal_group_size_bruteforce(
    scheme: Union[str, SchemeId],
    p: PrevalenceLike,
    n_max: Optional[int] = None,
) -> OptimalConfig:
    scheme = as_scheme(scheme)
    prevalence = as_prevalence(p)
    if n_max is None:
        n_max = default_n_max(prevalence)
    if int(n_max) != n_max or n_max < 1:
        raise DomainError(f"n_max must be an integer >= 1, got {n_max!r}")
    n_max = int(n_max)

    sizes = np.arange(1, n_max + 1, dtype=float)
    costs = cost_curve(scheme, sizes, prevalence)
    n_opt = int(np.argmin(costs)) + 1
    if n_max > 1 and n_opt == n_max:
        raise CapBindingError(f"argmin for scheme {scheme.value} at p={prevalence.p:.6g} sits on n_max={n_max}")
    return OptimalConfig(
        scheme=scheme,
        p=prevalence.p,
        n_opt=n_opt,
        t_opt=cost_per_item(scheme, n_opt, prevalence),
        candidates=list(range(1, n_max + 1)),
        method=OptimalMethod.BRUTE_FORCE,
    )


def _resolve_p_star(p_star: Optional[float]) -> float:
    if p_star is not None:
        return p_star
    from pooltest.services.verifier import get_p_star

    return get_p_star()


def closed_form_candidates(scheme: Union[str, SchemeId], p: PrevalenceLike, p_star: Optional[float] = None) -> List[int]:
    scheme = as_scheme(scheme)
    p = as_prevalence(p).p
    if p >= individual_testing_cutoff(scheme):
        return [1]
    if scheme is SchemeId.D:
        base = floor_sqrt(1.0 / p)
        return [c for c in (base, base + 1) if c >= 1]
    if scheme is SchemeId.D0:
        base = floor_sqrt(1.0 / p)
        return [base + 1, base + 2]
    base = floor_sqrt(2.0 / p)
    if p > _resolve_p_star(p_star):
        return [base, base + 1]
    return [base, base + 1, base + 2]


def optimal_group_size_closed_form(
    scheme: Union[str, SchemeId],
    p: PrevalenceLike,
    p_star: Optional[float] = None,
) -> OptimalConfig:
    scheme = as_scheme(scheme)
    prevalence = as_prevalence(p)
    candidates = closed_form_candidates(scheme, prevalence, p_star=p_star)
    n_opt, t_opt = _argmin_over(scheme, prevalence.p, candidates)
    return OptimalConfig(
        scheme=scheme,
        p=prevalence.p,
        n_opt=n_opt,
        t_opt=t_opt,
        candidates=candidates,
        method=OptimalMethod.CLOSED_FORM,
    )


def minimizer_bracket(scheme: Union[str, SchemeId], p: PrevalenceLike) -> Tuple[float, float]:
    scheme = as_scheme(scheme)
    p = as_prevalence(p).p
    if scheme is SchemeId.S:
        root = math.sqrt(2.0 / p)
        return max(1.0, root - 1.0), root + 1.0
    if scheme is SchemeId.D:
        root = math.sqrt(1.0 / p)
        return root - p, root + 1.0 - 2.5 * p
    raise UnsupportedSchemeError("the continuous minimizer is only provided for schemes D and S")


def continuous_minimizer(scheme: Union[str, SchemeId], p: PrevalenceLike) -> RootFindResult:
    """Zero of dt/dN inside the certified bracket around sqrt(1/p) (D) or sqrt(2/p) (S)."""
    scheme = as_scheme(scheme)
    prevalence = as_prevalence(p)
    if scheme is SchemeId.D0:
        raise UnsupportedSchemeError("the continuous minimizer is only provided for schemes D and S")
    if prevalence.p >= UNGAR_CUTOFF:
        raise DomainError(f"p must lie below the Ungar cut-off {UNGAR_CUTOFF:.6f}, got {prevalence.p}")

    lo, hi = minimizer_bracket(scheme, prevalence)
    result = bisect(
        lambda n: cost_derivative_in_n(scheme, n, prevalence),
        lo,
        hi,
        xtol=ROOT_TOLERANCE,
        ftol=ROOT_TOLERANCE,
    )
    logger.debug("N* for scheme %s at p=%.6g: %.12g (%d iterations)", scheme.value, prevalence.p, result.x, result.iterations)
    return result


def optimal_group_size_continuous(scheme: Union[str, SchemeId], p: PrevalenceLike) -> OptimalConfig:
    scheme = as_scheme(scheme)
    prevalence = as_prevalence(p)
    if scheme is SchemeId.D0:
        raise UnsupportedSchemeError("the continuous route is only provided for schemes D and S")
    if prevalence.p >= UNGAR_CUTOFF:
        candidates = [1]
    else:
        floor_x = math.floor(continuous_minimizer(scheme, prevalence).x)
        candidates = [c for c in (floor_x, floor_x + 1) if c >= 1]
    n_opt, t_opt = _argmin_over(scheme, prevalence.p, candidates)
    return OptimalConfig(
        scheme=scheme,
        p=prevalence.p,
        n_opt=n_opt,
        t_opt=t_opt,
        candidates=candidates,
        method=OptimalMethod.CONTINUOUS,
    )


def optimal_group_size(
    scheme: Union[str, SchemeId],
    p: PrevalenceLike,
    method: Union[str, OptimalMethod] = OptimalMethod.CLOSED_FORM,
) -> OptimalConfig:
    try:
        method = OptimalMethod(method)
    except ValueError as exc:
        raise DomainError(f"unknown method {method!r}") from exc
    if method is OptimalMethod.BRUTE_FORCE:
        return optimal_group_size_bruteforce(scheme, p)
    if method is OptimalMethod.CONTINUOUS:
        return optimal_group_size_continuous(scheme, p)
    return optimal_group_size_closed_form(scheme, p)


def optimal_cost_ratio(p: PrevalenceLike) -> float:
    """t^(D) / t^(S), both at their brute-force optimal group sizes."""
    prevalence = as_prevalence(p)
    if prevalence.p >= UNGAR_CUTOFF:
        raise DomainError(f"p must lie below the Ungar cut-off {UNGAR_CUTOFF:.6f}, got {prevalence.p}")
    dorfman = optimal_group_size_bruteforce(SchemeId.D, prevalence)
    sterrett = optimal_group_size_bruteforce(SchemeId.S, prevalence)
    return dorfman.t_opt / sterrett.t_opt
