"""Closed-form testing costs for the original Dorfman (D0), modified Dorfman (D) and Sterrett (S) schemes.

t is the expected number of tests per item, E T / N. Powers of q are taken as
exp(N * log1p(-p)) so that small prevalences keep full precision. For N = 1
every scheme costs exactly one test per item (individual testing); the D0
formula would give 1 + p there and is special-cased.
"""
import math
from typing import List, Tuple, Union

import numpy as np

from pooltest.errors import DomainError, UnsupportedSchemeError
from pooltest.models import CostPoint, PrevalenceLike, SchemeId, as_prevalence, as_scheme


def _check_group_size(n: int, minimum: int = 1) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"group size must be an integer, got {n!r}")
    if n < minimum:
        raise DomainError(f"group size must be >= {minimum}, got {n}")
    return int(n)


def _cost_formula(scheme: SchemeId, n: np.ndarray, p: float, log_q: float) -> np.ndarray:
    """The per-item cost formulas with N real, without the N = 1 convention."""
    if scheme is SchemeId.D0:
        return -np.expm1(n * log_q) + 1.0 / n
    if scheme is SchemeId.D:
        return -np.expm1(n * log_q) + (1.0 - p * np.exp((n - 1.0) * log_q)) / n
    q = 1.0 - p
    return 2.0 - q + (2.0 * q + np.expm1((n + 1.0) * log_q) / p) / n


def cost_curve(scheme: Union[str, SchemeId], n_values: np.ndarray, p: PrevalenceLike) -> np.ndarray:
    scheme = as_scheme(scheme)
    prevalence = as_prevalence(p)
    n = np.asarray(n_values, dtype=float)
    if n.size and (n.min() < 1 or np.any(n != np.floor(n))):
        raise DomainError("group sizes must be integers >= 1")
    costs = _cost_formula(scheme, n, prevalence.p, prevalence.log_q)
    return np.where(n == 1.0, 1.0, costs)


def cost_per_item(scheme: Union[str, SchemeId], n: int, p: PrevalenceLike) -> float:
    n = _check_group_size(n)
    return float(cost_curve(scheme, np.array([n], dtype=float), p)[0])


def cost_point(scheme: Union[str, SchemeId], n: int, p: PrevalenceLike) -> CostPoint:
    scheme = as_scheme(scheme)
    prevalence = as_prevalence(p)
    return CostPoint(scheme=scheme, n=n, p=prevalence.p, t=cost_per_item(scheme, n, prevalence))


def cost_real_extension(scheme: Union[str, SchemeId], n: float, p: PrevalenceLike) -> float:
    scheme = as_scheme(scheme)
    prevalence = as_prevalence(p)
    if not n >= 1.0:
        raise DomainError(f"n must be >= 1, got {n!r}")
    return float(_cost_formula(scheme, np.float64(n), prevalence.p, prevalence.log_q))


def tests_distribution_modified_dorfman(n: int, p: PrevalenceLike) -> List[Tuple[int, float]]:
    """Three-point law of T for scheme D: 1 test, N tests (last item inferred) or N + 1 tests."""
    n = _check_group_size(n, minimum=2)
    prevalence = as_prevalence(p)
    q_n = math.exp(n * prevalence.log_q)
    inferred = prevalence.p * math.exp((n - 1) * prevalence.log_q)
    negative_pool = q_n
    full_retest = -math.expm1(n * prevalence.log_q) - inferred
    return [(1, negative_pool), (n, inferred), (n + 1, full_retest)]


def tests_mean_modified_dorfman(n: int, p: PrevalenceLike) -> float:
    return math.fsum(value * prob for value, prob in tests_distribution_modified_dorfman(n, p))


def cost_derivative_in_n(scheme: Union[str, SchemeId], n: float, p: PrevalenceLike) -> float:
    """d t / d N with N real.

    For S the zero coincides with the fixed point of
    h(N) = 1/ln q - ((1 - 2pq)/ln q) (1/q)^(N+1); for D with the fixed point of
    f(N) = -(q/p)(N^2 + (1/ln q)(1/q)^N) + 1/ln q.
    """
    scheme = as_scheme(scheme)
    prevalence = as_prevalence(p)
    if not n >= 1.0:
        raise DomainError(f"n must be >= 1, got {n!r}")
    p, q, log_q = prevalence.p, prevalence.q, prevalence.log_q

    if scheme is SchemeId.D:
        q_n = math.exp(n * log_q)
        q_n_minus_1 = math.exp((n - 1.0) * log_q)
        return -log_q * q_n - (1.0 - p * q_n_minus_1) / n**2 - p * log_q * q_n_minus_1 / n
    if scheme is SchemeId.S:
        q_n_plus_1 = math.exp((n + 1.0) * log_q)
        bracket_term = 2.0 * q + math.expm1((n + 1.0) * log_q) / p
        return log_q * q_n_plus_1 / (p * n) - bracket_term / n**2
    raise UnsupportedSchemeError("the N-derivative is only provided for schemes D and S")
