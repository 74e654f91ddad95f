import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pooltest.errors import DomainError, UnsupportedSchemeError
from pooltest.models import Prevalence, SchemeId
from pooltest.services.optimizer import continuous_minimizer
from pooltest.services.schemes import (
    cost_curve,
    cost_derivative_in_n,
    cost_per_item,
    cost_point,
    cost_real_extension,
    tests_distribution_modified_dorfman,
    tests_mean_modified_dorfman,
)


SCHEMES = [SchemeId.D0, SchemeId.D, SchemeId.S]
prevalences = st.floats(min_value=1e-6, max_value=0.99, allow_nan=False, allow_infinity=False)
group_sizes = st.integers(min_value=2, max_value=400)


@pytest.mark.parametrize(
    "scheme, n, p, expected",
    [
        ("D", 1, 0.3, 1.0),
        ("D", 2, 0.1, 0.645),
        ("S", 2, 0.1, 0.645),
        ("D0", 2, 0.1, 0.69),
        ("S", 3, 0.2, 2.248 / 3),
    ],
)
def test_cost_per_item_examples(scheme, n, p, expected):
    assert cost_per_item(scheme, n, p) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("scheme", SCHEMES)
@pytest.mark.parametrize("p", [1e-9, 0.2, 0.5, 0.999])
def test_single_item_costs_one_test(scheme, p):
    assert cost_per_item(scheme, 1, p) == 1.0


def test_sterrett_costs_from_formula():
    assert cost_per_item(SchemeId.S, 3, 0.2) == pytest.approx(0.7493333333333333, abs=1e-12)
    assert cost_per_item(SchemeId.S, 4, 0.2) == pytest.approx(0.7596, abs=1e-4)


@pytest.mark.parametrize(
    "n, p",
    [(0, 0.1), (-3, 0.1), (2.5, 0.1), (2, 0.0), (2, 1.0), (2, -0.1), (2, float("nan"))],
)
def test_cost_per_item_rejects_bad_arguments(n, p):
    with pytest.raises(DomainError):
        cost_per_item("D", n, p)


def test_unknown_scheme_is_a_domain_error():
    with pytest.raises(DomainError, match="unknown scheme"):
        cost_per_item("T", 2, 0.1)


def test_cost_point_carries_inputs():
    point = cost_point("S", 15, Prevalence(p=0.01))
    assert point.scheme is SchemeId.S
    assert point.n == 15
    assert point.p == 0.01
    assert point.t == cost_per_item("S", 15, 0.01)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_cost_curve_matches_pointwise_costs(scheme):
    sizes = np.arange(1, 41)
    curve = cost_curve(scheme, sizes, 0.03)
    assert curve[0] == 1.0
    assert curve.tolist() == [cost_per_item(scheme, int(n), 0.03) for n in sizes]


def test_cost_curve_rejects_fractional_sizes():
    with pytest.raises(DomainError):
        cost_curve("D", np.array([1.0, 2.5]), 0.1)


def test_real_extension_keeps_the_d0_formula_at_one():
    assert cost_real_extension("D0", 1.0, 0.2) == pytest.approx(1.2)
    assert cost_real_extension("D", 1.0, 0.2) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        cost_real_extension("S", 0.5, 0.2)


@given(group_sizes, prevalences)
def test_modified_dorfman_saves_the_inferred_test(n, p):
    q = 1.0 - p
    saving = cost_per_item("D0", n, p) - cost_per_item("D", n, p)
    assert saving == pytest.approx(p * q ** (n - 1) / n, rel=1e-9, abs=1e-15)


@given(group_sizes, prevalences)
def test_costs_are_positive_and_finite(n, p):
    for scheme in SCHEMES:
        t = cost_per_item(scheme, n, p)
        assert math.isfinite(t)
        assert t >= 1.0 / n - 1e-12


@pytest.mark.parametrize(
    "n, p, expected",
    [
        (2, 0.1, [(1, 0.81), (2, 0.09), (3, 0.10)]),
        (3, 0.5, [(1, 0.125), (3, 0.125), (4, 0.75)]),
    ],
)
def test_modified_dorfman_distribution_examples(n, p, expected):
    distribution = tests_distribution_modified_dorfman(n, p)
    assert [value for value, _ in distribution] == [value for value, _ in expected]
    for (_, prob), (_, want) in zip(distribution, expected):
        assert prob == pytest.approx(want, abs=1e-15)


def test_modified_dorfman_distribution_needs_two_items():
    with pytest.raises(DomainError):
        tests_distribution_modified_dorfman(1, 0.1)


@given(st.integers(min_value=2, max_value=200), prevalences)
def test_modified_dorfman_distribution_is_a_law(n, p):
    distribution = tests_distribution_modified_dorfman(n, p)
    probs = [prob for _, prob in distribution]
    assert all(prob >= 0.0 for prob in probs)
    assert math.fsum(probs) == pytest.approx(1.0, abs=1e-12)


@given(st.integers(min_value=2, max_value=200), prevalences)
def test_modified_dorfman_mean_matches_cost(n, p):
    assert tests_mean_modified_dorfman(n, p) == pytest.approx(n * cost_per_item("D", n, p), rel=1e-12, abs=1e-12)


def test_sterrett_derivative_vanishes_at_continuous_minimizer():
    x = continuous_minimizer("S", 0.01).x
    assert abs(cost_derivative_in_n("S", x, 0.01)) < 1e-10


def test_sterrett_cost_decreases_from_one_at_small_p():
    assert cost_derivative_in_n("S", 1.0, 0.01) < 0.0


def test_derivative_not_provided_for_original_dorfman():
    with pytest.raises(UnsupportedSchemeError):
        cost_derivative_in_n("D0", 3.0, 0.1)


@pytest.mark.parametrize("scheme", [SchemeId.D, SchemeId.S])
@pytest.mark.parametrize("p", [0.01, 0.05, 0.1, 0.2, 0.3])
@pytest.mark.parametrize("n", [1.5, 2.5, 20.0, 60.0])
def test_derivative_matches_central_difference(scheme, p, n):
    step = 1e-4
    numeric = (cost_real_extension(scheme, n + step, p) - cost_real_extension(scheme, n - step, p)) / (2.0 * step)
    assert cost_derivative_in_n(scheme, n, p) == pytest.approx(numeric, rel=1e-5, abs=1e-8)


@settings(max_examples=50)
@given(st.floats(min_value=1e-4, max_value=0.38))
def test_sterrett_derivative_changes_sign_around_sqrt_two_over_p(p):
    root = math.sqrt(2.0 / p)
    assert cost_derivative_in_n("S", max(1.0, root - 1.0), p) < 0.0
    assert cost_derivative_in_n("S", root + 1.0, p) > 0.0


def test_distribution_helpers_are_not_collected_as_tests(request):
    assert request.config.getini("python_functions") == ["test_*"]


def test_sterrett_and_modified_dorfman_agree_for_pairs():
    for p in np.linspace(1e-9, 1.0 - 1e-9, 1000):
        assert abs(cost_per_item("S", 2, p) - cost_per_item("D", 2, p)) < 1e-14
