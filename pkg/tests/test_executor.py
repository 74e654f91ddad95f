import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pooltest.errors import DomainError, ResourceLimitError
from pooltest.models import SchemeId
from pooltest.renderers.tables import render_simulation
from pooltest.services.executor import (
    MAX_ENUMERATION_SIZE,
    SIMULATION_BLOCK,
    _simulate_block,
    count_tests,
    enumerate_tests_distribution,
    exact_expected_tests,
    max_tests,
    run_scheme,
    simulate_expected_tests,
)
from pooltest.services.schemes import cost_per_item, tests_distribution_modified_dorfman


SCHEMES = [SchemeId.D0, SchemeId.D, SchemeId.S]
status_vectors = st.lists(st.booleans(), min_size=1, max_size=30)


@pytest.mark.parametrize(
    "scheme, statuses, expected",
    [
        ("D0", [False, False, False], 1),
        ("D", [False, True], 2),
        ("S", [True, False, False], 3),
        ("D", [True, True], 3),
        ("D0", [True, False, False], 4),
        ("S", [False, False, True], 3),
        ("S", [True, True, True], 5),
        ("S", [False, True, False, True], 5),
    ],
)
def test_run_scheme_traces(scheme, statuses, expected):
    assert run_scheme(scheme, statuses) == expected


def test_run_scheme_rejects_empty_vector():
    with pytest.raises(DomainError):
        run_scheme("S", [])


@pytest.mark.parametrize("scheme", SCHEMES)
@pytest.mark.parametrize("status", [True, False])
def test_single_item_is_one_test(scheme, status):
    assert run_scheme(scheme, [status]) == 1


@given(st.integers(min_value=1, max_value=50))
def test_all_good_vector_costs_one_test(n):
    for scheme in SCHEMES:
        assert run_scheme(scheme, [False] * n) == 1


@given(status_vectors.filter(lambda v: len(v) >= 2))
def test_modified_dorfman_support(statuses):
    n = len(statuses)
    assert run_scheme("D", statuses) in {1, n, n + 1}


@given(status_vectors)
def test_vectorized_counts_match_procedural_runs(statuses):
    matrix = np.array([statuses], dtype=bool)
    for scheme in SCHEMES:
        assert int(count_tests(scheme, matrix)[0]) == run_scheme(scheme, statuses)


@pytest.mark.parametrize("n", range(1, 9))
def test_vectorized_counts_cover_every_pattern(n):
    patterns = [list(bits) for bits in itertools.product([False, True], repeat=n)]
    matrix = np.array(patterns, dtype=bool)
    for scheme in SCHEMES:
        assert count_tests(scheme, matrix).tolist() == [run_scheme(scheme, row) for row in patterns]


@pytest.mark.parametrize("n", range(1, 9))
def test_worst_pattern_reaches_max_tests(n):
    matrix = np.array(list(itertools.product([False, True], repeat=n)), dtype=bool)
    assert int(count_tests("S", matrix).max()) == (1 if n == 1 else 2 * n - 1)
    for scheme in SCHEMES:
        assert int(count_tests(scheme, matrix).max()) == max_tests(scheme, n)
        assert max(enumerate_tests_distribution(scheme, n, 0.5)) == max_tests(scheme, n)


def test_count_tests_needs_a_matrix():
    with pytest.raises(DomainError):
        count_tests("D", np.zeros(4, dtype=bool))


@pytest.mark.parametrize(
    "scheme, n, p, expected",
    [
        ("D", 2, 0.1, 1.29),
        ("S", 3, 0.2, 2.248),
        ("S", 4, 0.5, 5.0625),
        ("D0", 1, 0.4, 1.0),
        ("D", 1, 0.4, 1.0),
        ("S", 1, 0.4, 1.0),
    ],
)
def test_exact_expected_tests_examples(scheme, n, p, expected):
    assert exact_expected_tests(scheme, n, p) == pytest.approx(expected, abs=1e-12)


def test_enumeration_is_capped():
    with pytest.raises(ResourceLimitError):
        enumerate_tests_distribution("D", MAX_ENUMERATION_SIZE + 1, 0.1)


@pytest.mark.parametrize("n", [2, 3, 7, 12])
@pytest.mark.parametrize("p", [1e-6, 0.01, 0.3, 0.9])
def test_enumeration_reproduces_modified_dorfman_law(n, p):
    enumerated = enumerate_tests_distribution("D", n, p)
    closed = dict(tests_distribution_modified_dorfman(n, p))
    assert set(enumerated) <= set(closed)
    for value, prob in closed.items():
        assert enumerated.get(value, 0.0) == pytest.approx(prob, abs=1e-14)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_enumeration_in_log_space_for_rare_defects(scheme):
    assert exact_expected_tests(scheme, 10, 1e-7) == pytest.approx(10 * cost_per_item(scheme, 10, 1e-7), abs=1e-12)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_enumerated_law_sums_to_one(scheme):
    distribution = enumerate_tests_distribution(scheme, 16, 0.2)
    assert sum(distribution.values()) == pytest.approx(1.0, abs=1e-12)


def test_simulation_is_deterministic():
    first = simulate_expected_tests("S", 12, 0.05, replications=10_000, seed=7)
    second = simulate_expected_tests("S", 12, 0.05, replications=10_000, seed=7)
    assert first == second


def test_simulation_seed_changes_the_draws():
    first = simulate_expected_tests("S", 12, 0.05, replications=10_000, seed=7)
    second = simulate_expected_tests("S", 12, 0.05, replications=10_000, seed=8)
    assert first.mean != second.mean


def test_replication_draws_are_fixed_by_seed_and_index():
    short = _simulate_block(SchemeId.S, 6, 0.1, 5, 0, 100)
    full = _simulate_block(SchemeId.S, 6, 0.1, 5, 0, SIMULATION_BLOCK)
    np.testing.assert_array_equal(short, full[:100])
    assert not np.array_equal(full, _simulate_block(SchemeId.S, 6, 0.1, 5, 1, SIMULATION_BLOCK))


@pytest.mark.parametrize("workers", [2, 3, 8])
def test_simulation_does_not_depend_on_worker_count(workers):
    reps = 3 * SIMULATION_BLOCK + 17
    serial = simulate_expected_tests("D", 9, 0.07, replications=reps, seed=99, workers=1)
    threaded = simulate_expected_tests("D", 9, 0.07, replications=reps, seed=99, workers=workers)
    assert render_simulation(serial) == render_simulation(threaded)


def test_simulation_mean_matches_modified_dorfman_cost():
    estimate = simulate_expected_tests("D", 10, 0.05, replications=200_000, seed=20211)
    assert abs(estimate.mean - cost_per_item("D", 10, 0.05)) < 4.0 * estimate.std_error


def test_standard_error_scales_with_root_replications():
    small = simulate_expected_tests("S", 8, 0.1, replications=40_000, seed=3)
    large = simulate_expected_tests("S", 8, 0.1, replications=160_000, seed=3)
    assert 2.0 / 1.5 < small.std_error / large.std_error < 2.0 * 1.5


def test_single_replication_has_zero_standard_error():
    estimate = simulate_expected_tests("D0", 5, 0.2, replications=1, seed=0)
    assert estimate.replications == 1
    assert estimate.std_error == 0.0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"replications": 0, "seed": 1},
        {"replications": 10, "seed": -1},
        {"replications": 10, "seed": 2**64},
        {"replications": 10, "seed": 1, "workers": 0},
    ],
)
def test_simulation_rejects_bad_arguments(kwargs):
    with pytest.raises(DomainError):
        simulate_expected_tests("D", 4, 0.1, **kwargs)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SCHEMES), st.integers(min_value=1, max_value=30), st.floats(min_value=0.001, max_value=0.9))
def test_simulated_counts_lie_in_the_support(scheme, n, p):
    estimate = simulate_expected_tests(scheme, n, p, replications=500, seed=11)
    assert 1.0 / n <= estimate.mean <= (2 * n) / n
