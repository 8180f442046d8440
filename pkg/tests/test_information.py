import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import correlations, seeds
from gwrate.canonical import canonical_decomposition
from gwrate.errors import InfeasibleQw
from gwrate.information import (
    gaussian_mi_from_covariance,
    lower_bound_given_qw,
    lower_bound_gradient,
    minimize_lower_bound,
    mutual_information,
    wyner_ci_closed_form,
    wyner_common_information,
)
from gwrate.model import canonical_pair, validate_joint_covariance
from gwrate.realization import assemble_joint_covariance, random_feasible_qw


def decomp_of(d, p13=0, p23=0):
    return canonical_decomposition(canonical_pair(d, p13, p23))


def test_mutual_information_cases():
    assert mutual_information(decomp_of([], 1, 1)) == 0.0
    assert mutual_information(decomp_of([0.5])) == pytest.approx(-0.5 * math.log(0.75), abs=1e-15)
    identical = canonical_decomposition(validate_joint_covariance([[1, 1, 0], [1, 1, 0], [0, 0, 1]], 1, 2))
    assert mutual_information(identical) == math.inf


def test_lower_bound_examples():
    assert lower_bound_given_qw([0.5], [[1.0]]) == pytest.approx(0.5 * math.log(3), abs=1e-15)
    assert lower_bound_given_qw([0.5], [[0.5]]) == math.inf
    assert lower_bound_given_qw([0.5], [[2.0]]) == math.inf
    expected = 0.5 * (math.log(1.9 / 0.1) + math.log(1.3 / 0.7))
    assert lower_bound_given_qw([0.9, 0.3], np.eye(2)) == pytest.approx(expected, abs=1e-14)
    with pytest.raises(InfeasibleQw):
        lower_bound_given_qw([0.5], [[3.0]])


def test_common_information_examples():
    assert wyner_common_information(decomp_of([], 2, 1)).value == 0.0
    ci = wyner_common_information(decomp_of([0.5]))
    assert ci.value == pytest.approx(0.5493061443340549, abs=1e-12)
    assert np.array_equal(ci.Q_W, [[1.0]])
    assert wyner_common_information(decomp_of([0.9, 0.3])).value == pytest.approx(1.7817390944, abs=1e-9)


def test_common_information_infinite_with_identical_part():
    dec = canonical_decomposition(validate_joint_covariance([[1, 1], [1, 1]], 1, 1))
    ci = wyner_common_information(dec)
    assert ci.value == math.inf and "identical" in ci.note


@pytest.mark.parametrize("d", [[0.5], [0.9, 0.3]])
def test_diagonal_minimizer_is_identity(d):
    res = minimize_lower_bound(d, "diagonal")
    assert np.allclose(res.qw.q, 1.0, atol=1e-8, rtol=0)
    assert res.value == pytest.approx(wyner_ci_closed_form(d), abs=1e-12)


def test_full_search_never_below_closed_form():
    res = minimize_lower_bound([0.5], "full", seed=3)
    assert res.below_closed_form == 0
    assert res.value >= 0.5 * math.log(3) - 1e-8
    assert res.value == pytest.approx(0.5 * math.log(3), abs=1e-6)


def test_unknown_search_mode():
    with pytest.raises(ValueError):
        minimize_lower_bound([0.5], "grid")


@given(d=correlations(max_size=3), seed=seeds)
def test_bound_equals_information_carried_by_w(d, seed):
    # independent route: I(X12, X22; W) from the realization's joint covariance
    qw = random_feasible_qw(d, np.random.default_rng(seed))
    real = assemble_joint_covariance(d, qw)
    n = d.size
    oracle = gaussian_mi_from_covariance(real.Q_s, 2 * n)
    assert lower_bound_given_qw(d, qw) == pytest.approx(oracle, rel=1e-9, abs=1e-9)


@given(d=correlations(max_size=3), seed=seeds)
def test_gradient_matches_finite_differences(d, seed):
    rng = np.random.default_rng(seed)
    q = np.array(random_feasible_qw(d, rng, interior=0.8).Q_W)
    g = lower_bound_gradient(d, q)
    n = d.size
    h = 1e-6
    for i in range(n):
        for j in range(i, n):
            e = np.zeros((n, n))
            e[i, j] = e[j, i] = 1.0
            fd = (lower_bound_given_qw(d, q + h * e) - lower_bound_given_qw(d, q - h * e)) / (2 * h)
            analytic = g[i, j] * (1 if i == j else 2)
            assert analytic == pytest.approx(fd, rel=1e-4, abs=1e-5)


@given(d=correlations())
def test_gradient_vanishes_at_identity(d):
    assert np.max(np.abs(lower_bound_gradient(d, np.eye(d.size)))) <= 1e-12


@given(d=correlations())
def test_common_information_dominates_mutual_information(d):
    dec = decomp_of(d)
    assert wyner_common_information(dec).value >= mutual_information(dec) - 1e-15


@given(d=correlations(max_size=3), j=st.integers(0, 2), bump=st.floats(1e-4, 0.04))
def test_common_information_increases_with_each_correlation(d, j, bump):
    j = j % d.size
    up = d.copy()
    up[j] = min(up[j] + bump, 0.999)
    assert wyner_ci_closed_form(up) > wyner_ci_closed_form(d)


@given(d=correlations(max_size=3), seed=seeds)
def test_any_feasible_qw_bounds_common_information_from_above(d, seed):
    qw = random_feasible_qw(d, np.random.default_rng(seed))
    assert lower_bound_given_qw(d, qw) >= wyner_ci_closed_form(d) - 1e-10
