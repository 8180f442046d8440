import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_covariance, seeds
from gwrate.errors import AsymmetryTooLarge, DimensionMismatch, InputError, NotPositiveSemidefinite
from gwrate.model import (
    NumericTolerances,
    block,
    canonical_pair,
    effective_rank,
    load_pair,
    psd_inv_sqrt,
    psd_sqrt,
    scalar_pair,
    validate_joint_covariance,
)


def test_scalar_pair_is_valid_full_rank():
    pair = validate_joint_covariance([[1, 0.5], [0.5, 1]], 1, 1)
    assert (pair.rank1, pair.rank2) == (1, 1)
    assert pair.full_rank
    assert block(pair, "cross").tolist() == [[0.5]]


def test_indefinite_matrix_rejected():
    with pytest.raises(NotPositiveSemidefinite):
        validate_joint_covariance([[1, 2], [2, 1]], 1, 1)


def test_independent_sources_have_zero_cross_block():
    pair = validate_joint_covariance(np.eye(4), 2, 2)
    assert np.array_equal(block(pair, "cross"), np.zeros((2, 2)))
    assert np.array_equal(block(pair, "X1"), np.eye(2))


def test_block_returns_copies():
    pair = scalar_pair(0.5)
    b = block(pair, "X1")
    b[0, 0] = 99
    assert pair.Q[0, 0] == 1.0
    with pytest.raises(ValueError):
        pair.Q[0, 0] = 2.0


@pytest.mark.parametrize(
    "matrix, p1, p2, err",
    [
        (np.eye(3), 1, 1, DimensionMismatch),
        (np.eye(2), 0, 2, DimensionMismatch),
        ([[1, np.nan], [np.nan, 1]], 1, 1, InputError),
        ([[1, 0.5], [0.5 + 1e-6, 1]], 1, 1, AsymmetryTooLarge),
    ],
)
def test_malformed_inputs(matrix, p1, p2, err):
    with pytest.raises(err):
        validate_joint_covariance(matrix, p1, p2)


def test_tiny_asymmetry_is_symmetrized():
    pair = validate_joint_covariance([[1, 0.5], [0.5 + 1e-14, 1]], 1, 1)
    assert np.array_equal(pair.Q, pair.Q.T)


def test_rank_deficient_marginal_recorded():
    a = np.array([[1.0, 1.0, 0.5], [1.0, 1.0, 0.5], [0.5, 0.5, 1.0]])
    pair = validate_joint_covariance(a, 2, 1)
    assert (pair.rank1, pair.rank2) == (1, 1)
    assert not pair.full_rank


def test_tolerance_bands_validated():
    with pytest.raises(ValueError):
        NumericTolerances(one_tol=0.6, zero_tol=0.5)
    with pytest.raises(ValueError):
        NumericTolerances(psd_tol=-1)


def test_load_pair_roundtrip(tmp_path):
    path = tmp_path / "pair.json"
    path.write_text(json.dumps(scalar_pair(0.3, 2.0, 3.0).to_json()))
    pair = load_pair(path)
    assert pair.p1 == 1 and np.isclose(pair.Q[0, 1], 0.3 * np.sqrt(6))


@pytest.mark.parametrize("text", ["not json", '{"p1": 1, "Q": [[1]]}', '{"p1": 1, "p2": 1, "Q": "x"}'])
def test_load_pair_parse_errors(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(InputError):
        load_pair(path)


def test_canonical_pair_layout():
    pair = canonical_pair([0.9, 0.3], p13=1)
    assert (pair.p1, pair.p2) == (3, 2)
    assert np.array_equal(block(pair, "cross"), [[0.9, 0], [0, 0.3], [0, 0]])


@given(seed=seeds, p1=st.integers(1, 4), p2=st.integers(1, 4))
def test_random_gram_matrices_accepted(seed, p1, p2):
    rng = np.random.default_rng(seed)
    pair = validate_joint_covariance(random_covariance(rng, p1, p2), p1, p2)
    assert np.array_equal(pair.Q, pair.Q.T)
    assert pair.rank1 == p1 and pair.rank2 == p2


@given(seed=seeds, p=st.integers(1, 5))
def test_psd_square_roots(seed, p):
    rng = np.random.default_rng(seed)
    m = random_covariance(rng, p, 0) + 0.1 * np.eye(p)
    r = psd_sqrt(m)
    assert np.allclose(r @ r, m, atol=1e-9 * np.abs(m).max())
    ri = psd_inv_sqrt(m)
    assert np.allclose(ri @ m @ ri, np.eye(p), atol=1e-8)
    assert effective_rank(m) == p
