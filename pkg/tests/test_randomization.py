import itertools

import numpy as np
import pytest

from decoupling_lab.errors import ValidationError
from decoupling_lab.kernel import (constant_kernel, product_kernel,
                                   random_coefficient_kernel)
from decoupling_lab.randomization import (all_choice_vectors, all_sign_vectors,
                                          choices_from_selector,
                                          distributional_equality_check,
                                          expansion_residual,
                                          expansion_residual_batch,
                                          pattern_invariance_spread,
                                          selector_conditional_expectation,
                                          selector_couple, selector_matrix,
                                          sign_conditional_expectation,
                                          sign_couple)
from decoupling_lab.ustat_engine import mixed_sum, pattern_sum
from decoupling_lab.value_space import rademacher, uniform


def test_all_sign_vectors():
    sv = all_sign_vectors(3)
    assert sv.shape == (8, 3)
    assert set(map(tuple, sv)) == set(itertools.product((-1, 1), repeat=3))


def test_sign_couple_identity_and_swap():
    rng = np.random.default_rng(0)
    s = rng.normal(size=(4, 2))
    np.testing.assert_array_equal(sign_couple(s, [1, 1, 1, 1]), s)
    np.testing.assert_array_equal(sign_couple(s, [-1] * 4), s[:, ::-1])
    mixed = sign_couple(s[:2], [1, -1])
    np.testing.assert_array_equal(mixed[0], s[0])
    np.testing.assert_array_equal(mixed[1], s[1, ::-1])


def test_sign_couple_validation():
    s = np.zeros((3, 2))
    with pytest.raises(ValidationError):
        sign_couple(s, [1, 1])
    with pytest.raises(ValidationError):
        sign_couple(s, [1, 0, 1])


def test_expansion_residual_all_plus_signs():
    kf = product_kernel(2, 3)
    rng = np.random.default_rng(1)
    s = rng.normal(size=(3, 2))
    assert expansion_residual(kf, s, [1, 1, 1], (0, 1)) <= 1e-12


@pytest.mark.parametrize("pattern", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_expansion_residual_random_signs(pattern):
    kf = product_kernel(2, 3)
    rng = np.random.default_rng(2)
    s = rng.choice([-1.0, 1.0], size=(3, 2))
    signs = all_sign_vectors(3)
    res = expansion_residual_batch(kf, s, signs, pattern)
    assert float(np.max(res)) <= 1e-12


def test_expansion_residual_k3():
    # the k = 3 case with mixed copy pattern (0, 0, 1)
    kf = random_coefficient_kernel(3, 4, seed=9)
    rng = np.random.default_rng(3)
    s = rng.normal(size=(4, 2))
    res = expansion_residual_batch(kf, s, all_sign_vectors(4), (0, 0, 1))
    assert float(np.max(res)) <= 1e-12


def test_sign_conditional_expectation_constant():
    kf = constant_kernel(2, 2, c=1.0)
    s = np.zeros((2, 2))
    ce = sign_conditional_expectation(kf, s, (0, 0))
    assert ce == pytest.approx(2.0)
    assert ce == pytest.approx(mixed_sum(kf, s, 2) / 4.0)


def test_sign_conditional_expectation_pattern_invariant():
    kf = random_coefficient_kernel(2, 4, seed=1)
    rng = np.random.default_rng(4)
    s = rng.normal(size=(4, 2))
    assert pattern_invariance_spread(kf, s) <= 1e-12


def test_selector_couple():
    rng = np.random.default_rng(5)
    s = rng.normal(size=(3, 3))
    np.testing.assert_array_equal(selector_couple(s[:, :1], [0, 0, 0]), s[:, 0])
    np.testing.assert_array_equal(selector_couple(s, [0, 0, 0]), s[:, 0])
    out = selector_couple(s[:2], [0, 1])
    assert out[0] == s[0, 0] and out[1] == s[1, 1]


def test_selector_matrix_roundtrip():
    sm = selector_matrix([2, 0, 1], 3)
    assert sm.sum(axis=1).tolist() == [1, 1, 1]
    np.testing.assert_array_equal(choices_from_selector(sm), [2, 0, 1])
    with pytest.raises(ValidationError):
        choices_from_selector(np.array([[1, 1], [0, 1]]))


def test_centered_selector_rows_sum_to_zero():
    for choices in all_choice_vectors(4, 3):
        sm = selector_matrix(choices, 3)
        centered = sm - 1.0 / 3.0
        np.testing.assert_allclose(centered.sum(axis=1), 0.0, atol=1e-12)


def test_selector_conditional_expectation_l1():
    kf = product_kernel(2, 3)
    rng = np.random.default_rng(6)
    s = rng.normal(size=(3, 2))
    assert selector_conditional_expectation(kf, s, 1) == pytest.approx(
        pattern_sum(kf, s, (0, 0)))


def test_selector_conditional_expectation_counting():
    kf = constant_kernel(2, 2, c=1.0)
    s = np.zeros((2, 2))
    assert selector_conditional_expectation(kf, s, 2) == pytest.approx(2.0)


@pytest.mark.parametrize("l", [1, 2, 3])
def test_selector_conditional_expectation_identity(l):
    kf = random_coefficient_kernel(2, 4, seed=7)
    rng = np.random.default_rng(7)
    s = rng.normal(size=(4, 3))
    ce = selector_conditional_expectation(kf, s, l)
    assert ce == pytest.approx(mixed_sum(kf, s, l) / l ** 2, abs=1e-12)


def test_distributional_equality_selector():
    assert distributional_equality_check(rademacher(), 2, "selector", 2)
    assert distributional_equality_check(uniform(3), 2, "selector", 3)


def test_distributional_equality_sign():
    assert distributional_equality_check(rademacher(), 3, "sign")
    assert distributional_equality_check(uniform(3), 2, "sign")
