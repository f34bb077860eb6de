import math

import numpy as np
import pytest

from decoupling_lab.errors import BudgetExceededError, ValidationError
from decoupling_lab.value_space import (DiscreteDistribution, make_distribution,
                                        norm, product_enumerate, rademacher,
                                        uniform)


def test_norm_examples():
    assert norm([0.0, 0.0], "euclidean") == 0.0
    assert norm([3.0, 4.0], "euclidean") == 5.0
    assert norm([3.0, 4.0], "maximum") == 4.0
    assert norm([3.0, 4.0], "abs_sum") == 7.0
    assert norm(-2.5, "euclidean") == 2.5


def test_norm_rejects_bad_kind():
    with pytest.raises(ValidationError):
        norm([1.0], "manhattan")


@pytest.mark.parametrize("kind", ["abs_sum", "euclidean", "maximum"])
def test_norm_axioms_random_vectors(kind):
    rng = np.random.default_rng(7)
    for _ in range(1000):
        dim = int(rng.integers(1, 5))
        a = rng.normal(size=dim)
        b = rng.normal(size=dim)
        c = float(rng.normal())
        assert norm(a, kind) >= 0.0
        assert norm(np.zeros(dim), kind) == 0.0
        assert norm(a + b, kind) <= norm(a, kind) + norm(b, kind) + 1e-12
        assert norm(c * a, kind) == pytest.approx(abs(c) * norm(a, kind), abs=1e-12)
    # definiteness: nonzero vector has nonzero norm
    assert norm([0.0, 1e-30], kind) > 0.0


def test_rademacher_definition():
    d = rademacher()
    assert set(d.atoms) == {-1.0, 1.0}
    assert d.probs == (0.5, 0.5)


def test_uniform_definition():
    d = uniform(3)
    assert d.size == 3
    assert all(p == pytest.approx(1 / 3) for p in d.probs)
    assert sum(d.atoms) == 0.0


def test_make_distribution_validation():
    with pytest.raises(ValidationError):
        make_distribution([(1.0, 0.7)])
    with pytest.raises(ValidationError):
        make_distribution([(1.0, 0.5), (1.0, 0.5)])
    with pytest.raises(ValidationError):
        make_distribution([(1.0, 1.5), (2.0, -0.5)])
    with pytest.raises(ValidationError):
        DiscreteDistribution((), ())


def test_product_enumerate_counts_and_mass():
    d = rademacher()
    combos = list(product_enumerate(d, 2))
    assert len(combos) == 4
    assert all(p == pytest.approx(0.25) for _, p in combos)

    combos = list(product_enumerate(uniform(3), 1))
    assert len(combos) == 3

    combos = list(product_enumerate(d, 8))
    assert len(combos) == 256
    assert math.fsum(p for _, p in combos) == pytest.approx(1.0, abs=1e-12)


def test_product_enumerate_budget():
    with pytest.raises(BudgetExceededError):
        list(product_enumerate(uniform(3), 20, budget=1000))


@pytest.mark.parametrize("m,count", [(2, 3), (3, 4), (4, 2)])
def test_product_enumerate_mass_sums_to_one(m, count):
    total = math.fsum(p for _, p in product_enumerate(uniform(m), count))
    assert abs(total - 1.0) <= 1e-12
