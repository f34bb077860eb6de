import numpy as np
import pytest

from decoupling_lab.errors import SymmetryError
from decoupling_lab.kernel import (constant_kernel, first_argument_kernel,
                                   product_kernel, random_coefficient_kernel)
from decoupling_lab.prob_engine import DiscreteLaw, StatisticSpec, exact_law
from decoupling_lab.value_space import DiscreteDistribution, rademacher, uniform
from decoupling_lab.verifier import (CorpusConfig, mazur_orlicz_exhaustive,
                                     minimal_constant, run_corpus,
                                     search_constant,
                                     symmetrized_expansion_residual,
                                     tails_dominated, verify_lemma1,
                                     verify_lemma2, verify_moment_comparison,
                                     verify_prop1)


def test_lemma1_rademacher():
    rep = verify_lemma1(rademacher())
    assert rep.passed
    row = next(r for r in rep.rows if r.t == 1.0)
    assert row.lhs == pytest.approx(1.0)
    assert row.rhs == pytest.approx(1.5)


def test_lemma1_degenerate():
    rep = verify_lemma1(DiscreteDistribution((0.0,), (1.0,)))
    assert rep.passed


def test_lemma1_uniform3_full_grid():
    rep = verify_lemma1(uniform(3))
    assert rep.passed
    assert len(rep.rows) > 1


def test_lemma1_vector_law():
    d = DiscreteDistribution(((1.0, 0.0), (-1.0, 0.0), (0.0, 2.0), (0.0, -2.0)),
                             (0.25, 0.25, 0.25, 0.25))
    assert verify_lemma1(d).passed


def test_prop1_examples():
    rep = verify_prop1(1.0, rademacher())
    assert rep.passed
    assert rep.rows[0].lhs == pytest.approx(0.5)
    assert rep.rows[0].rhs == pytest.approx(0.25)

    rep = verify_prop1(0.0, rademacher())
    assert rep.rows[0].lhs == pytest.approx(1.0)

    rep = verify_prop1(1.0, uniform(3))
    assert rep.rows[0].lhs == pytest.approx(2 / 3)
    assert rep.rows[0].rhs == pytest.approx(1 / 6)


def test_lemma2_examples():
    prob, rep = verify_lemma2({(0,): 1.0}, 1.0, 1)
    assert prob == pytest.approx(0.5)
    assert rep.passed

    prob, rep = verify_lemma2({}, 2.0, 3)
    assert prob == pytest.approx(1.0)

    rng = np.random.default_rng(0)
    coeffs = {(0, 1): 2.0, (1, 2): -1.0, (0,): 1.0}
    prob, rep = verify_lemma2(coeffs, 1.0, 3)
    assert prob > 0.0
    assert rep.passed


def test_moment_comparison_rademacher():
    # two-term linear chaos: ratio (E xi^4)^(1/4) / (E xi^2)^(1/2) = 2^(1/4)
    rep = verify_moment_comparison({(0,): 1.0, (1,): 1.0}, 2, 1, "rademacher")
    assert rep.passed
    assert rep.rows[0].lhs == pytest.approx(8 ** 0.25 / 2 ** 0.5)

    # single sign: two-point symmetric, ratio 1
    rep = verify_moment_comparison({(0,): 1.0}, 1, 1, "rademacher")
    assert rep.rows[0].lhs == pytest.approx(1.0)

    # degree-2 product of signs is again a sign: ratio 1 <= 3
    rep = verify_moment_comparison({(0, 1): 1.0}, 2, 2, "rademacher")
    assert rep.rows[0].lhs == pytest.approx(1.0)
    assert rep.rows[0].rhs == pytest.approx(3.0)


def test_moment_comparison_centered_selector():
    rng = np.random.default_rng(1)
    a = rng.integers(-3, 4, size=(3, 2)).astype(float)
    rep = verify_moment_comparison(a, 3, 1, "centered-selector", l=2, x0=1.0)
    assert rep.passed


def test_search_constant_zero_kernel():
    res = search_constant(constant_kernel(2, 3, c=0.0), rademacher(), "upper")
    assert res.feasible
    assert res.c_min == pytest.approx(1.0)


def test_search_constant_hand_derived_upper():
    res = search_constant(product_kernel(2, 2), rademacher(), "upper")
    assert res.feasible
    assert res.c_min == pytest.approx(2.0, abs=1e-3)


def test_search_constant_lower_symmetric():
    res = search_constant(product_kernel(2, 2), rademacher(), "lower")
    assert res.feasible
    assert res.c_min >= 1.0


def test_search_constant_lower_rejects_asymmetric():
    with pytest.raises(SymmetryError):
        search_constant(first_argument_kernel(2, 3), rademacher(), "lower")


def test_monotone_feasibility():
    kf = random_coefficient_kernel(2, 3, seed=4, symmetric=True)
    d = uniform(3)
    law_l = exact_law(StatisticSpec(kf, "coupled"), d)
    law_r = exact_law(StatisticSpec(kf, "pattern", pattern=(0, 1)), d)
    res = minimal_constant(law_l, law_r, "upper")
    assert res.feasible
    assert tails_dominated(law_l, law_r, res.c_min * 1.1)
    assert tails_dominated(law_l, law_r, res.c_min * 10.0)


def test_scale_covariance():
    # multiplying both laws' supports by s leaves the verdict unchanged
    kf = product_kernel(2, 3)
    d = rademacher()
    law_l = exact_law(StatisticSpec(kf, "coupled"), d)
    law_r = exact_law(StatisticSpec(kf, "pattern", pattern=(0, 1)), d)
    res = minimal_constant(law_l, law_r, "upper")
    s = 3.0
    scaled_l = DiscreteLaw(law_l.values * s, law_l.probs)
    scaled_r = DiscreteLaw(law_r.values * s, law_r.probs)
    res_s = minimal_constant(scaled_l, scaled_r, "upper")
    assert res_s.c_min == pytest.approx(res.c_min, rel=1e-9)


@pytest.mark.parametrize("l", [1, 2])
def test_search_constant_lemma3(l):
    res = search_constant(product_kernel(2, 3), rademacher(), "lemma3", l=l)
    assert res.feasible
    assert res.c_min < 2 ** 20


def test_mazur_orlicz_exhaustive_small():
    assert mazur_orlicz_exhaustive(4)


def test_symmetrized_expansion_residual():
    rng = np.random.default_rng(5)
    for k in (2, 3):
        kf = random_coefficient_kernel(k, k + 1, seed=k, symmetric=True)
        s = rng.normal(size=(k + 1, k))
        assert symmetrized_expansion_residual(kf, s) <= 1e-12


def test_run_corpus_empty_checks():
    rep = run_corpus(CorpusConfig(checks=()))
    assert rep["summary"]["total"] == 0
    assert rep["summary"]["failed"] == 0


def test_run_corpus_small():
    cfg = CorpusConfig(nk_pairs=((3, 2),), distributions=("rademacher",),
                       kernel_classes=("product", "coeff"),
                       checks=("identities", "lemma1", "theorem1_upper"),
                       law_count=5, mc_trials=500)
    rep = run_corpus(cfg)
    assert rep["summary"]["failed"] == 0
    assert rep["summary"]["total"] > 0
