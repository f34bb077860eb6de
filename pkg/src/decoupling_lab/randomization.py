"""Sign and selector couplings and their exact conditional-expectation identities.

Sign coupling swaps the two columns of a sample matrix row-wise according to a
vector of +/-1 signs.  Selector coupling picks one of l columns per row via
0/1 indicator rows summing to 1.  Both leave the joint law of the sample
invariant, and averaging over the randomization exactly recovers rescaled
mixed sums; the functions here verify those facts by exhaustive averaging,
never by sampling.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import BudgetExceededError, ValidationError
from .kernel import KernelFamily, distinct_tuples
from .ustat_engine import _sum_terms, mixed_sum
from .value_space import DiscreteDistribution, norm

DEFAULT_RANDOMIZATION_BUDGET = 2 ** 24


def all_sign_vectors(n: int) -> np.ndarray:
    """All 2^n vectors of +/-1, one per row, in binary counting order."""
    bits = (np.arange(2 ** n)[:, None] >> np.arange(n)[None, :]) & 1
    return (2 * bits - 1).astype(np.int64)


def all_choice_vectors(n: int, l: int) -> np.ndarray:
    """All l^n column-choice vectors, one per row, in mixed-radix order."""
    idx = np.arange(l ** n)[:, None]
    return (idx // (l ** np.arange(n)[None, :])) % l


def selector_matrix(choices, l: int) -> np.ndarray:
    """0/1 selector matrix with exactly one 1 per row, from column choices."""
    choices = np.asarray(choices, dtype=np.int64)
    if choices.ndim != 1 or np.any(choices < 0) or np.any(choices >= l):
        raise ValidationError("choices must be a vector with entries in 0..l-1")
    out = np.zeros((choices.size, l), dtype=np.int64)
    out[np.arange(choices.size), choices] = 1
    return out


def choices_from_selector(sm: np.ndarray) -> np.ndarray:
    sm = np.asarray(sm)
    if sm.ndim != 2 or not np.all((sm == 0) | (sm == 1)):
        raise ValidationError("selector matrix must be 0/1")
    if not np.all(sm.sum(axis=1) == 1):
        raise ValidationError("each selector row must sum to exactly 1")
    return np.argmax(sm, axis=1)


def sign_couple(s: np.ndarray, signs) -> np.ndarray:
    """Swap the two columns of row i when the i-th sign is -1."""
    s = np.asarray(s, dtype=float)
    signs = np.asarray(signs, dtype=np.int64)
    if s.ndim != 2 or s.shape[1] != 2:
        raise ValidationError("sign coupling needs a two-column sample matrix")
    if signs.shape != (s.shape[0],):
        raise ValidationError("sign vector length must match row count")
    if not np.all(np.abs(signs) == 1):
        raise ValidationError("signs must be +/-1")
    return np.where(signs[:, None] > 0, s, s[:, ::-1])


def selector_couple(s: np.ndarray, choices) -> np.ndarray:
    """Pick the chosen column entry per row."""
    s = np.asarray(s, dtype=float)
    choices = np.asarray(choices, dtype=np.int64)
    if choices.shape != (s.shape[0],):
        raise ValidationError("choice vector length must match row count")
    if np.any(choices < 0) or np.any(choices >= s.shape[1]):
        raise ValidationError("choice out of column range")
    return s[np.arange(s.shape[0]), choices]


def _pattern_sum_under_signs(kf: KernelFamily, s: np.ndarray,
                             signs: np.ndarray, pattern) -> np.ndarray:
    """pattern_sum on the sign-coupled sample, vectorized over a batch of signs."""
    pattern = tuple(int(p) for p in pattern)
    terms = []
    for idx in distinct_tuples(kf.n, kf.k):
        args = tuple(
            np.where(signs[:, idx[r]] > 0, s[idx[r], pattern[r]], s[idx[r], 1 - pattern[r]])
            for r in range(kf.k)
        )
        terms.append(kf.evaluate(idx, args))
    return _sum_terms(terms)


def _coupled_sum_under_choices(kf: KernelFamily, s: np.ndarray,
                               choices: np.ndarray) -> np.ndarray:
    """Coupled statistic on the selector-coupled sample, batched over choices."""
    z = s[np.arange(s.shape[0])[None, :], choices]  # (B, n)
    terms = []
    for idx in distinct_tuples(kf.n, kf.k):
        terms.append(kf.evaluate(idx, tuple(z[:, idx[r]] for r in range(kf.k))))
    return _sum_terms(terms)


def expansion_residual_batch(kf: KernelFamily, s: np.ndarray,
                             signs: np.ndarray, pattern) -> np.ndarray:
    """Residual of the 2^k sign-product expansion, per sign vector in the batch.

    Left side: 2^k times the pattern sum on the coupled sample.  Right side:
    for each copy pattern j, the product over slots of (1 + sign) when the
    j entry matches the target pattern and (1 - sign) otherwise, times the
    original kernel term.  The contract is that the residual is identically 0.
    """
    s = np.asarray(s, dtype=float)
    signs = np.asarray(signs, dtype=np.int64)
    pattern = tuple(int(p) for p in pattern)
    k = kf.k
    lhs = (2.0 ** k) * _pattern_sum_under_signs(kf, s, signs, pattern)
    rhs_terms = []
    for idx in distinct_tuples(kf.n, kf.k):
        for j in itertools.product((0, 1), repeat=k):
            coeff = np.ones(signs.shape[0])
            for r in range(k):
                sr = signs[:, idx[r]]
                coeff = coeff * (1 + sr if j[r] == pattern[r] else 1 - sr)
            fval = np.asarray(
                kf.evaluate(idx, tuple(float(s[idx[r], j[r]]) for r in range(k))),
                dtype=float,
            )
            if kf.dim == 1:
                rhs_terms.append(coeff * fval)
            else:
                rhs_terms.append(coeff[:, None] * fval)
    rhs = _sum_terms(rhs_terms)
    diff = lhs - rhs
    if kf.dim == 1:
        return np.abs(diff)
    return np.sqrt(np.sum(diff * diff, axis=-1))


def expansion_residual(kf: KernelFamily, s: np.ndarray, signs, pattern) -> float:
    """Residual of the sign-product expansion for one sign vector."""
    signs = np.asarray(signs, dtype=np.int64)
    return float(expansion_residual_batch(kf, s, signs[None, :], pattern)[0])


def sign_conditional_expectation(kf: KernelFamily, s: np.ndarray, pattern,
                                 budget: int = DEFAULT_RANDOMIZATION_BUDGET):
    """Exact average of the coupled pattern sum over all 2^n sign vectors.

    Equals 2^{-k} times the two-copy mixed sum, for every pattern.
    """
    s = np.asarray(s, dtype=float)
    n = s.shape[0]
    if 2 ** n > budget:
        raise BudgetExceededError(f"2^{n} sign vectors exceed budget {budget}")
    signs = all_sign_vectors(n)
    values = _pattern_sum_under_signs(kf, s, signs, pattern)
    return np.mean(values, axis=0)


def selector_conditional_expectation(kf: KernelFamily, s: np.ndarray, l: int,
                                     budget: int = DEFAULT_RANDOMIZATION_BUDGET):
    """Exact average of the coupled statistic over all l^n selector matrices.

    Equals (1/l)^k times the l-copy mixed sum.
    """
    s = np.asarray(s, dtype=float)
    if s.shape[1] < l:
        raise ValidationError("sample has fewer columns than l")
    n = s.shape[0]
    if l ** n > budget:
        raise BudgetExceededError(f"{l}^{n} selector matrices exceed budget {budget}")
    choices = all_choice_vectors(n, l)
    values = _coupled_sum_under_choices(kf, s[:, :l], choices)
    return np.mean(values, axis=0)


def distributional_equality_check(dist: DiscreteDistribution, n: int,
                                  coupling: str = "selector", l: int = 2,
                                  budget: int = DEFAULT_RANDOMIZATION_BUDGET,
                                  tol: float = 1e-12) -> bool:
    """Exact law comparison between the coupled sample and a fresh copy.

    For selector coupling the induced law of (Z_1,...,Z_n) is compared with
    the product law of one copy; for sign coupling the law of the full
    two-column coupled matrix is compared with the product law of two copies.
    Returns True iff the total-variation distance is at most `tol`.
    """
    m = dist.size
    if coupling == "sign":
        cells, rand_count = 2 * n, 2 ** n
    elif coupling == "selector":
        if l < 1:
            raise ValidationError("l must be >= 1")
        cells, rand_count = n * l, l ** n
    else:
        raise ValidationError(f"unknown coupling {coupling!r}")
    total = (m ** cells) * rand_count
    if total > budget:
        raise BudgetExceededError(f"{total} joint assignments exceed budget {budget}")

    induced: dict = {}
    reference: dict = {}
    for combo in itertools.product(range(m), repeat=cells):
        p_sample = 1.0
        for i in combo:
            p_sample *= dist.probs[i]
        rows = [combo[i * (cells // n):(i + 1) * (cells // n)] for i in range(n)]
        if coupling == "sign":
            key_ref = tuple(rows)
            reference[key_ref] = reference.get(key_ref, 0.0) + p_sample
            for bits in itertools.product((0, 1), repeat=n):
                key = tuple(
                    rows[i] if bits[i] == 0 else (rows[i][1], rows[i][0])
                    for i in range(n)
                )
                induced[key] = induced.get(key, 0.0) + p_sample / rand_count
        else:
            for choice in itertools.product(range(l), repeat=n):
                key = tuple(rows[i][choice[i]] for i in range(n))
                induced[key] = induced.get(key, 0.0) + p_sample / rand_count
    if coupling == "selector":
        for combo, p in _product_assignments(dist, n):
            reference[combo] = reference.get(combo, 0.0) + p

    tv = 0.5 * sum(
        abs(induced.get(key, 0.0) - reference.get(key, 0.0))
        for key in set(induced) | set(reference)
    )
    return tv <= tol


def _product_assignments(dist: DiscreteDistribution, count: int):
    for combo in itertools.product(range(dist.size), repeat=count):
        p = 1.0
        for i in combo:
            p *= dist.probs[i]
        yield combo, p


def pattern_invariance_spread(kf: KernelFamily, s: np.ndarray,
                              norm_kind: str = "euclidean") -> float:
    """Max distance between sign conditional expectations across all patterns.

    The identity says all 2^k patterns give the same value, namely
    2^{-k} mixed_sum(l=2); the return value should be ~0.
    """
    target = np.asarray(mixed_sum(kf, s, 2), dtype=float) / (2.0 ** kf.k)
    worst = 0.0
    for pattern in itertools.product((0, 1), repeat=kf.k):
        ce = np.asarray(sign_conditional_expectation(kf, s, pattern), dtype=float)
        worst = max(worst, norm(ce - target, norm_kind))
    return worst
