"""Coupled, decoupled, and mixed U-statistic sums for fixed sample matrices.

A sample matrix is a numpy array of shape (n, copies) whose (i, j) entry is
the realization of the j-th independent copy of the i-th variable.  A leading
batch axis is allowed everywhere, so the same code paths serve single
realizations and vectorized Monte Carlo / enumeration sweeps.

Tuple iteration is lexicographic and accumulation is chunked pairwise, so
results are reproducible bit for bit.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import BudgetExceededError, ValidationError
from .kernel import FACTORIAL_BUDGET, KernelFamily, distinct_tuples

_PAIRWISE_CHUNK = 2 ** 12
MAX_TUPLE_COUNT = 2 ** 24


def _check_sample(kf: KernelFamily, s: np.ndarray, copies_needed: int) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.ndim < 2:
        raise ValidationError("sample matrix must have shape (..., n, copies)")
    if s.shape[-2] != kf.n:
        raise ValidationError(f"sample has {s.shape[-2]} rows, kernel expects n={kf.n}")
    if s.shape[-1] < copies_needed:
        raise ValidationError(
            f"sample has {s.shape[-1]} copies, statistic needs {copies_needed}")
    if kf.k > kf.n:
        raise ValidationError("kernel order k exceeds n")
    if math.perm(kf.n, kf.k) > MAX_TUPLE_COUNT:
        raise BudgetExceededError("distinct tuple count exceeds evaluation ceiling")
    return s


def _sum_terms(terms):
    """Chunked pairwise accumulation of a sequence of equal-shaped arrays."""
    partials = []
    chunk = []
    for t in terms:
        chunk.append(np.asarray(t, dtype=float))
        if len(chunk) == _PAIRWISE_CHUNK:
            partials.append(np.sum(np.stack(chunk), axis=0))
            chunk = []
    if chunk:
        partials.append(np.sum(np.stack(chunk), axis=0))
    if len(partials) == 1:
        return partials[0]
    return np.sum(np.stack(partials), axis=0)


def pattern_sum(kf: KernelFamily, s: np.ndarray, pattern) -> np.ndarray:
    """Sum over distinct index tuples with copy assignments given by `pattern`.

    Pattern (0,...,0) is the coupled statistic; (0,1,...,k-1) the fully
    decoupled one.
    """
    pattern = tuple(int(p) for p in pattern)
    if len(pattern) != kf.k:
        raise ValidationError("pattern length must equal kernel order")
    s = _check_sample(kf, s, max(pattern) + 1)
    terms = (
        kf.evaluate(idx, tuple(s[..., idx[r], pattern[r]] for r in range(kf.k)))
        for idx in distinct_tuples(kf.n, kf.k)
    )
    return _sum_terms(terms)


def mixed_sum(kf: KernelFamily, s: np.ndarray, l: int) -> np.ndarray:
    """Sum over all distinct tuples and all l^k copy patterns."""
    if l < 1:
        raise ValidationError("l must be >= 1")
    _check_sample(kf, s, l)
    terms = (pattern_sum(kf, s, p) for p in itertools.product(range(l), repeat=kf.k))
    return _sum_terms(terms)


def not_all_equal_sum(kf: KernelFamily, s: np.ndarray) -> np.ndarray:
    """Two-copy mixed sum minus the two all-equal pattern sums."""
    k = kf.k
    return (mixed_sum(kf, s, 2)
            - pattern_sum(kf, s, (0,) * k)
            - pattern_sum(kf, s, (1,) * k))


def symmetrized_decoupled_sum(kf: KernelFamily, s: np.ndarray) -> np.ndarray:
    """Sum over all distinct tuples and all k! permutation copy patterns."""
    if kf.k > FACTORIAL_BUDGET:
        raise BudgetExceededError(f"k={kf.k} exceeds factorial budget")
    _check_sample(kf, s, kf.k)
    terms = (pattern_sum(kf, s, pi)
             for pi in itertools.permutations(range(kf.k)))
    return _sum_terms(terms)
