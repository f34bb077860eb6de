"""Indexed families of k-argument kernels and permutation machinery.

A kernel family assigns to each tuple of distinct row indices a function of k
sample values.  Evaluation is vectorized: each argument may be a float or a
numpy array of trial values, and the result broadcasts accordingly (shape
(..., dim) when dim > 1).  Index tuples are 0-based throughout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np

from .errors import BudgetExceededError, ValidationError
from .value_space import DiscreteDistribution

FACTORIAL_BUDGET = 7  # largest k for which permutation loops are allowed


@dataclass(frozen=True)
class KernelFamily:
    """Family f_{i_1...i_k} of k-argument functions on sample values.

    `evaluate(idx, args)` takes a tuple of k distinct 0-based indices and a
    tuple of k argument arrays; it must be deterministic and reentrant.
    """

    k: int
    n: int
    evaluate: Callable
    symmetric_claimed: bool = False
    dim: int = 1
    label: str = "kernel"

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValidationError("kernel order and index bound must be >= 1")


def distinct_tuples(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """All ordered tuples of k pairwise-distinct indices from {0,...,n-1}."""
    return itertools.permutations(range(n), k)


def count_distinct_tuples(n: int, k: int) -> int:
    if k > n:
        return 0
    return math.perm(n, k)


def symmetrize(kf: KernelFamily) -> KernelFamily:
    """Sum of the kernel over all k! joint permutations of indices and arguments."""
    if kf.k > FACTORIAL_BUDGET:
        raise BudgetExceededError(f"symmetrize: k={kf.k} exceeds factorial budget")
    perms = list(itertools.permutations(range(kf.k)))

    def sym_eval(idx, args):
        total = None
        for pi in perms:
            v = kf.evaluate(tuple(idx[p] for p in pi), tuple(args[p] for p in pi))
            total = v if total is None else total + v
        return total

    return KernelFamily(kf.k, kf.n, sym_eval, symmetric_claimed=True,
                        dim=kf.dim, label=f"sym({kf.label})")


def check_symmetry(kf: KernelFamily, dist: DiscreteDistribution,
                   trials: int = 200, seed: int = 0, tol: float = 1e-12) -> bool:
    """Random probe of the joint index/argument permutation invariance."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    values = dist.values_array()
    for _ in range(trials):
        idx = tuple(int(i) for i in rng.permutation(kf.n)[: kf.k])
        args = tuple(float(values[j]) for j in rng.integers(0, dist.size, size=kf.k))
        pi = tuple(int(p) for p in rng.permutation(kf.k))
        base = np.asarray(kf.evaluate(idx, args), dtype=float)
        permuted = np.asarray(
            kf.evaluate(tuple(idx[p] for p in pi), tuple(args[p] for p in pi)),
            dtype=float,
        )
        if np.max(np.abs(base - permuted)) > tol:
            return False
    return True


@lru_cache(maxsize=None)
def _delta_table(k: int):
    deltas = np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.int64)
    signs = np.where((k - deltas.sum(axis=1)) % 2 == 0, 1, -1)
    return deltas, signs


def mazur_orlicz_coefficient(j_tuple) -> int:
    """Inclusion-exclusion coefficient over {0,1}^k selector vectors.

    Equals 1 when j_tuple is a permutation of (0,...,k-1) and 0 otherwise.
    """
    j = tuple(int(x) for x in j_tuple)
    k = len(j)
    if any(x < 0 or x >= k for x in j):
        raise ValidationError(f"entries of {j} must lie in 0..{k - 1}")
    deltas, signs = _delta_table(k)
    prod = deltas[:, j].prod(axis=1)
    return int(np.dot(signs, prod))


# ---------------------------------------------------------------------------
# kernel corpus constructors
# ---------------------------------------------------------------------------

def _broadcast_const(c, args):
    # c plus a zero multiple of the first argument, so batch shapes survive
    base = 0.0 * np.asarray(args[0], dtype=float)
    c = np.asarray(c, dtype=float)
    if c.ndim == 0:
        return base + float(c)
    return base[..., None] + c


def constant_kernel(k: int, n: int, c=1.0, dim: int = 1) -> KernelFamily:
    def ev(idx, args):
        return _broadcast_const(c, args)
    return KernelFamily(k, n, ev, symmetric_claimed=True, dim=dim, label=f"const({c})")


def product_kernel(k: int, n: int) -> KernelFamily:
    """f(x_1,...,x_k) = x_1 x_2 ... x_k, independent of the index tuple."""
    def ev(idx, args):
        out = np.asarray(args[0], dtype=float)
        for a in args[1:]:
            out = out * np.asarray(a, dtype=float)
        return out
    return KernelFamily(k, n, ev, symmetric_claimed=True, label="product")


def affine_product_kernel(k: int, n: int, c: float = 1.0) -> KernelFamily:
    base = product_kernel(k, n)
    def ev(idx, args):
        return base.evaluate(idx, args) + c
    return KernelFamily(k, n, ev, symmetric_claimed=True, label=f"product+{c}")


def first_argument_kernel(k: int, n: int) -> KernelFamily:
    """Asymmetric probe: returns the first argument only."""
    def ev(idx, args):
        return np.asarray(args[0], dtype=float) + 0.0
    return KernelFamily(k, n, ev, symmetric_claimed=False, label="first-arg")


def random_coefficient_kernel(k: int, n: int, seed: int = 0,
                              symmetric: bool = False, dim: int = 1) -> KernelFamily:
    """Integer coefficients in [-3, 3] per index tuple, times the product of args.

    With symmetric=True the coefficient depends on the sorted tuple only, which
    makes the family satisfy the joint permutation-invariance condition.
    """
    rng = np.random.default_rng(seed)
    coeffs = {}
    for t in distinct_tuples(n, k):
        key = tuple(sorted(t)) if symmetric else t
        if key not in coeffs:
            c = rng.integers(-3, 4, size=dim)
            coeffs[key] = float(c[0]) if dim == 1 else c.astype(float)
    prod = product_kernel(k, n)

    def ev(idx, args):
        key = tuple(sorted(idx)) if symmetric else tuple(idx)
        c = coeffs[key]
        p = prod.evaluate(idx, args)
        if dim == 1:
            return c * p
        return np.asarray(p, dtype=float)[..., None] * c

    tag = "sym-coeff" if symmetric else "coeff"
    return KernelFamily(k, n, ev, symmetric_claimed=symmetric, dim=dim,
                        label=f"{tag}(seed={seed})")
