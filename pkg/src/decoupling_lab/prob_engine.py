"""Exact and Monte Carlo laws of U-statistic norms.

Exact laws come from full enumeration of sample-matrix realizations; Monte
Carlo tails use a counter-based (Philox) generator so that identical
(seed, spec) inputs give bit-identical output regardless of scheduling.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import beta, qmc

from .errors import BudgetExceededError, ValidationError
from .kernel import KernelFamily, distinct_tuples
from .ustat_engine import _sum_terms
from .value_space import DEFAULT_ENUM_BUDGET, DUAL_NORM, DiscreteDistribution, batch_norm

_VALUE_DECIMALS = 12  # aggregation resolution for norm values
_CHUNK = 2 ** 15


@dataclass(frozen=True)
class DiscreteLaw:
    """Finite law on the real line with strictly increasing support."""

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        p = np.asarray(self.probs, dtype=float)
        if v.ndim != 1 or v.shape != p.shape or v.size == 0:
            raise ValidationError("law needs matching non-empty value/prob vectors")
        if np.any(np.diff(v) <= 0):
            raise ValidationError("support values must be strictly increasing")
        if np.any(p <= 0) or abs(float(p.sum()) - 1.0) > 1e-9:
            raise ValidationError("probabilities must be positive and sum to 1")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probs", p)


def aggregate_law(values, probs) -> DiscreteLaw:
    """Collapse repeated values (up to rounding resolution) into one law."""
    v = np.round(np.asarray(values, dtype=float), _VALUE_DECIMALS)
    p = np.asarray(probs, dtype=float)
    uniq, inv = np.unique(v, return_inverse=True)
    agg = np.zeros(uniq.size)
    np.add.at(agg, inv, p)
    keep = agg > 0
    return DiscreteLaw(uniq[keep], agg[keep] / agg.sum())


def tail(law: DiscreteLaw, t: float) -> float:
    """P(value >= t)."""
    return float(law.probs[law.values >= t].sum())


def moment(law: DiscreteLaw, p: int) -> float:
    """(E |value|^p)^(1/p)."""
    return float(np.dot(law.probs, np.abs(law.values) ** p) ** (1.0 / p))


@dataclass(frozen=True)
class StatisticSpec:
    """One of the sums whose norm tail the theorems compare.

    mode: 'coupled', 'pattern' (with `pattern`), 'mixed' (with `l`),
    'not_all_equal', or 'symmetrized'.
    """

    kernel: KernelFamily
    mode: str
    pattern: Optional[tuple] = None
    l: Optional[int] = None
    norm_kind: str = "euclidean"

    def __post_init__(self):
        k = self.kernel.k
        if self.mode == "pattern":
            if self.pattern is None or len(self.pattern) != k:
                raise ValidationError("pattern mode needs a pattern of length k")
        elif self.mode == "mixed":
            if self.l is None or self.l < 1:
                raise ValidationError("mixed mode needs l >= 1")
        elif self.mode not in ("coupled", "not_all_equal", "symmetrized"):
            raise ValidationError(f"unknown mode {self.mode!r}")

    @property
    def copies_needed(self) -> int:
        k = self.kernel.k
        if self.mode == "coupled":
            return 1
        if self.mode == "pattern":
            return max(self.pattern) + 1
        if self.mode == "mixed":
            return self.l
        if self.mode == "not_all_equal":
            return 2
        return k  # symmetrized

    def weighted_patterns(self):
        """(pattern, weight) pairs whose weighted pattern sums give the statistic."""
        k = self.kernel.k
        if self.mode == "coupled":
            return [((0,) * k, 1.0)]
        if self.mode == "pattern":
            return [(tuple(self.pattern), 1.0)]
        if self.mode == "mixed":
            return [(p, 1.0) for p in itertools.product(range(self.l), repeat=k)]
        if self.mode == "not_all_equal":
            return [(p, 1.0) for p in itertools.product((0, 1), repeat=k)
                    if len(set(p)) > 1]
        return [(pi, 1.0) for pi in itertools.permutations(range(k))]


def evaluate_norms(spec: StatisticSpec, samples: np.ndarray) -> np.ndarray:
    """Statistic norms for a batch of sample matrices of shape (B, n, copies)."""
    kf = spec.kernel
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 3:
        raise ValidationError("expected batch of sample matrices (B, n, copies)")
    if samples.shape[2] < spec.copies_needed:
        raise ValidationError("not enough copies for this statistic")
    terms = []
    for pattern, w in spec.weighted_patterns():
        for idx in distinct_tuples(kf.n, kf.k):
            args = tuple(samples[:, idx[r], pattern[r]] for r in range(kf.k))
            v = kf.evaluate(idx, args)
            terms.append(v if w == 1.0 else w * np.asarray(v))
    total = _sum_terms(terms)
    return batch_norm(total, spec.norm_kind, kf.dim)


def exact_law(spec: StatisticSpec, dist: DiscreteDistribution,
              budget: int = DEFAULT_ENUM_BUDGET) -> DiscreteLaw:
    """Exact law of the statistic norm by full enumeration of sample matrices."""
    kf = spec.kernel
    n, copies, m = kf.n, spec.copies_needed, dist.size
    cells = n * copies
    total = m ** cells
    if total > budget:
        raise BudgetExceededError(
            f"{m}^{cells} = {total} realizations exceeds budget {budget}")
    atom_vals = dist.values_array()
    atom_probs = dist.probs_array()
    radices = m ** np.arange(cells)

    values, probs = [], []
    for start in range(0, total, _CHUNK):
        block = np.arange(start, min(start + _CHUNK, total))
        idx = (block[:, None] // radices[None, :]) % m  # (B, cells)
        samples = atom_vals[idx].reshape(-1, n, copies)
        p = atom_probs[idx].prod(axis=1)
        norms = evaluate_norms(spec, samples)
        values.append(norms)
        probs.append(p)
    return aggregate_law(np.concatenate(values), np.concatenate(probs))


@dataclass(frozen=True)
class TailEstimate:
    t: float
    p_hat: float
    ci_low: float
    ci_high: float
    trials: int
    seed: int

    def __post_init__(self):
        if not (self.ci_low <= self.p_hat <= self.ci_high):
            raise ValidationError("confidence interval must contain the estimate")


def clopper_pearson(successes: int, trials: int, confidence: float = 0.99):
    """Exact binomial confidence interval."""
    alpha = 1.0 - confidence
    if successes == 0:
        lo = 0.0
    else:
        lo = float(beta.ppf(alpha / 2, successes, trials - successes + 1))
    if successes == trials:
        hi = 1.0
    else:
        hi = float(beta.ppf(1 - alpha / 2, successes + 1, trials - successes))
    return lo, hi


def sample_matrices(dist: DiscreteDistribution, n: int, copies: int,
                    trials: int, seed: int) -> np.ndarray:
    """Draw (trials, n, copies) sample matrices with a Philox counter generator."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    u = rng.random((trials, n, copies))
    cum = np.cumsum(dist.probs_array())
    idx = np.searchsorted(cum, u, side="right")
    idx = np.minimum(idx, dist.size - 1)
    return dist.values_array()[idx]


def mc_tail(spec: StatisticSpec, dist: DiscreteDistribution, t_grid,
            trials: int, seed: int, confidence: float = 0.99) -> list[TailEstimate]:
    """Monte Carlo tail estimates with Clopper-Pearson intervals."""
    if trials < 100:
        raise ValidationError("trials must be >= 100")
    samples = sample_matrices(dist, spec.kernel.n, spec.copies_needed, trials, seed)
    norms = evaluate_norms(spec, samples)
    out = []
    for t in t_grid:
        hits = int(np.count_nonzero(norms >= t))
        lo, hi = clopper_pearson(hits, trials, confidence)
        out.append(TailEstimate(float(t), hits / trials, lo, hi, trials, seed))
    return out


@dataclass(frozen=True)
class KappaResult:
    value: float
    exact: bool  # True only in dimension 1; otherwise an upper estimate


def _dual_unit_directions(dim: int, norm_kind: str, grid_size: int) -> np.ndarray:
    """Axis directions plus a deterministic low-discrepancy sphere grid,
    normalized to unit dual norm."""
    axes = np.concatenate([np.eye(dim), -np.eye(dim)])
    sob = qmc.Sobol(d=dim, scramble=False)
    pts = sob.random(grid_size)
    # map the unit cube to directions through the Gaussian inverse CDF
    from scipy.special import ndtri
    g = ndtri(np.clip(pts, 1e-12, 1 - 1e-12))
    g = g[np.linalg.norm(g, axis=1) > 1e-9]
    dirs = np.concatenate([axes, g])
    dual = DUAL_NORM[norm_kind]
    if dual == "euclidean":
        scale = np.linalg.norm(dirs, axis=1)
    elif dual == "abs_sum":
        scale = np.sum(np.abs(dirs), axis=1)
    else:
        scale = np.max(np.abs(dirs), axis=1)
    return dirs / scale[:, None]


def kappa(values, probs, norm_kind: str = "euclidean",
          grid_size: int = 1024, mean_tol: float = 1e-9) -> KappaResult:
    """Anticoncentration functional inf over unit-dual functionals of
    (E|x'(Y)|)^2 / E(x'(Y))^2.

    Exact in dimension 1; in higher dimension the infimum is approximated
    from above over axis directions plus a Sobol sphere grid.
    """
    v = np.asarray(values, dtype=float)
    p = np.asarray(probs, dtype=float)
    if v.ndim == 1:
        mean = float(np.dot(p, v))
        second = float(np.dot(p, v * v))
        if abs(mean) > mean_tol:
            raise ValidationError(f"Y must be mean zero (mean={mean})")
        if second <= 0:
            raise ValidationError("Y is almost surely 0")
        first = float(np.dot(p, np.abs(v)))
        return KappaResult(first * first / second, exact=True)
    if v.ndim != 2:
        raise ValidationError("values must be (m,) or (m, dim)")
    mean = p @ v
    if float(np.max(np.abs(mean))) > mean_tol:
        raise ValidationError("Y must be mean zero")
    if float(np.max(np.abs(v))) == 0.0:
        raise ValidationError("Y is almost surely 0")
    dirs = _dual_unit_directions(v.shape[1], norm_kind, grid_size)
    proj = v @ dirs.T  # (m, D)
    second = p @ (proj * proj)
    first = p @ np.abs(proj)
    ok = second > 1e-15
    ratios = (first[ok] ** 2) / second[ok]
    return KappaResult(float(np.min(ratios)), exact=False)


def support_grid(*laws: DiscreteLaw) -> np.ndarray:
    """t-grid hitting every jump: support points, midpoints, 0+, and past the max."""
    pts = np.unique(np.concatenate([law.values for law in laws]))
    mids = (pts[:-1] + pts[1:]) / 2.0
    top = pts[-1] * 1.5 + 1.0
    tiny = min(1e-9, (pts[pts > 0].min() / 2.0) if np.any(pts > 0) else 1e-9)
    return np.unique(np.concatenate([pts, mids, [tiny, top]]))
