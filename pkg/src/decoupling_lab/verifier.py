"""Pass/fail checks for every lemma, proposition, and theorem, plus bisection
search for the smallest feasible decoupling constants.

Each check is phrased against exact laws computed by enumeration, so a failure
is an implementation bug, never sampling noise.  Constant searches exploit the
fact that feasibility of C (all-t tail domination with factor C and threshold
t/C) is monotone in C.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SymmetryError, ValidationError
from .kernel import (KernelFamily, check_symmetry, distinct_tuples,
                     mazur_orlicz_coefficient)
from .prob_engine import (DiscreteLaw, StatisticSpec, aggregate_law, exact_law,
                          kappa, moment, support_grid, tail)
from .randomization import all_sign_vectors, all_choice_vectors
from .value_space import DEFAULT_ENUM_BUDGET, DiscreteDistribution, norm

IDENTITY_TOL = 1e-12
BRACKET = (1.0, float(2 ** 20))
BISECT_REL_TOL = 1e-4


@dataclass(frozen=True)
class CheckRow:
    t: float
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class InequalityReport:
    name: str
    instance: str
    rows: tuple

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.rows)


@dataclass(frozen=True)
class ConstantSearchResult:
    direction: str
    c_min: float
    feasible: bool
    bracket: tuple
    t_grid: tuple
    slack: tuple  # lhs_tail(t) - c_min * rhs_tail(t / c_min) per grid t

    def __post_init__(self):
        if self.feasible and not (self.c_min >= self.bracket[0]):
            raise ValidationError("feasible c_min must lie inside the bracket")


# ---------------------------------------------------------------------------
# tail-domination feasibility and bisection
# ---------------------------------------------------------------------------

def _tail_tol(law: DiscreteLaw, u: float) -> float:
    # small relative slack so C * support points survive the division by C
    eps = 1e-9 * max(1.0, abs(u))
    return float(law.probs[law.values >= u - eps].sum())


def _candidate_ts(law_l: DiscreteLaw, law_r: DiscreteLaw, c: float) -> np.ndarray:
    pts = np.concatenate([law_l.values, c * law_r.values])
    pts = np.unique(pts[pts > 0])
    if pts.size == 0:
        return np.array([1.0])
    just_above = pts * (1 + 1e-6) + 1e-12
    return np.unique(np.concatenate([pts, just_above, [pts[0] / 2]]))


def _max_slack(law_l: DiscreteLaw, law_r: DiscreteLaw, c: float):
    ts = _candidate_ts(law_l, law_r, c)
    slack = np.array([tail(law_l, t) - c * _tail_tol(law_r, t / c) for t in ts])
    return ts, slack


def tails_dominated(law_l: DiscreteLaw, law_r: DiscreteLaw, c: float,
                    tol: float = IDENTITY_TOL) -> bool:
    """Whether lhs_tail(t) <= c * rhs_tail(t/c) for every t > 0."""
    _, slack = _max_slack(law_l, law_r, c)
    return bool(np.max(slack) <= tol)


def minimal_constant(law_l: DiscreteLaw, law_r: DiscreteLaw, direction: str,
                     bracket=BRACKET, rel_tol: float = BISECT_REL_TOL,
                     ) -> ConstantSearchResult:
    """Bisection for the smallest c with full tail domination."""
    lo, hi = bracket
    if tails_dominated(law_l, law_r, lo):
        c_min, feasible = lo, True
    elif not tails_dominated(law_l, law_r, hi):
        c_min, feasible = math.nan, False
    else:
        while hi / lo > 1 + rel_tol:
            mid = math.sqrt(lo * hi)
            if tails_dominated(law_l, law_r, mid):
                hi = mid
            else:
                lo = mid
        c_min, feasible = hi, True
    if feasible:
        ts, slack = _max_slack(law_l, law_r, c_min)
    else:
        ts, slack = np.array([]), np.array([])
    return ConstantSearchResult(direction, c_min, feasible, tuple(bracket),
                                tuple(float(t) for t in ts),
                                tuple(float(s) for s in slack))


def search_constant(kf: KernelFamily, dist: DiscreteDistribution, direction: str,
                    l: int | None = None, norm_kind: str = "euclidean",
                    budget: int = DEFAULT_ENUM_BUDGET,
                    bracket=BRACKET, rel_tol: float = BISECT_REL_TOL,
                    ) -> ConstantSearchResult:
    """Minimal feasible decoupling constant for one theorem direction.

    upper:  coupled tail dominated by the fully decoupled tail.
    lower:  fully decoupled tail dominated by the coupled tail
            (requires the joint symmetry condition).
    lemma3: l-copy mixed tail dominated by the coupled tail.
    """
    k = kf.k
    coupled = StatisticSpec(kf, "coupled", norm_kind=norm_kind)
    decoupled = StatisticSpec(kf, "pattern", pattern=tuple(range(k)),
                              norm_kind=norm_kind)
    if direction == "upper":
        law_l = exact_law(coupled, dist, budget)
        law_r = exact_law(decoupled, dist, budget)
    elif direction == "lower":
        if not check_symmetry(kf, dist):
            raise SymmetryError(
                f"lower-direction search requires a symmetric kernel, got {kf.label}")
        law_l = exact_law(decoupled, dist, budget)
        law_r = exact_law(coupled, dist, budget)
    elif direction == "lemma3":
        if l is None or not (1 <= l <= k):
            raise ValidationError("lemma3 direction needs 1 <= l <= k")
        if not check_symmetry(kf, dist):
            raise SymmetryError("lemma3 check requires a symmetric kernel")
        mixed = StatisticSpec(kf, "mixed", l=l, norm_kind=norm_kind)
        law_l = exact_law(mixed, dist, budget)
        law_r = exact_law(coupled, dist, budget)
    else:
        raise ValidationError(f"unknown direction {direction!r}")
    return minimal_constant(law_l, law_r, direction, bracket, rel_tol)


# ---------------------------------------------------------------------------
# lemma and proposition checks
# ---------------------------------------------------------------------------

def _atom_array(atom) -> np.ndarray:
    return np.asarray(atom, dtype=float)


def verify_lemma1(dist: DiscreteDistribution, norm_kind: str = "euclidean",
                  slack: float = IDENTITY_TOL) -> InequalityReport:
    """P(||X|| >= t) <= 3 P(||X + Y|| >= 2t/3) for X, Y i.i.d. with law `dist`."""
    probs = dist.probs_array()
    norms_x = [norm(_atom_array(a), norm_kind) for a in dist.atoms]
    law_x = aggregate_law(norms_x, probs)
    pair_vals, pair_probs = [], []
    for (i, a), (j, b) in itertools.product(enumerate(dist.atoms), repeat=2):
        pair_vals.append(norm(_atom_array(a) + _atom_array(b), norm_kind))
        pair_probs.append(probs[i] * probs[j])
    law_sum = aggregate_law(pair_vals, pair_probs)
    rows = []
    for t in support_grid(law_x):
        if t <= 0:
            continue
        lhs = tail(law_x, t)
        rhs = 3.0 * _tail_tol(law_sum, 2.0 * t / 3.0)
        rows.append(CheckRow(float(t), lhs, rhs, lhs <= rhs + slack))
    return InequalityReport("lemma1", f"law({len(dist.atoms)} atoms)", tuple(rows))


def verify_prop1(a: float, dist: DiscreteDistribution,
                 slack: float = IDENTITY_TOL) -> InequalityReport:
    """P(|a + Y| >= |a|) >= kappa/4 for mean-zero 1-D Y."""
    values = dist.values_array()
    probs = dist.probs_array()
    kap = kappa(values, probs).value
    target = abs(float(a))
    lhs = float(probs[np.abs(a + values) >= target - IDENTITY_TOL].sum())
    rhs = kap / 4.0
    row = CheckRow(target, lhs, rhs, lhs + slack >= rhs)
    return InequalityReport("prop1", f"a={a}", (row,))


def sign_chaos_values(coeffs: dict, n: int, x0=0.0) -> np.ndarray:
    """x0 + sum of coefficient * product-of-signs terms over all 2^n sign vectors.

    Keys of `coeffs` are tuples of distinct 0-based indices (any degree);
    values are scalars or vectors.
    """
    signs = all_sign_vectors(n).astype(float)
    total = None
    for t, a in coeffs.items():
        prod = signs[:, list(t)].prod(axis=1) if len(t) else np.ones(signs.shape[0])
        a = np.asarray(a, dtype=float)
        term = prod * a if a.ndim == 0 else prod[:, None] * a
        total = term if total is None else total + term
    if total is None:
        total = np.zeros(signs.shape[0])
    x0 = np.asarray(x0, dtype=float)
    return total + (float(x0) if x0.ndim == 0 else x0)


def verify_lemma2(coeffs: dict, x, n: int, norm_kind: str = "euclidean",
                  ) -> tuple[float, InequalityReport]:
    """Exact P(||x + Bernoulli chaos|| >= ||x||) over all 2^n sign vectors.

    Returns the probability (the empirical inverse constant for this instance)
    and a report asserting strict positivity.
    """
    values = sign_chaos_values(coeffs, n, x0=x)
    x_arr = np.asarray(x, dtype=float)
    target = norm(x_arr, norm_kind)
    if values.ndim == 1:
        norms = np.abs(values)
    else:
        norms = np.array([norm(v, norm_kind) for v in values])
    prob = float(np.count_nonzero(norms >= target - IDENTITY_TOL)) / values.shape[0]
    row = CheckRow(target, prob, 0.0, prob > 0.0)
    return prob, InequalityReport("lemma2", f"n={n}, terms={len(coeffs)}", (row,))


def verify_moment_comparison(coeffs, n: int, degree: int,
                             kind: str = "rademacher", l: int | None = None,
                             x0: float = 0.0, bound: float | None = None,
                             ) -> InequalityReport:
    """L4/L2 ratio check for polynomial chaos in signs or centered selectors.

    For Rademacher chaos of the given degree the default bound is 3^(degree/2)
    (the q = 4 hypercontractivity constant).  For selectors both the centered
    and the recentered (raw indicator) linear forms are checked against the
    same configured bound.  Also checks the transfer implication
    ratio <= c  =>  L2 <= c^2 L1 with the measured c.
    """
    if bound is None:
        bound = 3.0 ** (degree / 2.0)
    if kind == "rademacher":
        values = sign_chaos_values(coeffs, n, x0=x0)
        probs = np.full(values.shape[0], 1.0 / values.shape[0])
        variants = [("chaos", values)]
    elif kind == "centered-selector":
        if l is None or l < 1:
            raise ValidationError("centered-selector kind needs l >= 1")
        a = np.asarray(coeffs, dtype=float)
        if a.shape != (n, l):
            raise ValidationError("selector coefficients must have shape (n, l)")
        choices = all_choice_vectors(n, l)  # (B, n)
        delta = np.stack([(choices == r).astype(float) for r in range(l)], axis=2)
        eps = delta - 1.0 / l
        centered = x0 + np.einsum("bnr,nr->b", eps, a)
        raw = x0 + np.einsum("bnr,nr->b", delta, a)
        probs = np.full(centered.shape[0], 1.0 / centered.shape[0])
        variants = [("centered", centered), ("recentered", raw)]
    else:
        raise ValidationError(f"unknown variable kind {kind!r}")

    rows = []
    for _, vals in variants:
        law = aggregate_law(vals, probs)
        m1, m2, m4 = moment(law, 1), moment(law, 2), moment(law, 4)
        if m2 == 0.0:
            rows.append(CheckRow(0.0, 0.0, bound, True))  # degenerate: skipped
            continue
        ratio = m4 / m2
        rows.append(CheckRow(0.0, ratio, bound, ratio <= bound + IDENTITY_TOL))
        c = ratio
        rows.append(CheckRow(1.0, m2, c * c * m1, m2 <= c * c * m1 + IDENTITY_TOL))
    return InequalityReport("moment_comparison", f"{kind} degree {degree}",
                            tuple(rows))


def mazur_orlicz_exhaustive(k_max: int = 6) -> bool:
    """Coefficient equals the permutation indicator for every tuple, k <= k_max."""
    for k in range(1, k_max + 1):
        for j in itertools.product(range(k), repeat=k):
            expected = 1 if sorted(j) == list(range(k)) else 0
            if mazur_orlicz_coefficient(j) != expected:
                return False
    return True


def symmetrized_expansion_residual(kf: KernelFamily, s: np.ndarray,
                                   norm_kind: str = "euclidean") -> float:
    """Residual of the inclusion-exclusion extraction of the symmetrized sum.

    The symmetrized decoupled sum must equal the alternating sum over selector
    vectors delta of the pattern sums with copies restricted to supp(delta).
    """
    from .ustat_engine import pattern_sum, symmetrized_decoupled_sum

    k = kf.k
    lhs = np.asarray(symmetrized_decoupled_sum(kf, s), dtype=float)
    rhs = np.zeros_like(lhs)
    for delta in itertools.product((0, 1), repeat=k):
        support = [r for r in range(k) if delta[r] == 1]
        if not support:
            continue
        sign = (-1) ** (k - len(support))
        for j in itertools.product(support, repeat=k):
            rhs = rhs + sign * np.asarray(pattern_sum(kf, s, j), dtype=float)
    return norm(lhs - rhs, norm_kind)


# ---------------------------------------------------------------------------
# corpus generation and the campaign driver
# ---------------------------------------------------------------------------

ALL_CHECKS = ("identities", "mazur_orlicz", "distributional", "lemma1", "prop1",
              "lemma2", "moments", "theorem1_upper", "theorem1_lower", "lemma3",
              "mc_consistency")

def named_distribution(name: str) -> DiscreteDistribution:
    from . import value_space as vs

    if name == "rademacher":
        return vs.rademacher()
    if name.startswith("uniform"):
        return vs.uniform(int(name[len("uniform"):]))
    raise ValidationError(f"unknown distribution name {name!r}")


def build_kernel(cls: str, n: int, k: int, seed: int) -> KernelFamily:
    from . import kernel as kmod

    if cls == "product":
        return kmod.product_kernel(k, n)
    if cls == "affine":
        return kmod.affine_product_kernel(k, n, c=1.0)
    if cls == "sym-coeff":
        return kmod.random_coefficient_kernel(k, n, seed=seed, symmetric=True)
    if cls == "coeff":
        return kmod.random_coefficient_kernel(k, n, seed=seed, symmetric=False)
    if cls == "first-arg":
        return kmod.first_argument_kernel(k, n)
    raise ValidationError(f"unknown kernel class {cls!r}")


def random_law(rng, dim: int = 1) -> DiscreteDistribution:
    """Random finite law with small integer-valued atoms."""
    m = int(rng.integers(2, 6))
    if dim == 1:
        vals = rng.choice(np.arange(-4, 5), size=m, replace=False)
        atoms = tuple(float(v) for v in vals)
    else:
        seen = set()
        while len(seen) < m:
            seen.add(tuple(float(x) for x in rng.integers(-3, 4, size=dim)))
        atoms = tuple(seen)
    w = rng.integers(1, 9, size=m).astype(float)
    probs = tuple(w / w.sum())
    return DiscreteDistribution(atoms, probs)


def random_mean_zero_law(rng) -> DiscreteDistribution:
    """Symmetric construction: atoms +/-v with equal weights, optional 0 atom."""
    j = int(rng.integers(1, 4))
    vals = rng.choice(np.arange(1, 6), size=j, replace=False).astype(float)
    w = rng.integers(1, 9, size=j).astype(float)
    include_zero = bool(rng.integers(0, 2))
    atoms, weights = [], []
    for v, wt in zip(vals, w):
        atoms.extend([float(v), float(-v)])
        weights.extend([wt / 2.0, wt / 2.0])
    if include_zero:
        atoms.append(0.0)
        weights.append(float(rng.integers(1, 9)))
    weights = np.asarray(weights)
    return DiscreteDistribution(tuple(atoms), tuple(weights / weights.sum()))


def random_chaos_coefficients(rng, n: int, k: int, dim: int = 1) -> dict:
    """Sparse integer coefficients over distinct tuples of degrees 1..k."""
    coeffs = {}
    for r in range(1, k + 1):
        for t in distinct_tuples(n, r):
            if rng.random() < 0.5:
                continue
            c = rng.integers(-3, 4, size=dim)
            val = float(c[0]) if dim == 1 else c.astype(float)
            if np.all(np.asarray(val) == 0):
                continue
            coeffs[t] = val
    if not coeffs:
        coeffs[(0,)] = 1.0
    return coeffs


def draw_sample_matrix(rng, dist: DiscreteDistribution, n: int, copies: int):
    idx = rng.choice(dist.size, size=(n, copies), p=dist.probs_array())
    return dist.values_array()[idx]


@dataclass
class CorpusConfig:
    seed: int = 0
    distributions: tuple = ("rademacher", "uniform3")
    kernel_classes: tuple = ("product", "affine", "sym-coeff", "coeff")
    nk_pairs: tuple = ((3, 2), (4, 2), (4, 3))
    ls: tuple = (1, 2, 3)
    checks: tuple = ALL_CHECKS
    enum_budget: int = DEFAULT_ENUM_BUDGET
    mc_trials: int = 20000
    identity_tol: float = IDENTITY_TOL
    law_count: int = 25
    norm_kind: str = "euclidean"

    def __post_init__(self):
        for n, k in self.nk_pairs:
            if k > n:
                raise ValidationError(f"configured pair n={n}, k={k} violates k <= n")
        for c in self.checks:
            if c not in ALL_CHECKS:
                raise ValidationError(f"unknown check name {c!r}")
        if self.enum_budget <= 0 or self.mc_trials <= 0:
            raise ValidationError("budgets must be positive")


def _instances(cfg: CorpusConfig):
    for dist_name in cfg.distributions:
        dist = named_distribution(dist_name)
        for n, k in cfg.nk_pairs:
            for i, cls in enumerate(cfg.kernel_classes):
                kf = build_kernel(cls, n, k, seed=cfg.seed * 1000 + i)
                yield dist_name, dist, kf


def run_corpus(cfg: CorpusConfig) -> dict:
    """Execute the configured checks over the corpus; returns a JSON-ready dict."""
    from . import prob_engine as pe
    from . import randomization as rz
    from . import ustat_engine as ue

    rng = np.random.default_rng(cfg.seed)
    results = []
    table = []
    constants: dict = {}
    lemma2_min: dict = {}

    def record(check, instance, passed, detail, n=None, k=None, l=None):
        results.append({"check": check, "instance_id": instance,
                        "n": n, "k": k, "l": l, "passed": bool(passed),
                        "detail": detail})

    def record_rows(check, instance, rows, n=None, k=None, l=None, constant=None):
        for r in rows:
            table.append({"check": check, "instance_id": instance, "n": n,
                          "k": k, "l": l, "t": r.t, "lhs": r.lhs, "rhs": r.rhs,
                          "constant": constant, "holds": bool(r.holds)})

    if "identities" in cfg.checks:
        for dist_name, dist, kf in _instances(cfg):
            n, k = kf.n, kf.k
            if n > 6:
                continue
            copies = max(k, max(cfg.ls, default=1), 2)
            s = draw_sample_matrix(rng, dist, n, copies)
            worst = 0.0
            signs = rz.all_sign_vectors(n)
            for pattern in itertools.product((0, 1), repeat=k):
                res = rz.expansion_residual_batch(kf, s[:, :2], signs, pattern)
                worst = max(worst, float(np.max(res)))
            worst = max(worst, rz.pattern_invariance_spread(kf, s[:, :2],
                                                            cfg.norm_kind))
            for l in cfg.ls:
                if l > copies:
                    continue
                ce = np.asarray(rz.selector_conditional_expectation(kf, s, l))
                target = np.asarray(ue.mixed_sum(kf, s, l)) / float(l ** k)
                worst = max(worst, norm(ce - target, cfg.norm_kind))
            partition = (np.asarray(ue.mixed_sum(kf, s, 2))
                         - np.asarray(ue.pattern_sum(kf, s, (0,) * k))
                         - np.asarray(ue.pattern_sum(kf, s, (1,) * k))
                         - np.asarray(ue.not_all_equal_sum(kf, s)))
            worst = max(worst, norm(partition, cfg.norm_kind))
            inst = f"{dist_name}:{kf.label}:n{n}k{k}"
            record("identities", inst, worst <= cfg.identity_tol,
                   {"max_residual": worst}, n=n, k=k)

    if "mazur_orlicz" in cfg.checks:
        ok = mazur_orlicz_exhaustive(6)
        record("mazur_orlicz", "coefficient:k<=6", ok, {})
        for dist_name, dist, kf in _instances(cfg):
            if not kf.symmetric_claimed or kf.k > 4:
                continue
            s = draw_sample_matrix(rng, dist, kf.n, kf.k)
            res = symmetrized_expansion_residual(kf, s, cfg.norm_kind)
            inst = f"{dist_name}:{kf.label}:n{kf.n}k{kf.k}"
            record("mazur_orlicz", inst, res <= cfg.identity_tol,
                   {"residual": res}, n=kf.n, k=kf.k)

    if "distributional" in cfg.checks:
        for dist_name in cfg.distributions:
            dist = named_distribution(dist_name)
            for n in (2, 3):
                if (dist.size ** (2 * n)) * (2 ** n) <= 2 ** 20:
                    ok = rz.distributional_equality_check(dist, n, "sign")
                    record("distributional", f"{dist_name}:sign:n{n}", ok, {}, n=n)
                for l in cfg.ls:
                    if l < 2 or (dist.size ** (n * l)) * (l ** n) > 2 ** 20:
                        continue
                    ok = rz.distributional_equality_check(dist, n, "selector", l)
                    record("distributional", f"{dist_name}:selector:n{n}l{l}",
                           ok, {}, n=n, l=l)

    if "lemma1" in cfg.checks:
        for i in range(cfg.law_count):
            dim = 1 if i % 2 == 0 else 2
            law = random_law(rng, dim=dim)
            rep = verify_lemma1(law, cfg.norm_kind)
            record("lemma1", f"law{i}:dim{dim}", rep.passed, {})
            record_rows("lemma1", f"law{i}:dim{dim}", rep.rows)

    if "prop1" in cfg.checks:
        for i in range(cfg.law_count):
            law = random_mean_zero_law(rng)
            for a in (0.0, 0.5, 1.0, 2.5):
                rep = verify_prop1(a, law)
                record("prop1", f"law{i}:a{a}", rep.passed, {})
                record_rows("prop1", f"law{i}:a{a}", rep.rows)

    if "lemma2" in cfg.checks:
        for n, k in cfg.nk_pairs:
            if k > 3 or n > 12:
                continue
            for i in range(5):
                coeffs = random_chaos_coefficients(rng, n, k)
                x = float(rng.integers(1, 4))
                prob, rep = verify_lemma2(coeffs, x, n)
                inst = f"n{n}k{k}i{i}"
                record("lemma2", inst, rep.passed, {"prob": prob}, n=n, k=k)
                lemma2_min[k] = min(lemma2_min.get(k, 1.0), prob)

    if "moments" in cfg.checks:
        for n, k in cfg.nk_pairs:
            if k > 3 or n > 12:
                continue
            for i in range(3):
                coeffs = random_chaos_coefficients(rng, n, k)
                rep = verify_moment_comparison(coeffs, n, k, "rademacher")
                record("moments", f"rademacher:n{n}k{k}i{i}", rep.passed, {},
                       n=n, k=k)
                record_rows("moments", f"rademacher:n{n}k{k}i{i}", rep.rows)
        for l in cfg.ls:
            if l < 2:
                continue
            n = 4
            a = rng.integers(-3, 4, size=(n, l)).astype(float)
            rep = verify_moment_comparison(a, n, 1, "centered-selector", l=l,
                                           x0=float(rng.integers(0, 3)))
            record("moments", f"selector:l{l}", rep.passed, {}, n=n, l=l)
            record_rows("moments", f"selector:l{l}", rep.rows)

    for direction, check in (("upper", "theorem1_upper"),
                             ("lower", "theorem1_lower")):
        if check not in cfg.checks:
            continue
        for dist_name, dist, kf in _instances(cfg):
            n, k = kf.n, kf.k
            if direction == "lower" and not kf.symmetric_claimed:
                continue
            if dist.size ** (n * k) > cfg.enum_budget:
                continue
            res = search_constant(kf, dist, direction, norm_kind=cfg.norm_kind,
                                  budget=cfg.enum_budget)
            inst = f"{dist_name}:{kf.label}:n{n}k{k}"
            record(check, inst, res.feasible,
                   {"c_min": res.c_min, "max_slack": max(res.slack, default=0.0)},
                   n=n, k=k)
            if res.feasible:
                key = (direction, k)
                constants[key] = max(constants.get(key, 1.0), res.c_min)

    if "lemma3" in cfg.checks:
        for dist_name, dist, kf in _instances(cfg):
            n, k = kf.n, kf.k
            if not kf.symmetric_claimed:
                continue
            for l in range(1, k + 1):
                if dist.size ** (n * max(l, 1)) > cfg.enum_budget:
                    continue
                res = search_constant(kf, dist, "lemma3", l=l,
                                      norm_kind=cfg.norm_kind,
                                      budget=cfg.enum_budget)
                inst = f"{dist_name}:{kf.label}:n{n}k{k}l{l}"
                record("lemma3", inst, res.feasible, {"c_min": res.c_min},
                       n=n, k=k, l=l)
                if res.feasible:
                    key = ("lemma3", k)
                    constants[key] = max(constants.get(key, 1.0), res.c_min)

    if "mc_consistency" in cfg.checks:
        covered = 0
        total = 0
        for i, (dist_name, dist, kf) in enumerate(_instances(cfg)):
            if i % 3 != 0 or dist.size ** (kf.n * kf.k) > cfg.enum_budget:
                continue
            spec = pe.StatisticSpec(kf, "pattern", pattern=tuple(range(kf.k)),
                                    norm_kind=cfg.norm_kind)
            law = pe.exact_law(spec, dist, cfg.enum_budget)
            grid = pe.support_grid(law)
            ests = pe.mc_tail(spec, dist, grid, cfg.mc_trials,
                              seed=cfg.seed + i)
            for t, est in zip(grid, ests):
                exact = tail(law, float(t))
                total += 1
                if est.ci_low - 1e-12 <= exact <= est.ci_high + 1e-12:
                    covered += 1
        rate = covered / total if total else 1.0
        record("mc_consistency", "corpus", rate >= 0.95,
               {"coverage": rate, "points": total})

    passed = sum(1 for r in results if r["passed"])
    summary = {
        "total": len(results),
        "passed": passed,
        "failed": len(results) - passed,
        "empirical_constants": {f"{d}:k={k}": c
                                for (d, k), c in sorted(constants.items())},
        "lemma2_min_probability": {f"k={k}": p
                                   for k, p in sorted(lemma2_min.items())},
    }
    return {"results": results, "summary": summary, "table": table}
