"""Batch driver: config ingestion, campaign execution, machine-readable reports.

Config and report are JSON.  The report carries the echoed config, per-check
results, a summary, and meta information; a flat CSV export (one row per check
per threshold) is written next to the JSON report for plotting.

Exit codes: 0 all checks pass, 1 any check failed, 2 configuration error,
3 budget/resource error.  The environment variable DECOUPLING_LAB_WORKERS
caps worker parallelism (the current driver runs instances sequentially, so
any cap >= 1 is honored trivially).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

from . import __version__
from .errors import BudgetExceededError, ValidationError
from .kernel import KernelFamily
from .prob_engine import StatisticSpec, exact_law
from .value_space import DEFAULT_ENUM_BUDGET
from .verifier import (ALL_CHECKS, CorpusConfig, build_kernel,
                       named_distribution, run_corpus)

FORMAT_VERSION = 1

_CHECK_ALIASES = {
    "theorem1-upper": "theorem1_upper",
    "theorem1-lower": "theorem1_lower",
    "mazur-orlicz": "mazur_orlicz",
    "mc-consistency": "mc_consistency",
}

_TOP_KEYS = {"seed", "corpus", "budgets", "tolerances", "checks", "output"}
_CORPUS_KEYS = {"distributions", "kernel_classes", "nk_pairs", "ls", "law_count",
                "norm"}
_BUDGET_KEYS = {"enumeration", "mc_trials"}
_TOLERANCE_KEYS = {"identity"}


def _canonical_check(name: str) -> str:
    name = _CHECK_ALIASES.get(name, name)
    if name not in ALL_CHECKS:
        raise ValidationError(f"checks: unknown check name {name!r}")
    return name


def parse_config(text: str) -> tuple[CorpusConfig, str | None]:
    """Parse and validate a JSON config; returns (config, output path)."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"config is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ValidationError("config must be a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ValidationError(f"unknown top-level config field(s): {sorted(unknown)}")

    kwargs = {}
    if "seed" in raw:
        if not isinstance(raw["seed"], int):
            raise ValidationError("seed: must be an integer")
        kwargs["seed"] = raw["seed"]
    corpus = raw.get("corpus", {})
    unknown = set(corpus) - _CORPUS_KEYS
    if unknown:
        raise ValidationError(f"corpus: unknown field(s): {sorted(unknown)}")
    if "distributions" in corpus:
        kwargs["distributions"] = tuple(corpus["distributions"])
        for name in kwargs["distributions"]:
            named_distribution(name)  # raises on unknown names
    if "kernel_classes" in corpus:
        kwargs["kernel_classes"] = tuple(corpus["kernel_classes"])
    if "nk_pairs" in corpus:
        pairs = []
        for pair in corpus["nk_pairs"]:
            n, k = int(pair[0]), int(pair[1])
            if k > n:
                raise ValidationError(f"corpus.nk_pairs: n={n}, k={k} violates k <= n")
            pairs.append((n, k))
        kwargs["nk_pairs"] = tuple(pairs)
    if "ls" in corpus:
        kwargs["ls"] = tuple(int(x) for x in corpus["ls"])
    if "law_count" in corpus:
        kwargs["law_count"] = int(corpus["law_count"])
    if "norm" in corpus:
        kwargs["norm_kind"] = str(corpus["norm"])
    budgets = raw.get("budgets", {})
    unknown = set(budgets) - _BUDGET_KEYS
    if unknown:
        raise ValidationError(f"budgets: unknown field(s): {sorted(unknown)}")
    if "enumeration" in budgets:
        kwargs["enum_budget"] = int(budgets["enumeration"])
    if "mc_trials" in budgets:
        kwargs["mc_trials"] = int(budgets["mc_trials"])
    tolerances = raw.get("tolerances", {})
    unknown = set(tolerances) - _TOLERANCE_KEYS
    if unknown:
        raise ValidationError(f"tolerances: unknown field(s): {sorted(unknown)}")
    if "identity" in tolerances:
        kwargs["identity_tol"] = float(tolerances["identity"])
    if "checks" in raw:
        kwargs["checks"] = tuple(_canonical_check(c) for c in raw["checks"])
    return CorpusConfig(**kwargs), raw.get("output")


def _config_dict(cfg: CorpusConfig) -> dict:
    return {
        "seed": cfg.seed,
        "corpus": {
            "distributions": list(cfg.distributions),
            "kernel_classes": list(cfg.kernel_classes),
            "nk_pairs": [list(p) for p in cfg.nk_pairs],
            "ls": list(cfg.ls),
            "law_count": cfg.law_count,
            "norm": cfg.norm_kind,
        },
        "budgets": {"enumeration": cfg.enum_budget, "mc_trials": cfg.mc_trials},
        "tolerances": {"identity": cfg.identity_tol},
        "checks": list(cfg.checks),
    }


def run(cfg: CorpusConfig, out_path: str | None = None) -> tuple[dict, int]:
    """Execute the campaign; returns (report, exit code)."""
    start = time.perf_counter()
    body = run_corpus(cfg)
    elapsed = time.perf_counter() - start
    report = {
        "config": _config_dict(cfg),
        "results": body["results"],
        "summary": body["summary"],
        "meta": {
            "library_version": __version__,
            "format_version": FORMAT_VERSION,
            "wall_clock_seconds": elapsed,
            "workers": _worker_cap(),
        },
        "table": body["table"],
    }
    if out_path:
        with open(out_path, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _write_table_csv(os.path.splitext(out_path)[0] + ".csv", body["table"])
    code = 0 if body["summary"]["failed"] == 0 else 1
    return report, code


def _write_table_csv(path: str, rows: list[dict]) -> None:
    cols = ["check", "instance_id", "n", "k", "l", "t", "lhs", "rhs",
            "constant", "holds"]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=cols)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _worker_cap() -> int:
    raw = os.environ.get("DECOUPLING_LAB_WORKERS")
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _load_config(args) -> tuple[CorpusConfig, str | None]:
    if args.config:
        with open(args.config) as fh:
            cfg, out = parse_config(fh.read())
    else:
        cfg, out = CorpusConfig(), None
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.budget is not None:
        overrides["enum_budget"] = args.budget
    if args.trials is not None:
        overrides["mc_trials"] = args.trials
    if args.checks is not None:
        overrides["checks"] = tuple(
            _canonical_check(c) for c in args.checks.split(","))
    if overrides:
        cfg = CorpusConfig(**{**cfg.__dict__, **overrides})
    if args.out is not None:
        out = args.out
    return cfg, out


def _cmd_campaign(args, fixed_checks=None) -> int:
    cfg, out = _load_config(args)
    if fixed_checks is not None:
        cfg = CorpusConfig(**{**cfg.__dict__, "checks": fixed_checks})
    report, code = run(cfg, out)
    summary = report["summary"]
    for r in report["results"]:
        status = "pass" if r["passed"] else "FAIL"
        print(f"[{status}] {r['check']:>16} {r['instance_id']}")
    print(f"{summary['passed']}/{summary['total']} checks passed")
    return code


def _cmd_oracle(args) -> int:
    dist = named_distribution(args.dist)
    kf: KernelFamily = build_kernel(args.kernel, args.n, args.k,
                                    seed=args.seed or 0)
    if args.mode == "pattern":
        spec = StatisticSpec(kf, "pattern", pattern=tuple(range(args.k)),
                             norm_kind=args.norm)
    elif args.mode == "mixed":
        spec = StatisticSpec(kf, "mixed", l=args.l, norm_kind=args.norm)
    else:
        spec = StatisticSpec(kf, args.mode, norm_kind=args.norm)
    law = exact_law(spec, dist, args.budget or DEFAULT_ENUM_BUDGET)
    payload = {"values": law.values.tolist(), "probs": law.probs.tolist()}
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="report output path (JSON; CSV written beside)")
    p.add_argument("--checks", help="comma-separated check names")
    p.add_argument("--budget", type=int, help="enumeration budget override")
    p.add_argument("--trials", type=int, help="Monte Carlo trials override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decoupling-lab",
        description="Verification campaigns for U-statistic decoupling inequalities")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the full campaign")
    _add_common(p)
    p = sub.add_parser("identities", help="exact-identity suite only")
    _add_common(p)
    p = sub.add_parser("constants", help="constant searches only")
    _add_common(p)

    p = sub.add_parser("oracle", help="dump the exact law of one statistic")
    p.add_argument("--dist", default="rademacher")
    p.add_argument("--kernel", default="product")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", default="coupled",
                   choices=["coupled", "pattern", "mixed", "not_all_equal",
                            "symmetrized"])
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--norm", default="euclidean")
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_campaign(args)
        if args.command == "identities":
            return _cmd_campaign(
                args, fixed_checks=("identities", "mazur_orlicz", "distributional"))
        if args.command == "constants":
            return _cmd_campaign(
                args, fixed_checks=("theorem1_upper", "theorem1_lower", "lemma3"))
        return _cmd_oracle(args)
    except BudgetExceededError as e:
        print(f"budget error: {e}", file=sys.stderr)
        return 3
    except (ValidationError, OSError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
