import json

import pytest

from decoupling_lab.cli import main, parse_config, run
from decoupling_lab.errors import ValidationError
from decoupling_lab.verifier import ALL_CHECKS

SMALL_CONFIG = {
    "seed": 0,
    "corpus": {
        "distributions": ["rademacher"],
        "kernel_classes": ["product", "coeff"],
        "nk_pairs": [[3, 2]],
        "ls": [1, 2],
        "law_count": 5,
    },
    "budgets": {"enumeration": 2 ** 20, "mc_trials": 500},
    "checks": ["identities", "lemma1", "prop1", "theorem1-upper"],
}


def test_parse_config_minimal_defaults():
    cfg, out = parse_config('{"seed": 3}')
    assert cfg.seed == 3
    assert cfg.checks == ALL_CHECKS
    assert out is None


def test_parse_config_rejects_bad_pair():
    with pytest.raises(ValidationError, match="n=2, k=3"):
        parse_config('{"corpus": {"nk_pairs": [[2, 3]]}}')


def test_parse_config_rejects_unknown_field():
    with pytest.raises(ValidationError, match="bogus"):
        parse_config('{"bogus": 1}')
    with pytest.raises(ValidationError, match="corpus"):
        parse_config('{"corpus": {"bogus": 1}}')


def test_parse_config_check_selection():
    cfg, _ = parse_config('{"checks": ["lemma1", "theorem1-upper"]}')
    assert cfg.checks == ("lemma1", "theorem1_upper")
    with pytest.raises(ValidationError, match="unknown check"):
        parse_config('{"checks": ["lemma99"]}')


def test_run_exit_codes(tmp_path):
    cfg, _ = parse_config(json.dumps(SMALL_CONFIG))
    report, code = run(cfg, str(tmp_path / "report.json"))
    assert code == 0
    assert report["summary"]["failed"] == 0
    assert (tmp_path / "report.json").exists()
    assert (tmp_path / "report.csv").exists()


def test_run_deterministic(tmp_path):
    cfg, _ = parse_config(json.dumps(SMALL_CONFIG))
    rep_a, _ = run(cfg)
    rep_b, _ = run(cfg)
    numeric = lambda r: json.dumps(
        {k: r[k] for k in ("config", "results", "summary", "table")},
        sort_keys=True)
    assert numeric(rep_a) == numeric(rep_b)


def test_broken_tolerance_forces_failure():
    broken = dict(SMALL_CONFIG)
    broken["tolerances"] = {"identity": -1.0}
    broken["checks"] = ["identities"]
    cfg, _ = parse_config(json.dumps(broken))
    report, code = run(cfg)
    assert code == 1
    assert report["summary"]["failed"] > 0


def test_cli_verify_subcommand(tmp_path, capsys):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(SMALL_CONFIG))
    code = main(["verify", "--config", str(cfg_path),
                 "--out", str(tmp_path / "r.json")])
    assert code == 0
    out = capsys.readouterr().out
    assert "checks passed" in out


def test_cli_config_error_exit_2(tmp_path):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text('{"bogus": 1}')
    assert main(["verify", "--config", str(cfg_path)]) == 2
    assert main(["verify", "--config", str(tmp_path / "missing.json")]) == 2


def test_cli_budget_error_exit_3():
    assert main(["oracle", "--n", "6", "--k", "3", "--dist", "uniform4",
                 "--mode", "pattern", "--budget", "100"]) == 3


def test_cli_oracle(tmp_path, capsys):
    code = main(["oracle", "--n", "2", "--k", "2", "--mode", "pattern"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["values"] == [0.0, 2.0]
    assert payload["probs"] == [0.5, 0.5]


def test_cli_identities_subcommand(tmp_path):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps({**SMALL_CONFIG, "checks": ["identities"]}))
    assert main(["identities", "--config", str(cfg_path)]) == 0
