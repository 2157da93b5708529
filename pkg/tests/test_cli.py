import json
from fractions import Fraction

import pytest

import cli
from cli import expand_presets, main, normalize_argv, parse_limit, parse_number
from errors import ConfigError
from export_utils import read_support_csv
from support_store import SupportStore
from verify import CheckResult, VerifyReport


@pytest.fixture
def env(isolated_env, monkeypatch):
    monkeypatch.delenv("TURAN_PRESETS", raising=False)
    return isolated_env


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_parse_number():
    assert parse_number("-3/4") == Fraction(-3, 4)
    assert parse_number("2") == 2 and isinstance(parse_number("2"), int)
    assert parse_number("0.5") == 0.5
    assert parse_limit("+inf") == 1
    assert parse_limit("-inf") == -1


def test_normalize_argv():
    assert normalize_argv(["classify", "--line", "-1,0", "--limit", "-inf"]) == \
        ["classify", "--line=-1,0", "--limit=-inf"]
    assert normalize_argv(["sample", "--init", "turan:3"]) == ["sample", "--init", "turan:3"]


def test_expand_presets(tmp_path):
    path = tmp_path / "presets.env"
    path.write_text('FIG2="--n 30 --beta 60,-110"\n')
    argv = expand_presets(["mode-check", "--preset", "fig2"], str(path))
    assert argv == ["mode-check", "--n", "30", "--beta", "60,-110"]
    assert expand_presets(["classify", "--direction", "1,1"], str(path)) == ["classify", "--direction", "1,1"]
    with pytest.raises(ConfigError):
        expand_presets(["sample", "--preset", "fig9"], str(path))


def test_classify_direction(env, capsys):
    code, out = run_cli(capsys, "classify", "--direction", "1,-1/2")
    assert code == 0
    assert out["classification"] == "InteriorCone(3)"
    assert out["class"] == "TuranClass(4)"
    assert out["parameters"] == {"r": 4}


def test_classify_critical_ray_with_base(env, capsys):
    code, out = run_cli(capsys, "classify", "--direction", "1,-3/4", "--beta", "20,-80")
    assert out["classification"] == "CriticalRay(1)"
    assert out["side"] == "-"
    assert out["class"] == "TuranClass(2)"
    assert out["input"] == {"direction": ["1", "-3/4"], "beta": ["20", "-80"]}


def test_classify_line(env, capsys):
    code, out = run_cli(capsys, "classify", "--line", "-1,0", "--limit", "+inf")
    assert code == 0
    assert out["class"] == "EmptyOrComplete"


def test_classify_rejects_zero_direction(env, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["classify", "--direction", "0,0"])
    assert exc.value.code == 2


def test_classify_line_needs_limit(env, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["classify", "--line", "-1,0"])
    assert exc.value.code == 2


def test_mode_check_preset(env, capsys):
    code, out = run_cli(capsys, "mode-check", "--preset", "fig4")
    assert code == 0
    assert out["r_star"] == 4
    assert out["beta"] == [80.0, -40.0]


def test_unknown_preset(env, capsys):
    code, out = run_cli(capsys, "mode-check", "--preset", "nope")
    assert code == 2
    assert "nope" in out["error"]


def test_domain_error_exit_code(env, capsys):
    code, out = run_cli(capsys, "family", "--kind", "two-point", "--n", "7")
    assert code == 2
    assert out["type"] == "DomainError"


def test_two_point_family(env, capsys):
    code, out = run_cli(capsys, "family", "--kind", "two-point", "--n", "6", "--beta", "10,-6")
    assert code == 0
    assert out["reduced"] == "2"
    assert out["distribution"][1]["prob"] > 0.9999


def test_enumerate_writes_csv(env, capsys):
    path = env / "support4.csv"
    code, out = run_cli(capsys, "enumerate", "--n", "4", "--out", str(path))
    assert code == 0
    assert out["total"] == 64
    assert out["hull"] == [["0", "0"], ["1/2", "0"], ["3/4", "3/8"]]
    assert read_support_csv(str(path)).total() == 64


def test_enumerate_over_cap(env, capsys, monkeypatch):
    monkeypatch.setenv("TURAN_ENUM_CAP", "5")
    code, out = run_cli(capsys, "enumerate", "--n", "6")
    assert code == 2
    assert out["type"] == "FeasibilityError"


def test_sample(env, capsys):
    code, out = run_cli(capsys, "sample", "--n", "6", "--beta", "0,0", "--steps", "200", "--seed", "1", "--thin", "10")
    assert code == 0
    assert out["metadata"] == {"rng": "PCG64", "seed": 1, "init": "Empty"}
    assert out["acceptance_rate"] == 1.0


def test_verify_exit_codes(env, capsys, monkeypatch):
    def report_with(passed):
        return lambda suite, mcmc_steps: VerifyReport(suite, [CheckResult(suite, "stub", passed, "", 0.0)])

    monkeypatch.setattr(cli, "verify", report_with(False))
    code, out = run_cli(capsys, "verify", "--suite", "exact")
    assert code == 1
    assert out["passed"] is False

    monkeypatch.setattr(cli, "verify", report_with(True))
    code, out = run_cli(capsys, "verify", "--suite", "exact")
    assert code == 0

    runs = SupportStore(str(env / "store.db")).list_runs("verify")
    assert [r["id"] for r in runs] == [out["run_id"], out["run_id"] - 1]
    stored = SupportStore(str(env / "store.db")).get_run(out["run_id"])
    assert stored["params"] == {"suite": "exact", "mcmc_steps": 10 ** 6}
    assert stored["report"]["passed"] is True


def test_log_level_is_validated(env, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--log-level", "LOUD", "classify", "--direction", "1,1"])
    assert exc.value.code == 2
    code, out = run_cli(capsys, "--log-level", "debug", "classify", "--direction", "1,1")
    assert code == 0
    assert out["class"] == "Complete"
