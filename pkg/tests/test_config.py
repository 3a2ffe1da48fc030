import pytest

from rungesplit.config import ENV_VAR, ConfigError, RunConfig, default_constants_text, parse_constants

GOOD = """\
# test constants
S1 = 12.5
S2 = 1.0
C0 = 0.1
S_pga = 2.5
pana_slack = 0.5
C_runge = 10
precision_target = 1e-12
"""


def test_builtin_constants_parse_and_carry_provenance():
    text = default_constants_text()
    values = parse_constants(text)
    assert values["S1"] > 0 and values["C_runge"] == 10.0
    assert text.count("#") >= len(values)


def test_parse_errors():
    with pytest.raises(ConfigError, match="unknown"):
        parse_constants(GOOD + "bogus = 1\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_constants(GOOD + "S1 = 3\n")
    with pytest.raises(ConfigError, match="missing"):
        parse_constants("S1 = 1\n")
    with pytest.raises(ConfigError, match="not a number"):
        parse_constants(GOOD.replace("S2 = 1.0", "S2 = one"))
    with pytest.raises(ConfigError, match="key = value"):
        parse_constants(GOOD + "S1\n")


def test_slacks_must_be_positive():
    with pytest.raises(ConfigError):
        RunConfig(S1=1, S2=0, C0=1, S_pga=1, pana_slack=1)
    with pytest.raises(ConfigError):
        RunConfig(S1=1, S2=1, C0=1, S_pga=1, pana_slack=1, workers=0)
    with pytest.raises(ConfigError):
        RunConfig(S1=1, S2=1, C0=1, S_pga=1, pana_slack=1, output_format="xml")


def test_path_precedence(tmp_path, monkeypatch):
    env_file = tmp_path / "env.txt"
    env_file.write_text(GOOD.replace("S1 = 12.5", "S1 = 2"))
    flag_file = tmp_path / "flag.txt"
    flag_file.write_text(GOOD.replace("S1 = 12.5", "S1 = 3"))
    monkeypatch.delenv(ENV_VAR, raising=False)
    assert RunConfig.load().constants_source == "builtin"
    monkeypatch.setenv(ENV_VAR, str(env_file))
    assert RunConfig.load().S1 == 2
    assert RunConfig.load(str(flag_file)).S1 == 3


def test_overrides_and_missing_file(tmp_path):
    cfg = RunConfig.load(None, C_runge=0.0, kappa2=None)
    assert cfg.C_runge == 0.0 and cfg.kappa2 is None
    with pytest.raises(ConfigError):
        RunConfig.load(str(tmp_path / "absent.txt"))
