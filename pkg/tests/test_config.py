import math

import pytest
import yaml

from pursuitshield import config
from pursuitshield.config import ConfigError


def test_defaults_carry_experiment_parameters():
    cfg = config.from_dict({})
    assert cfg.or_params.v_o == 0.1574
    assert cfg.ddr_params.v_d == 0.2
    assert cfg.episode.obstacles_init == ((1.5, 0.0, 0.02, 0.0),)
    assert (cfg.shield.d_pv, cfg.shield.d_oc, cfg.shield.gamma_oc, cfg.shield.gamma_pv) == (0.2, 0.2, 1.0, 1.2)
    assert cfg.episode.d_t == 0.05
    assert (cfg.run.episodes, cfg.episode.max_steps, cfg.episode.dt) == (150, 1500, 0.05)
    assert cfg.td3.actor_lr == cfg.td3.critic_lr == 3e-4
    assert cfg.td3.discount == 0.99 and cfg.td3.batch_size == 256


def test_degrees_are_converted():
    cfg = config.from_dict({"episode": {"ddr_init": {"x_m": 1.0, "y_m": -0.5, "theta_deg": 90.0}}})
    assert cfg.episode.ddr_init[2] == pytest.approx(math.pi / 2)


def test_problems_are_itemized():
    with pytest.raises(ConfigError) as info:
        config.from_dict({"shield": {"gamma_pvv": 1.0}, "td3": {"batch_size": "many"}, "extra": {}})
    problems = info.value.problems
    assert "shield.gamma_pvv: unknown key" in problems
    assert "extra: unknown key" in problems
    assert any(p.startswith("td3.batch_size") for p in problems)


def test_value_errors_are_reported():
    with pytest.raises(ConfigError) as info:
        config.from_dict({"shield": {"gamma_pv": -1.0}, "episode": {"dt_s": 0.0}, "run": {"episodes": 0}})
    text = str(info.value)
    assert "gamma_pv" in text and "dt" in text and "run.episodes" in text


def test_wheel_bound_below_cruise_speed_rejected():
    with pytest.raises(ConfigError, match="u_max_wheel"):
        config.from_dict({"robots": {"u_max_wheel_m_per_s": 0.1}})


def test_roundtrip_through_yaml(tmp_path):
    cfg = config.from_dict({"run": {"seed": 4}, "episode": {"target_m": [2.5, 0.0]}})
    path = tmp_path / "c.yaml"
    config.dump(cfg, path)
    again = config.load(path)
    assert again == cfg
    assert again.fingerprint() == cfg.fingerprint()
    assert yaml.safe_load(path.read_text())["run"]["seed"] == 4


def test_overrides_change_fingerprint():
    cfg = config.from_dict({})
    other = cfg.with_overrides(seed=7, output_dir="x")
    assert cfg.with_overrides(output_dir="y").fingerprint() == cfg.fingerprint()
    assert other.run.seed == 7 and other.episode.seed == 7 and other.run.output_dir == "x"
    assert other.fingerprint() != cfg.fingerprint()


def test_unreadable_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        config.load(tmp_path / "nope.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("run: [unclosed\n")
    with pytest.raises(ConfigError, match="not valid YAML"):
        config.load(bad)
    scalar = tmp_path / "scalar.yaml"
    scalar.write_text("42\n")
    with pytest.raises(ConfigError, match="mapping"):
        config.load(scalar)
