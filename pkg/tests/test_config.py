"""YAML run configuration loading and validation."""

import pytest

from gripsim.config import RunConfig, dump_config, load_config


def test_defaults_without_file():
    cfg = load_config(None)
    assert cfg.physics.dt == 0.001
    assert cfg.sensor.pressure_gain > 0
    assert cfg.protocol.horizon == 10


def test_round_trip(tmp_path):
    cfg = RunConfig()
    cfg.controller.v_max = 0.033
    cfg.protocol.horizon = 7
    path = tmp_path / "run.yaml"
    dump_config(cfg, path)
    loaded = load_config(path)
    assert loaded.controller.v_max == 0.033
    assert loaded.protocol.horizon == 7
    assert loaded.physics == cfg.physics


def test_partial_file_keeps_defaults(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("controller:\n  v_max: 0.03\n")
    cfg = load_config(path)
    assert cfg.controller.v_max == 0.03
    assert cfg.physics == RunConfig().physics


def test_unknown_section_rejected(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("motors:\n  torque: 1\n")
    with pytest.raises(ValueError, match="unknown config sections"):
        load_config(path)


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("physics:\n  warp: 9\n")
    with pytest.raises(ValueError, match="unknown keys"):
        load_config(path)


def test_invalid_value_rejected(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("controller:\n  leakage: 2.0\n")
    with pytest.raises(ValueError):
        load_config(path)
