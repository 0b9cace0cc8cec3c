#!/usr/bin/env python3
"""
Test script for configuration loading, environment overrides and validation
"""

import os
import sys
import tempfile
from contextlib import contextmanager
from pathlib import Path

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "../../../src"))

from wcoindex.config import EngineConfig, WcoConfig, load_config
from wcoindex.errors import ConfigurationError


@contextmanager
def env(**values: str):
    """Temporarily set environment variables."""
    saved = {k: os.environ.get(k) for k in values}
    os.environ.update(values)
    try:
        yield
    finally:
        for k, v in saved.items():
            if v is None:
                os.environ.pop(k, None)
            else:
                os.environ[k] = v


def _write(tmp: str, text: str) -> Path:
    path = Path(tmp) / "wco.yaml"
    path.write_text(text)
    return path


def test_defaults():
    """Default values match the documented ones"""
    print("=== Testing defaults ===")
    config = WcoConfig()
    assert (config.limit, config.timeout) == (1000, 600.0)
    assert (config.veo, config.estimator, config.refined_levels) == ("adaptive", "range", 3)
    assert config.psi_sample_rate == 16
    config.validate()
    assert list(config.to_dict()) == sorted(config.to_dict())
    print("✅ Defaults test passed")


def test_yaml_file():
    """Keys come from the file; unknown keys are ignored"""
    print("=== Testing YAML loading ===")
    with tempfile.TemporaryDirectory() as tmp:
        path = _write(tmp, "limit: 50\nveo: global\nestimator: refined:4\nbogus: 1\n")
        config, actual = load_config(path, env_override=False)
        assert actual == path.absolute()
        assert config.limit == 50 and config.veo == "global"
        config.validate()
        (strategy,) = config.strategies()
        assert strategy.label == "refined:4" and strategy.is_global

        raw, _ = load_config(path, as_is=True)
        assert raw["bogus"] == 1

        for text in ("- just\n- a list\n", "limit: [unclosed\n"):
            bad = _write(tmp, text)
            try:
                load_config(bad)
            except ConfigurationError:
                pass
            else:
                raise AssertionError(f"expected ConfigurationError for {text!r}")

    try:
        load_config("/nonexistent/wco.yaml")
    except ConfigurationError:
        pass
    else:
        raise AssertionError("expected ConfigurationError for a missing file")
    print("✅ YAML loading test passed")


def test_env_overrides():
    """WCO_* variables win over the file"""
    print("=== Testing environment overrides ===")
    with tempfile.TemporaryDirectory() as tmp:
        path = _write(tmp, "limit: 50\ntimeout: 10\nverbose: false\n")
        with env(WCO_LIMIT="7", WCO_TIMEOUT="0", WCO_ESTIMATOR="children", WCO_VERBOSE="yes"):
            config, _ = load_config(path)
        assert config.limit == 7 and config.timeout == 0.0
        assert config.estimator == "children" and config.verbose
        assert EngineConfig.from_config(config).timeout is None

        with env(WCO_SEED="abc"):
            try:
                load_config(path)
            except ConfigurationError:
                pass
            else:
                raise AssertionError("expected ConfigurationError for a bad WCO_SEED")
    print("✅ Environment override test passed")


def test_validation():
    """Bad values are rejected by validate"""
    print("=== Testing validation ===")
    for changes in (
        {"limit": -1},
        {"timeout": -0.5},
        {"refined_levels": -2},
        {"psi_sample_rate": 0},
        {"veo": "global,backwards"},
        {"estimator": "range,magic"},
    ):
        config = WcoConfig(**changes)  # type: ignore[arg-type]
        try:
            config.validate()
        except ConfigurationError:
            pass
        else:
            raise AssertionError(f"expected ConfigurationError for {changes}")
    print("✅ Validation test passed")


def test_strategy_product():
    """Comma lists expand to every (veo, estimator) pair"""
    print("=== Testing strategy lists ===")
    config = WcoConfig(veo="global,adaptive", estimator="range,refined,random", refined_levels=2)
    labels = [(s.mode, s.label) for s in config.strategies()]
    assert labels == [
        ("global", "range"),
        ("global", "refined:2"),
        ("global", "random"),
        ("adaptive", "range"),
        ("adaptive", "refined:2"),
        ("adaptive", "random"),
    ]
    engine = EngineConfig.from_config(config)
    assert engine.strategy.label == "range" and engine.limit == 1000
    assert engine.with_order(["y", "x"]).order == ["y", "x"] and engine.order is None
    print("✅ Strategy list test passed")


if __name__ == "__main__":
    print("🚀 Starting config tests...\n")

    test_defaults()
    print()
    test_yaml_file()
    print()
    test_env_overrides()
    print()
    test_validation()
    print()
    test_strategy_product()
    print()

    print("🎉 All config tests completed!")
