"""
Tests for the configuration loader module.
"""
import json
import math

import numpy as np
import pytest

from inverse_square_oscillator.config.config_loader import ConfigLoader
from inverse_square_oscillator.utils.exceptions import ConfigError


@pytest.fixture
def sample_config_file(tmp_path):
    """Create a sample configuration file for testing."""
    config_content = """
    m: 1.0
    omega: 2.0
    hbar: 1.0
    g: 0.15625
    U: sigma1
    L0: 0.5
    task: copy-demo
    options:
      k_max: 3
      n_max: 40
    output: results
    seed: 7
    """
    config_file = tmp_path / "test_config.yaml"
    config_file.write_text(config_content)
    return str(config_file)


@pytest.fixture
def clean_env(monkeypatch):
    """Make sure no thread cap leaks in from the environment."""
    monkeypatch.delenv("ISQ_THREADS", raising=False)
    monkeypatch.setattr("inverse_square_oscillator.config.config_loader.load_dotenv", lambda: False)


def test_defaults(clean_env):
    """Test that a loader without a file yields natural units, a = 3/4 and sigma1."""
    run = ConfigLoader().get_run_config()
    assert run.params.m == run.params.omega == run.params.hbar == 1.0
    assert run.params.g == pytest.approx(5.0 / 32.0)
    assert run.task == "spectrum"
    assert run.options == {"n_max": 5}
    assert run.boundary.theta_plus == 0.0 and run.boundary.theta_minus == math.pi
    assert run.threads == 1
    assert run.quadrature_tol == 1e-10


def test_load_config(sample_config_file, clean_env):
    """Test loading configuration from a file."""
    run = ConfigLoader(sample_config_file).get_run_config()
    assert run.params.omega == 2.0
    assert run.boundary.L0 == 0.5
    assert run.task == "copy-demo"
    assert run.options["k_max"] == 3
    assert run.options["n_max"] == 40
    assert run.options["center"] == 2.0
    assert str(run.output) == "results"
    assert run.seed == 7


def test_overrides_take_precedence(sample_config_file, clean_env):
    """Test that command-line overrides replace file values and None is ignored."""
    loader = ConfigLoader(sample_config_file, overrides={"task": "spectrum", "seed": None, "output": "elsewhere"})
    assert loader.get_task() == "spectrum"
    assert loader.get_seed() == 7
    assert str(loader.get_output_dir()) == "elsewhere"


def test_fast_profile_halves_truncation(sample_config_file, clean_env):
    """Test that the fast tolerance profile halves n_max and loosens quadrature."""
    run = ConfigLoader(sample_config_file, overrides={"tolerance_profile": "fast"}).get_run_config()
    assert run.options["n_max"] == 20
    assert run.quadrature_tol == 1e-8


def test_missing_file():
    """Test that a missing file is a configuration error."""
    with pytest.raises(ConfigError, match="not found"):
        ConfigLoader("/nonexistent/config.yaml")


def test_unparsable_file(tmp_path):
    """Test that malformed YAML is reported."""
    config_file = tmp_path / "bad.yaml"
    config_file.write_text("g: [1, 2\n")
    with pytest.raises(ConfigError, match="Cannot parse"):
        ConfigLoader(str(config_file))


def test_non_mapping_file(tmp_path):
    """Test that a top-level list is rejected."""
    config_file = tmp_path / "list.yaml"
    config_file.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError, match="mapping"):
        ConfigLoader(str(config_file))


def test_empty_file_uses_defaults(tmp_path, clean_env):
    """Test that an empty file behaves like no file."""
    config_file = tmp_path / "empty.yaml"
    config_file.write_text("")
    assert ConfigLoader(str(config_file)).get_task() == "spectrum"


def test_json_file(tmp_path, clean_env):
    """Test that JSON configuration files are accepted."""
    config_file = tmp_path / "config.json"
    config_file.write_text(json.dumps({"task": "kernel", "options": {"compare": True}}))
    run = ConfigLoader(str(config_file)).get_run_config()
    assert run.task == "kernel"
    assert run.options["compare"] is True
    assert run.options["epsilons"] == [0.02, 0.01, 0.005]


@pytest.mark.parametrize("content, message", [
    ("colour: red\n", "Unknown configuration keys: colour"),
    ("task: spectrum\noptions:\n  center: 1.0\n", "Unknown options for task spectrum"),
    ("task: dance\n", "Unknown task"),
    ("options: 3\n", "must be a mapping"),
])
def test_rejects_unknown_entries(tmp_path, content, message):
    """Test that unknown keys, options and tasks are rejected."""
    config_file = tmp_path / "config.yaml"
    config_file.write_text(content)
    with pytest.raises(ConfigError, match=message):
        ConfigLoader(str(config_file))


@pytest.mark.parametrize("content", [
    "g: 0.5\n",
    "g: 0.0\n",
    "m: -1.0\n",
    "g: heavy\n",
    "L0: 0\n",
    "U: rotation\n",
    "U: [[1, 0], [1, 0], [0, 0], [1, 0]]\n",
    "seed: 1.5\n",
    "tolerance_profile: sloppy\n",
])
def test_invalid_values(tmp_path, content, clean_env):
    """Test that invalid physics, boundary and run values are configuration errors."""
    config_file = tmp_path / "config.yaml"
    config_file.write_text(content)
    with pytest.raises(ConfigError):
        ConfigLoader(str(config_file)).get_run_config()


def test_limit_test_admits_window_edges(tmp_path, clean_env):
    """Test that limit-test mode admits g = 0 and g = 3 hbar^2 / 8m."""
    for g in (0.0, 0.375):
        config_file = tmp_path / "config.yaml"
        config_file.write_text(f"g: {g}\nlimit_test: true\n")
        assert ConfigLoader(str(config_file)).get_physical_params().g == g


def test_unitary_as_pairs(tmp_path, clean_env):
    """Test that U can be given as four (re, im) pairs."""
    config_file = tmp_path / "config.yaml"
    config_file.write_text("U: [[0, 0], [1, 0], [1, 0], [0, 0]]\n")
    bd = ConfigLoader(str(config_file)).get_boundary_data()
    assert np.allclose(bd.U, [[0, 1], [1, 0]])


def test_set_option(clean_env):
    """Test overriding a single task option."""
    loader = ConfigLoader(overrides={"task": "kernel"})
    loader.set_option("compare", True)
    assert loader.get_task_options()["compare"] is True
    with pytest.raises(ConfigError, match="does not apply"):
        loader.set_option("k_max", 2)


def test_thread_cap(monkeypatch, clean_env):
    """Test reading the worker cap from the environment."""
    loader = ConfigLoader()
    monkeypatch.setenv("ISQ_THREADS", "4")
    assert loader.get_thread_cap() == 4
    monkeypatch.setenv("ISQ_THREADS", "many")
    assert loader.get_thread_cap() == 1
    monkeypatch.setenv("ISQ_THREADS", "0")
    assert loader.get_thread_cap() == 1


def test_header_is_sorted_json(sample_config_file, clean_env):
    """Test the resolved configuration written into artifacts."""
    run = ConfigLoader(sample_config_file).get_run_config()
    header = json.loads(run.header())
    assert header["task"] == "copy-demo"
    assert header["U"] == "sigma1"
    assert header["options"]["k_max"] == 3
    assert list(header) == sorted(header)
