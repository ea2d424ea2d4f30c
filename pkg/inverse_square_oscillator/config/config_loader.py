"""
Configuration loader module for the inverse-square oscillator tools.
"""
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from inverse_square_oscillator.physics.model import (
    BoundaryData,
    PhysicalParams,
    decompose_unitary,
    exponents_from_coupling,
    unitary_from_spec,
)
from inverse_square_oscillator.utils.exceptions import ConfigError, ParameterError

TASKS = ("classical", "spectrum", "eigenstates", "kernel", "evolve", "copy-demo", "selftest")
TOLERANCE_PROFILES = ("strict", "fast")

DEFAULTS: Dict[str, Any] = {
    "m": 1.0,
    "omega": 1.0,
    "hbar": 1.0,
    "g": 5.0 / 32.0,
    "U": "sigma1",
    "L0": 1.0,
    "task": "spectrum",
    "options": {},
    "output": "output",
    "seed": 0,
    "tolerance_profile": "strict",
    "limit_test": False,
}

# Options understood by each task and their defaults.
TASK_OPTIONS: Dict[str, Dict[str, Any]] = {
    "classical": {"x0": 1.0, "v0": 0.0, "dt": 1e-4, "periods": 1.0, "sample_every": 100},
    "spectrum": {"n_max": 5},
    "eigenstates": {"n_max": 3, "points": 400, "x_max": 6.0},
    "kernel": {"x_i": 0.7, "x_f_min": -3.0, "x_f_max": 3.0, "points": 61, "T": 1.1,
               "epsilons": [0.02, 0.01, 0.005], "compare": False},
    "evolve": {"center": 2.0, "width": 0.5, "times": [0.0, 0.5, 1.0], "n_max": 60, "points": 2000},
    "copy-demo": {"center": 2.0, "width": 0.5, "k_max": 2, "n_max": 80, "points": 2000},
    "selftest": {"random_tuples": 10},
}

FAST_QUADRATURE_TOL = 1e-8
STRICT_QUADRATURE_TOL = 1e-10
TRUNCATION_KEYS = ("n_max",)

ENV_THREADS = "ISQ_THREADS"


@dataclass(frozen=True)
class RunConfig:
    """Validated, immutable run configuration."""
    params: PhysicalParams
    boundary: BoundaryData
    boundary_spec: Any
    task: str
    options: Dict[str, Any] = field(default_factory=dict)
    output: Path = Path("output")
    seed: int = 0
    tolerance_profile: str = "strict"
    limit_test: bool = False
    threads: int = 1

    @property
    def quadrature_tol(self) -> float:
        return FAST_QUADRATURE_TOL if self.tolerance_profile == "fast" else STRICT_QUADRATURE_TOL

    def to_dict(self) -> Dict[str, Any]:
        """Resolved configuration as plain JSON-compatible values (for artifact headers)."""
        return {
            "m": self.params.m,
            "omega": self.params.omega,
            "hbar": self.params.hbar,
            "g": self.params.g,
            "U": self.boundary_spec,
            "L0": self.boundary.L0,
            "task": self.task,
            "options": self.options,
            "output": str(self.output),
            "seed": self.seed,
            "tolerance_profile": self.tolerance_profile,
            "limit_test": self.limit_test,
        }

    def header(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class ConfigLoader:
    """Class for loading and accessing configuration."""

    def __init__(self, config_path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None):
        """
        Initialize the config loader.

        Args:
            config_path (str): Path to a YAML (or JSON) configuration file; None uses defaults
            overrides (dict): Values taking precedence over the file, e.g. from command-line flags

        Raises:
            ConfigError: If the file is missing, unreadable or has unknown keys
        """
        self.config_path = Path(config_path) if config_path else None

        # Load environment variables from .env file
        load_dotenv()

        self.config = self._load_config()
        for key, value in (overrides or {}).items():
            if value is not None:
                self.config[key] = value
        self._check_keys()

    def _load_config(self) -> Dict[str, Any]:
        """Load the configuration file on top of the defaults."""
        config = dict(DEFAULTS)
        if self.config_path is None:
            return config
        if not self.config_path.exists():
            raise ConfigError(f"Config file not found: {self.config_path}")

        with open(self.config_path, "r") as f:
            try:
                loaded = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigError(f"Cannot parse {self.config_path}: {e}") from e
        if loaded is None:
            return config
        if not isinstance(loaded, dict):
            raise ConfigError(f"{self.config_path} must hold a mapping at the top level")
        config.update(loaded)
        return config

    def _check_keys(self):
        unknown = sorted(set(self.config) - set(DEFAULTS))
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")
        task = self.get_task()
        options = self.config.get("options") or {}
        if not isinstance(options, dict):
            raise ConfigError("'options' must be a mapping")
        unknown = sorted(set(options) - set(TASK_OPTIONS[task]))
        if unknown:
            raise ConfigError(f"Unknown options for task {task}: {', '.join(unknown)}")

    def set_option(self, key: str, value: Any):
        """Override one option of the configured task."""
        task = self.get_task()
        if key not in TASK_OPTIONS[task]:
            raise ConfigError(f"Option '{key}' does not apply to task {task}")
        options = dict(self.config.get("options") or {})
        options[key] = value
        self.config["options"] = options

    def _number(self, key: str) -> float:
        value = self.config.get(key)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"'{key}' must be a number, got {value!r}")
        return float(value)

    def get_physical_params(self) -> PhysicalParams:
        """Return mass, frequency, Planck constant and coupling, validated."""
        try:
            params = PhysicalParams(
                m=self._number("m"),
                omega=self._number("omega"),
                hbar=self._number("hbar"),
                g=self._number("g"),
            )
            exponents_from_coupling(params, limit_test=self.get_limit_test())
        except ParameterError as e:
            raise ConfigError(str(e)) from e
        return params

    def get_boundary_data(self) -> BoundaryData:
        """Return the decomposed characteristic matrix."""
        L0 = self._number("L0")
        if not math.isfinite(L0) or L0 <= 0:
            raise ConfigError(f"L0 must be a positive length, got {L0}")
        try:
            return decompose_unitary(unitary_from_spec(self.config.get("U")), L0)
        except ParameterError as e:
            raise ConfigError(str(e)) from e

    def get_task(self) -> str:
        task = self.config.get("task")
        if task not in TASKS:
            raise ConfigError(f"Unknown task {task!r}; choose one of {', '.join(TASKS)}")
        return task

    def get_task_options(self) -> Dict[str, Any]:
        """
        Get the options of the configured task, defaults filled in.

        Returns:
            Dict[str, Any]: Task options; the fast profile halves truncation orders
        """
        task = self.get_task()
        options = dict(TASK_OPTIONS[task])
        options.update(self.config.get("options") or {})
        if self.get_tolerance_profile() == "fast":
            for key in TRUNCATION_KEYS:
                if key in options:
                    options[key] = max(1, int(options[key]) // 2)
        return options

    def get_output_dir(self) -> Path:
        return Path(str(self.config.get("output")))

    def get_seed(self) -> int:
        seed = self.config.get("seed")
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ConfigError(f"'seed' must be an integer, got {seed!r}")
        return seed

    def get_limit_test(self) -> bool:
        return bool(self.config.get("limit_test"))

    def get_tolerance_profile(self) -> str:
        profile = self.config.get("tolerance_profile")
        if profile not in TOLERANCE_PROFILES:
            raise ConfigError(f"Unknown tolerance profile {profile!r}; choose strict or fast")
        return profile

    def get_thread_cap(self) -> int:
        """Return the worker cap from ISQ_THREADS (1 when unset or invalid)."""
        try:
            return max(1, int(os.getenv(ENV_THREADS, "1")))
        except ValueError:
            return 1

    def get_run_config(self) -> RunConfig:
        """Validate everything and return the immutable run configuration."""
        return RunConfig(
            params=self.get_physical_params(),
            boundary=self.get_boundary_data(),
            boundary_spec=self.config.get("U"),
            task=self.get_task(),
            options=self.get_task_options(),
            output=self.get_output_dir(),
            seed=self.get_seed(),
            tolerance_profile=self.get_tolerance_profile(),
            limit_test=self.get_limit_test(),
            threads=self.get_thread_cap(),
        )
