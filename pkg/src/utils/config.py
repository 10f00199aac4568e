"""Configuration management for the comixture toolkit."""

import yaml
from pathlib import Path
from typing import Any, Dict, Optional, Union


DEFAULT_EXPERIMENTS: Dict[str, Dict[str, Any]] = {
    'exp1': {'side': 64, 'iters': 500, 'seed': 0},
    'exp2': {'side': 64, 'iters': 200, 'seed': 0},
    'exp3': {'n': 2255, 'm': 2000, 'p': 50, 'iters': 1000, 'seed': 0},
}


class Config:
    """Configuration manager backed by a single YAML file."""

    def __init__(self, config_path: Optional[Union[str, Path]] = None):
        """Initialize configuration.

        Args:
            config_path: Path to YAML configuration file
        """
        if config_path:
            self.config_path = Path(config_path)
        else:
            # Look for config in standard locations
            possible_paths = [
                Path("config/config.yaml"),
                Path.home() / ".comixture" / "config.yaml"
            ]

            for path in possible_paths:
                if path.exists():
                    self.config_path = path
                    break
            else:
                self.config_path = Path(__file__).parent.parent.parent / "config" / "config.yaml"

        self._config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from YAML file."""
        if self.config_path.exists():
            with open(self.config_path, 'r') as f:
                return yaml.safe_load(f) or {}
        return {}

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value using dot notation.

        Args:
            key: Configuration key (e.g., 'solvers.stop_residual')
            default: Default value if key not found

        Returns:
            Configuration value
        """
        keys = key.split('.')
        value = self._config

        for k in keys:
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        return value

    def get_solver_defaults(self) -> Dict[str, Any]:
        """Solver defaults: stop_residual, record_every, relaxation, sigma_factor."""
        defaults = {
            'stop_residual': 1e-9,
            'record_every': 1,
            'relaxation': 1.0,
            'sigma_factor': 1.1,
        }
        defaults.update(self.get('solvers', {}) or {})
        return defaults

    def get_power_iteration(self) -> Dict[str, Any]:
        """Keyword arguments for ``operator_norm_estimate``."""
        settings = {'max_iters': 1000, 'tol': 1e-6, 'seed': 0}
        settings.update(self.get('power_iteration', {}) or {})
        return settings

    def get_experiment_defaults(self, name: str) -> Dict[str, Any]:
        """Default scale, iteration budget and seed of an experiment."""
        if name not in DEFAULT_EXPERIMENTS:
            raise KeyError(f"Unknown experiment: {name}")
        settings = dict(DEFAULT_EXPERIMENTS[name])
        settings.update(self.get(f'experiments.{name}', {}) or {})
        return settings

    def get_comparison_settings(self) -> Dict[str, Any]:
        settings = {'reference_multiplier': 10, 'float_format': '%.10g'}
        settings.update(self.get('comparison', {}) or {})
        return settings

    def get_concurrent_workers(self) -> int:
        return int(self.get('features.concurrent_workers', 2))

    def show_progress(self) -> bool:
        return bool(self.get('features.show_progress', True))

    def use_colors(self) -> bool:
        return bool(self.get('features.colored_output', True))

    def get_output_dir(self) -> Path:
        """Get output directory path."""
        return Path(self.get('output.directory', 'outputs'))

    def get_log_config(self) -> Dict[str, Any]:
        """Get logging configuration."""
        return self.get('logging', {}) or {}

    def validate(self) -> bool:
        """Validate configuration values.

        Returns:
            True if configuration is valid

        Raises:
            ValueError: If a value is out of range
        """
        power = self.get_power_iteration()
        if int(power['max_iters']) <= 0:
            raise ValueError("power_iteration.max_iters must be positive")
        if float(power['tol']) <= 0:
            raise ValueError("power_iteration.tol must be positive")

        solvers = self.get_solver_defaults()
        if float(solvers['stop_residual']) < 0:
            raise ValueError("solvers.stop_residual cannot be negative")
        if int(solvers['record_every']) <= 0:
            raise ValueError("solvers.record_every must be positive")
        if not 0.0 < float(solvers['relaxation']) < 2.0:
            raise ValueError("solvers.relaxation must lie in (0, 2)")
        if float(solvers['sigma_factor']) <= 1.0:
            raise ValueError("solvers.sigma_factor must be greater than 1")

        if int(self.get_comparison_settings()['reference_multiplier']) < 1:
            raise ValueError("comparison.reference_multiplier must be at least 1")
        if self.get_concurrent_workers() < 1:
            raise ValueError("features.concurrent_workers must be at least 1")

        for name in DEFAULT_EXPERIMENTS:
            settings = self.get_experiment_defaults(name)
            if int(settings['iters']) <= 0:
                raise ValueError(f"experiments.{name}.iters must be positive")

        return True

    def to_dict(self) -> Dict[str, Any]:
        """Return configuration as dictionary.

        Returns:
            Copy of the configuration dictionary
        """
        return self._config.copy()

    def __repr__(self) -> str:
        """String representation of configuration."""
        return f"Config(config_path={self.config_path})"
