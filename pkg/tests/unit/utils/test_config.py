"""Unit tests for configuration management."""

import pytest
from pathlib import Path
import yaml
from src.utils.config import Config


class TestConfig:
    """Test configuration management."""

    def test_config_load_from_file(self, temp_dir):
        """Test loading configuration from file."""
        config_data = {
            'solvers': {'stop_residual': 1e-6},
            'features': {'show_progress': False}
        }

        config_file = temp_dir / 'test_config.yaml'
        with open(config_file, 'w') as f:
            yaml.dump(config_data, f)

        config = Config(str(config_file))

        assert config.get('solvers.stop_residual') == 1e-6
        assert config.get('features.show_progress') is False

    def test_config_get_nested(self, test_config):
        """Test getting nested configuration values."""
        assert test_config.get('experiments.exp3.p') == 3
        assert test_config.get('comparison.reference_multiplier') == 3

    def test_config_get_default(self, test_config):
        """Test getting configuration with default value."""
        assert test_config.get('nonexistent.key', 'default') == 'default'
        assert test_config.get('solvers.missing', 100) == 100

    def test_config_missing_file(self, temp_dir):
        """Test a missing file yields built-in defaults."""
        config = Config(str(temp_dir / 'absent.yaml'))

        assert config.to_dict() == {}
        assert config.get_solver_defaults()['sigma_factor'] == 1.1
        assert config.get_experiment_defaults('exp3')['n'] == 2255

    def test_solver_defaults_merge(self, temp_dir):
        """Test file values override only the keys they set."""
        config_file = temp_dir / 'test_config.yaml'
        with open(config_file, 'w') as f:
            yaml.dump({'solvers': {'relaxation': 1.5}}, f)

        defaults = Config(str(config_file)).get_solver_defaults()

        assert defaults['relaxation'] == 1.5
        assert defaults['stop_residual'] == 1e-9
        assert defaults['record_every'] == 1

    def test_experiment_defaults(self, test_config):
        """Test experiment settings come from the file."""
        assert test_config.get_experiment_defaults('exp1') == {'side': 32, 'iters': 20, 'seed': 0}
        assert test_config.get_experiment_defaults('exp3')['m'] == 120

    def test_unknown_experiment(self, test_config):
        """Test unknown experiments raise KeyError."""
        with pytest.raises(KeyError):
            test_config.get_experiment_defaults('exp9')

    def test_feature_flags(self, test_config):
        """Test feature accessors."""
        assert test_config.get_concurrent_workers() == 2
        assert test_config.show_progress() is False
        assert test_config.use_colors() is False

    def test_output_and_logging(self, test_config, temp_dir):
        """Test output directory and log settings."""
        assert test_config.get_output_dir() == temp_dir / 'outputs'
        assert test_config.get_log_config()['file'] == str(temp_dir / 'test.log')

    def test_power_iteration(self, test_config):
        """Test power iteration settings."""
        assert test_config.get_power_iteration() == {'max_iters': 1000, 'tol': 1e-6, 'seed': 0}

    def test_config_validate_success(self, test_config):
        """Test successful validation."""
        assert test_config.validate() is True

    @pytest.mark.parametrize("section,values,message", [
        ('solvers', {'relaxation': 2.0}, 'relaxation'),
        ('solvers', {'sigma_factor': 1.0}, 'sigma_factor'),
        ('solvers', {'record_every': 0}, 'record_every'),
        ('solvers', {'stop_residual': -1.0}, 'stop_residual'),
        ('power_iteration', {'tol': 0.0}, 'tol'),
        ('comparison', {'reference_multiplier': 0}, 'reference_multiplier'),
        ('features', {'concurrent_workers': 0}, 'concurrent_workers'),
    ])
    def test_config_validate_failures(self, temp_dir, section, values, message):
        """Test validation rejects out-of-range values."""
        config_file = temp_dir / 'test_config.yaml'
        with open(config_file, 'w') as f:
            yaml.dump({section: values}, f)

        with pytest.raises(ValueError) as exc_info:
            Config(str(config_file)).validate()

        assert message in str(exc_info.value)

    def test_config_validate_iters(self, temp_dir):
        """Test experiments need a positive iteration budget."""
        config_file = temp_dir / 'test_config.yaml'
        with open(config_file, 'w') as f:
            yaml.dump({'experiments': {'exp2': {'iters': 0}}}, f)

        with pytest.raises(ValueError, match="exp2"):
            Config(str(config_file)).validate()

    def test_repository_config_is_valid(self):
        """Test the shipped config file validates."""
        config = Config(str(Path(__file__).parents[3] / 'config' / 'config.yaml'))
        assert config.validate() is True

    def test_config_to_dict(self, test_config):
        """Test converting config to dictionary."""
        config_dict = test_config.to_dict()

        assert isinstance(config_dict, dict)
        assert 'solvers' in config_dict
        assert 'experiments' in config_dict
