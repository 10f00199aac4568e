"""Pytest configuration and shared fixtures."""

import pytest
from pathlib import Path
import tempfile

import numpy as np
import yaml

# Add src to path for imports
import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.services.experiments import build_exp1, build_exp2, build_exp3
from src.utils import Config


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def test_config(temp_dir):
    """Create a test configuration at desk scale."""
    config_data = {
        'power_iteration': {
            'max_iters': 1000,
            'tol': 1e-6,
            'seed': 0
        },
        'solvers': {
            'stop_residual': 1e-9,
            'record_every': 1,
            'relaxation': 1.0,
            'sigma_factor': 1.1
        },
        'comparison': {
            'reference_multiplier': 3,
            'float_format': '%.10g'
        },
        'experiments': {
            'exp1': {'side': 32, 'iters': 20, 'seed': 0},
            'exp2': {'side': 32, 'iters': 20, 'seed': 0},
            'exp3': {'n': 140, 'm': 120, 'p': 3, 'iters': 30, 'seed': 0}
        },
        'validation': {
            'oracle_instances': 4,
            'nonexpansive_pairs': 4
        },
        'features': {
            'concurrent_workers': 2,
            'show_progress': False,
            'colored_output': False
        },
        'output': {
            'directory': str(temp_dir / 'outputs')
        },
        'logging': {
            'level': 'INFO',
            'file': str(temp_dir / 'test.log'),
            'max_size': 10,
            'backup_count': 5,
            'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        }
    }

    config_file = temp_dir / 'config.yaml'
    with open(config_file, 'w') as f:
        yaml.dump(config_data, f)

    return Config(str(config_file))


@pytest.fixture(scope='session')
def exp1_small():
    """Deblurring instance at 32 x 32."""
    return build_exp1(32, 0)


@pytest.fixture(scope='session')
def exp2_small():
    """Phase recovery instance at 32 x 32."""
    return build_exp2(32, 0)


@pytest.fixture(scope='session')
def exp3_small():
    """Group lasso instance with three groups (n = 140)."""
    return build_exp3(140, 120, 3, 0)


@pytest.fixture
def sample_pgm(temp_dir):
    """Write a small 8-bit PGM ramp and return its path."""
    image = np.tile(np.arange(0, 256, 4, dtype=np.uint8), (40, 1))[:, :48]
    path = temp_dir / 'ramp.pgm'
    with open(path, 'wb') as f:
        f.write(b"P5\n# ramp\n48 40\n255\n")
        f.write(image.tobytes())
    return path
