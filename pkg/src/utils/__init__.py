"""Utility modules for the comixture toolkit."""

from .config import Config
from .logger import setup_logging, get_logger, OperationLogger
from .progress import ProgressTracker
from .validators import ValidationError, RunConfigValidator

__all__ = [
    'Config',
    'setup_logging',
    'get_logger',
    'OperationLogger',
    'ProgressTracker',
    'ValidationError',
    'RunConfigValidator'
]
