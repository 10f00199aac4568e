"""Data models for operators, functions, comixtures, solver runs and experiments."""

from .linear_map import LinearMap, Spectrum2D
from .functions import ConvexSet, FourierData, ProxFunction
from .comixture import Comixture, ComixtureTerm, Violation
from .solve import (
    Method, SolveOptions, SolveRun, HistoryEntry,
    ConstantRelaxation, AlternatingRelaxation, check_relaxation
)
from .experiment import ExperimentInstance

__all__ = [
    'LinearMap', 'Spectrum2D',
    'ConvexSet', 'FourierData', 'ProxFunction',
    'Comixture', 'ComixtureTerm', 'Violation',
    'Method', 'SolveOptions', 'SolveRun', 'HistoryEntry',
    'ConstantRelaxation', 'AlternatingRelaxation', 'check_relaxation',
    'ExperimentInstance'
]
