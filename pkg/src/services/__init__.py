"""Operators, prox catalog, comixtures, solvers and experiments."""

from .comixture import (
    envelope_gradient,
    envelope_value,
    feasibility_comixture,
    from_graph,
    prox_comixture,
    proximal_average,
    validate,
)
from .comparison import ComparisonResult, run_comparison, write_comparison_csv, write_restored_images
from .experiments import build_exp1, build_exp2, build_exp3, build_instance, describe_instance
from .solvers import condat_vu, douglas_rachford, error_db, forward_backward
from .validation_suite import CHECKS, run_checks

__all__ = [
    'validate', 'prox_comixture', 'envelope_value', 'envelope_gradient',
    'from_graph', 'proximal_average', 'feasibility_comixture',
    'douglas_rachford', 'forward_backward', 'condat_vu', 'error_db',
    'build_exp1', 'build_exp2', 'build_exp3', 'build_instance', 'describe_instance',
    'ComparisonResult', 'run_comparison', 'write_comparison_csv', 'write_restored_images',
    'CHECKS', 'run_checks'
]
