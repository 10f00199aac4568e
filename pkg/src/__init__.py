"""Proximal Comixture Toolkit

Proximity operators, proximal comixtures of functions and linear operators,
splitting solvers, and an image-recovery / group-lasso experiment harness.
"""

__version__ = "0.3.0"
__author__ = "Comixture Toolkit Developers"
