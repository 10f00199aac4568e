"""Convex function and convex set models."""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..exceptions import UnsupportedEvaluationError


@dataclass(frozen=True)
class ConvexSet:
    """Closed convex set represented by its projector."""
    project: Callable[[np.ndarray], np.ndarray]
    label: str = "convex set"
    membership_tol: float = 1e-9

    def distance(self, x: np.ndarray) -> float:
        """Euclidean distance from ``x`` to the set."""
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, x: np.ndarray) -> bool:
        scale = max(1.0, float(np.linalg.norm(x)))
        return self.distance(x) <= self.membership_tol * scale


@dataclass(frozen=True)
class FourierData:
    """Frozen DFT coefficients: a frequency mask and the values imposed there."""
    mask: np.ndarray
    values: np.ndarray

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.mask))


@dataclass(frozen=True)
class ProxFunction:
    """Convex function with an exact proximity operator.

    ``prox(x, gamma)`` returns the proximity operator of ``gamma * f`` at ``x``.
    Indicator functions ignore ``gamma`` (their prox is a projection).
    Smooth functions also carry ``gradient`` and its Lipschitz constant.
    """
    prox: Callable[[np.ndarray, float], np.ndarray]
    label: str
    value: Optional[Callable[[np.ndarray], float]] = None
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    lipschitz: Optional[float] = None
    is_indicator: bool = False

    @property
    def has_value(self) -> bool:
        return self.value is not None

    @property
    def is_smooth(self) -> bool:
        return self.gradient is not None and self.lipschitz is not None

    def __call__(self, x: np.ndarray) -> float:
        if self.value is None:
            raise UnsupportedEvaluationError(f"No value available for {self.label}")
        return float(self.value(x))

    def __repr__(self) -> str:
        return f"ProxFunction({self.label})"
