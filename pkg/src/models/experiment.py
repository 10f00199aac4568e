"""Experiment instance model."""

from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

import numpy as np

from .comixture import ComixtureTerm
from .functions import ProxFunction


@dataclass
class ExperimentInstance:
    """Fully materialized recovery problem.

    ``f`` is the function outside the aggregation, ``terms`` the weighted
    ``(alpha_k, L_k, g_k)`` list shared by the composite-average and the
    comixture formulations.
    """
    name: str
    f: ProxFunction
    terms: Tuple[ComixtureTerm, ...]
    ground_truth: np.ndarray
    observations: Dict[str, np.ndarray] = field(default_factory=dict)
    seed: int = 0
    scale: Dict[str, int] = field(default_factory=dict)
    parameters: Dict[str, Any] = field(default_factory=dict)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.ground_truth.shape

    @property
    def is_image(self) -> bool:
        return self.ground_truth.ndim == 2

    @property
    def p(self) -> int:
        return len(self.terms)
