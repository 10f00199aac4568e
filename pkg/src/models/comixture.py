"""Comixture term models."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .functions import ProxFunction
from .linear_map import LinearMap, Shape


@dataclass(frozen=True)
class ComixtureTerm:
    """One weighted term ``(alpha_k, L_k, g_k)``."""
    weight: float
    op: LinearMap
    fn: ProxFunction


@dataclass(frozen=True)
class Violation:
    """Single entry of a validation report."""
    kind: str  # 'weight_sum', 'weight', 'norm_bound', 'dimension', 'duplicate_edge'
    message: str
    term_index: Optional[int] = None


@dataclass(frozen=True)
class Comixture:
    """Validated list of comixture terms over a common ambient space.

    Build instances through ``services.comixture.validate``.
    """
    terms: Tuple[ComixtureTerm, ...]
    ambient_shape: Shape

    @property
    def ambient_dim(self) -> int:
        return int(np.prod(self.ambient_shape))

    @property
    def p(self) -> int:
        return len(self.terms)

    @property
    def weights(self) -> Tuple[float, ...]:
        return tuple(term.weight for term in self.terms)

    def __len__(self) -> int:
        return len(self.terms)
