"""Linear operator and spectrum models."""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np


Shape = Tuple[int, ...]


def conjugate_reflection(values: np.ndarray) -> np.ndarray:
    """Mirror a frequency-indexed array: ``out[k] = values[-k mod dims]``."""
    return np.roll(np.flip(values, axis=(0, 1)), 1, axis=(0, 1))


@dataclass(frozen=True)
class LinearMap:
    """Bounded linear operator with forward and adjoint application.

    Arrays are passed in their natural shape (an image is ``(rows, cols)``,
    a finite-difference field is ``(2, rows, cols)``); dimensions count the
    flattened entries.
    """
    forward: Callable[[np.ndarray], np.ndarray]
    adjoint: Callable[[np.ndarray], np.ndarray]
    in_shape: Shape
    out_shape: Shape
    norm_bound: Optional[float] = None
    label: str = "linear map"

    @property
    def in_dim(self) -> int:
        """Number of input entries."""
        return int(np.prod(self.in_shape))

    @property
    def out_dim(self) -> int:
        """Number of output entries."""
        return int(np.prod(self.out_shape))

    def scaled(self, factor: float, label: Optional[str] = None) -> 'LinearMap':
        """Return ``factor * self`` with a matching norm bound."""
        forward, adjoint = self.forward, self.adjoint
        bound = None if self.norm_bound is None else abs(factor) * self.norm_bound
        return LinearMap(
            forward=lambda x: factor * forward(x),
            adjoint=lambda y: factor * adjoint(y),
            in_shape=self.in_shape,
            out_shape=self.out_shape,
            norm_bound=bound,
            label=label or f"{factor:g}*{self.label}"
        )

    def __repr__(self) -> str:
        return (f"LinearMap({self.label}: {self.in_shape} -> {self.out_shape}, "
                f"norm_bound={self.norm_bound})")


@dataclass(frozen=True)
class Spectrum2D:
    """Unitary two-dimensional DFT coefficients of an image."""
    coefficients: np.ndarray

    @property
    def shape(self) -> Shape:
        return self.coefficients.shape

    def symmetry_defect(self) -> float:
        """Largest deviation from ``coeff(k) == conj(coeff(-k))``."""
        return float(np.max(np.abs(self.coefficients - np.conj(conjugate_reflection(self.coefficients)))))

    def is_conjugate_symmetric(self, tol: float = 1e-9) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.coefficients))))
        return self.symmetry_defect() <= tol * scale
