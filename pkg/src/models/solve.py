"""Solver option and run-history models."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional

import numpy as np

from ..exceptions import SolverConfigurationError


class Method(str, Enum):
    """Available splitting methods."""
    CONDAT_VU = "condat_vu"
    DOUGLAS_RACHFORD = "douglas_rachford"
    FORWARD_BACKWARD = "forward_backward"

    @property
    def uses_comixture(self) -> bool:
        return self is not Method.CONDAT_VU


@dataclass(frozen=True)
class ConstantRelaxation:
    """Relaxation schedule ``lambda_n = value``."""
    value: float = 1.0

    def __call__(self, n: int) -> float:
        return self.value


@dataclass(frozen=True)
class AlternatingRelaxation:
    """Relaxation schedule alternating between two values in (0, 2)."""
    low: float
    high: float

    def __call__(self, n: int) -> float:
        return self.low if n % 2 == 0 else self.high


def check_relaxation(value: float, n: int) -> float:
    """Validate ``lambda_n`` lies in (0, 2)."""
    if not 0.0 < value < 2.0:
        raise SolverConfigurationError(
            f"Relaxation parameter at iteration {n} is {value}; expected a value in (0, 2)"
        )
    return value


@dataclass
class SolveOptions:
    """Options shared by the three solvers."""
    max_iters: int
    relaxation: Callable[[int], float] = field(default_factory=ConstantRelaxation)
    tau: Optional[float] = None
    sigma: Optional[float] = None
    stop_residual: float = 1e-9
    record_every: int = 1
    reference_solution: Optional[np.ndarray] = None
    callback: Optional[Callable[[int, np.ndarray, Optional[np.ndarray]], None]] = None
    show_progress: bool = False

    def __post_init__(self):
        if isinstance(self.relaxation, (int, float)):
            self.relaxation = ConstantRelaxation(float(self.relaxation))
        if not isinstance(self.max_iters, (int, np.integer)) or self.max_iters <= 0:
            raise SolverConfigurationError(f"max_iters must be a positive integer, got {self.max_iters}")
        if self.record_every <= 0:
            raise SolverConfigurationError(f"record_every must be positive, got {self.record_every}")
        if self.stop_residual < 0:
            raise SolverConfigurationError(f"stop_residual cannot be negative, got {self.stop_residual}")
        if self.tau is not None and self.tau <= 0:
            raise SolverConfigurationError(f"tau must be positive, got {self.tau}")
        if self.sigma is not None and self.sigma <= 0:
            raise SolverConfigurationError(f"sigma must be positive, got {self.sigma}")
        check_relaxation(self.relaxation(0), 0)


@dataclass(frozen=True)
class HistoryEntry:
    """One recorded iteration."""
    n: int
    residual: float
    error_db: Optional[float] = None


@dataclass
class SolveRun:
    """Result of a solver run."""
    method: Method
    final_iterate: np.ndarray
    history: List[HistoryEntry] = field(default_factory=list)
    iterations_used: int = 0
    converged: bool = False
    x0: Optional[np.ndarray] = None
    elapsed: float = 0.0

    @property
    def residuals(self) -> np.ndarray:
        return np.array([entry.residual for entry in self.history])

    @property
    def errors_db(self) -> Optional[np.ndarray]:
        if not self.history or self.history[0].error_db is None:
            return None
        return np.array([entry.error_db for entry in self.history])

    @property
    def final_residual(self) -> float:
        return self.history[-1].residual if self.history else float('nan')

    @property
    def final_error_db(self) -> Optional[float]:
        return self.history[-1].error_db if self.history else None
