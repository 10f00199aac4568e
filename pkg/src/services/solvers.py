"""Douglas-Rachford, forward-backward and Condat-Vu iterations."""

import logging
import time
from concurrent.futures import Executor
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import (
    ComixtureError,
    DimensionMismatchError,
    NormalizationError,
    SolverConfigurationError,
    StepSizeError,
)
from ..models import (
    AlternatingRelaxation,
    Comixture,
    ConstantRelaxation,
    HistoryEntry,
    Method,
    ProxFunction,
    SolveOptions,
    SolveRun,
    check_relaxation,
)
from ..utils.logger import OperationLogger
from ..utils.progress import ProgressTracker
from .comixture import TermLike, as_terms, prox_comixture, term_norm_bound
from .linops import adjoint_apply, apply

logger = logging.getLogger(__name__)

ERROR_DB_FLOOR = -300.0


def constant_relaxation(value: float = 1.0) -> ConstantRelaxation:
    """Schedule ``lambda_n = value`` with ``value`` in (0, 2)."""
    check_relaxation(value, 0)
    return ConstantRelaxation(float(value))


def alternating_relaxation(low: float, high: float) -> AlternatingRelaxation:
    """Schedule alternating ``low, high, low, ...``; both in (0, 2)."""
    check_relaxation(low, 0)
    check_relaxation(high, 1)
    return AlternatingRelaxation(float(low), float(high))


def error_db(x_n: np.ndarray, x0: np.ndarray, x_inf: np.ndarray, floor: float = ERROR_DB_FLOOR) -> float:
    """Normalized error ``20 log10(||x_n - x_inf|| / ||x0 - x_inf||)`` in dB.

    Raises:
        NormalizationError: If ``x0`` equals ``x_inf``
    """
    denominator = float(np.linalg.norm(np.asarray(x0) - np.asarray(x_inf)))
    if denominator == 0.0:
        raise NormalizationError("Initial iterate equals the reference solution; error is undefined")
    numerator = float(np.linalg.norm(np.asarray(x_n) - np.asarray(x_inf)))
    if numerator == 0.0:
        return floor
    return max(20.0 * np.log10(numerator / denominator), floor)


def condat_vu_steps(norms: Sequence[float], sigma_factor: float = 1.1) -> Tuple[float, float]:
    """Step sizes ``tau = 1/beta`` and ``sigma = 1/(sigma_factor beta)`` with ``beta = sqrt(sum ||L_k||^2)``."""
    if sigma_factor <= 1.0:
        raise SolverConfigurationError(f"sigma_factor must exceed 1, got {sigma_factor}")
    beta = float(np.sqrt(sum(float(n) ** 2 for n in norms)))
    if beta == 0.0:
        raise SolverConfigurationError("All operators are zero; step sizes are undefined")
    return 1.0 / beta, 1.0 / (sigma_factor * beta)


def check_step_sizes(tau: float, sigma: float, norms: Sequence[float]) -> float:
    """Return ``tau sigma sum ||L_k||^2`` or raise ``StepSizeError`` when it is not below 1."""
    product = float(tau * sigma * sum(float(n) ** 2 for n in norms))
    if not product < 1.0:
        raise StepSizeError(
            f"Step sizes violate tau*sigma*sum||L_k||^2 < 1 (got {product:.6g})",
            product=product
        )
    return product


def _initial(shape: Tuple[int, ...], vector: Optional[np.ndarray], what: str) -> np.ndarray:
    if vector is None:
        return np.zeros(shape)
    vector = np.array(vector, dtype=float, copy=True)
    if vector.shape != tuple(shape):
        raise DimensionMismatchError(
            f"{what}: expected shape {tuple(shape)}, got {vector.shape}",
            expected=tuple(shape),
            received=vector.shape
        )
    return vector


class _HistoryRecorder:
    """Collects ``HistoryEntry`` rows every ``record_every`` iterations."""

    def __init__(self, opts: SolveOptions, method: Method, shape: Tuple[int, ...]):
        self.opts = opts
        self.method = method
        self.history: List[HistoryEntry] = []
        self.first: Optional[np.ndarray] = None
        self.reference: Optional[np.ndarray] = None
        if opts.reference_solution is not None:
            self.reference = _initial(shape, opts.reference_solution, "reference_solution")

    def record(self, n: int, x: np.ndarray, residual: float, force: bool = False) -> None:
        if not np.isfinite(residual):
            raise ComixtureError(f"{self.method.value}: residual became non-finite at iteration {n}")
        if n == 0:
            self.first = np.array(x, copy=True)
            if self.reference is not None and np.array_equal(self.first, self.reference):
                raise NormalizationError(
                    f"{self.method.value}: first iterate equals the reference solution"
                )
        if not force and n % self.opts.record_every:
            return
        if self.history and self.history[-1].n == n:
            return

        err = error_db(x, self.first, self.reference) if self.reference is not None else None
        self.history.append(HistoryEntry(n=n, residual=float(residual), error_db=err))
        logger.debug(
            f"{self.method.value} n={n} residual={residual:.3e}"
            + (f" err={err:.2f} dB" if err is not None else "")
        )


def _iterations(opts: SolveOptions, method: Method) -> ProgressTracker:
    return ProgressTracker(
        range(opts.max_iters),
        total=opts.max_iters,
        description=method.value,
        disable=not opts.show_progress
    )


def _finish(
    method: Method,
    final_iterate: np.ndarray,
    recorder: _HistoryRecorder,
    iterations_used: int,
    converged: bool,
    start: float
) -> SolveRun:
    run = SolveRun(
        method=method,
        final_iterate=final_iterate,
        history=recorder.history,
        iterations_used=iterations_used,
        converged=converged,
        x0=recorder.first,
        elapsed=time.perf_counter() - start
    )
    logger.info(
        f"{method.value}: {iterations_used} iterations, converged={converged}, "
        f"final residual {run.final_residual:.3e}"
    )
    return run


def douglas_rachford(
    f: ProxFunction,
    c: Comixture,
    y0: Optional[np.ndarray],
    opts: SolveOptions,
    executor: Optional[Executor] = None
) -> SolveRun:
    """Douglas-Rachford splitting of ``f + comixture``.

    Each iteration computes ``x_n = prox_comixture(c, y_n)``,
    ``z_n = prox_f(2 x_n - y_n)`` and ``y_{n+1} = y_n + lambda_n (z_n - x_n)``.
    The residual is ``||z_n - x_n||``; the final iterate is the last ``x_n``.
    The callback receives ``(n, x_n, y_n)``.
    """
    method = Method.DOUGLAS_RACHFORD
    y = _initial(c.ambient_shape, y0, "y0")
    threshold = opts.stop_residual * (np.linalg.norm(y) + 1.0)
    recorder = _HistoryRecorder(opts, method, c.ambient_shape)
    start = time.perf_counter()

    x = y
    converged = False
    n = -1
    with OperationLogger(logger, f"{method.value} solve", max_iters=opts.max_iters, terms=len(c)):
        tracker = _iterations(opts, method)
        for n in tracker:
            x = prox_comixture(c, y, executor=executor)
            z = f.prox(2.0 * x - y, 1.0)
            residual = float(np.linalg.norm(z - x))
            converged = residual <= threshold
            recorder.record(n, x, residual, force=converged or n == opts.max_iters - 1)
            tracker.set_postfix(residual=f"{residual:.2e}")
            if opts.callback is not None:
                opts.callback(n, x, y)
            if converged:
                break
            lam = check_relaxation(opts.relaxation(n), n)
            y = y + lam * (z - x)

    return _finish(method, x, recorder, n + 1, converged, start)


def forward_backward(
    grad_f: Callable[[np.ndarray], np.ndarray],
    beta: float,
    c: Comixture,
    x0: Optional[np.ndarray],
    opts: SolveOptions,
    executor: Optional[Executor] = None
) -> SolveRun:
    """Forward-backward iteration ``x_{n+1} = prox_comixture(c, x_n - grad_f(x_n))``.

    The gradient step is the unit step; ``grad_f`` must be ``beta``-Lipschitz
    with ``beta`` in (0, 2). The residual is ``||x_{n+1} - x_n||``.
    """
    method = Method.FORWARD_BACKWARD
    if not 0.0 < beta < 2.0:
        raise SolverConfigurationError(f"Gradient Lipschitz constant must lie in (0, 2), got {beta}")

    x = _initial(c.ambient_shape, x0, "x0")
    threshold = opts.stop_residual * (np.linalg.norm(x) + 1.0)
    recorder = _HistoryRecorder(opts, method, c.ambient_shape)
    start = time.perf_counter()

    converged = False
    n = -1
    with OperationLogger(logger, f"{method.value} solve", max_iters=opts.max_iters, beta=f"{beta:.4g}"):
        tracker = _iterations(opts, method)
        for n in tracker:
            x_next = prox_comixture(c, x - grad_f(x), executor=executor)
            residual = float(np.linalg.norm(x_next - x))
            converged = residual <= threshold
            recorder.record(n, x, residual, force=converged or n == opts.max_iters - 1)
            tracker.set_postfix(residual=f"{residual:.2e}")
            if opts.callback is not None:
                opts.callback(n, x, None)
            x = x_next
            if converged:
                break

    return _finish(method, x, recorder, n + 1, converged, start)


def condat_vu(
    f: ProxFunction,
    terms: Sequence[TermLike],
    x0: Optional[np.ndarray],
    duals0: Optional[Sequence[np.ndarray]],
    opts: SolveOptions,
    sigma_factor: float = 1.1,
    power_iteration: Optional[dict] = None
) -> SolveRun:
    """Primal-dual iteration for ``f + sum_k alpha_k g_k(L_k x)``.

    ``tau`` and ``sigma`` come from ``opts`` or default to
    ``condat_vu_steps``; ``tau sigma sum ||L_k||^2 < 1`` is checked before
    iterating. The residual is ``||x_{n+1} - x_n|| + sum_k ||v_{k,n+1} - v_{k,n}||``.
    The callback receives ``(n, x_n, None)``.

    Raises:
        StepSizeError: If the step sizes violate the convergence condition
    """
    method = Method.CONDAT_VU
    terms = as_terms(terms)
    if not terms:
        raise SolverConfigurationError("Condat-Vu needs at least one composite term")

    shape = tuple(terms[0].op.in_shape)
    norms = [term_norm_bound(term.op, **(power_iteration or {})) for term in terms]
    tau, sigma = condat_vu_steps(norms, sigma_factor)
    tau = opts.tau if opts.tau is not None else tau
    sigma = opts.sigma if opts.sigma is not None else sigma
    product = check_step_sizes(tau, sigma, norms)
    logger.debug(f"Condat-Vu steps tau={tau:.6g} sigma={sigma:.6g} product={product:.6g}")

    x = _initial(shape, x0, "x0")
    if duals0 is None:
        duals = [np.zeros(term.op.out_shape) for term in terms]
    else:
        if len(duals0) != len(terms):
            raise DimensionMismatchError(
                f"Expected {len(terms)} dual vectors, got {len(duals0)}",
                expected=len(terms),
                received=len(duals0)
            )
        duals = [_initial(term.op.out_shape, v, f"duals0[{k}]") for k, (term, v) in enumerate(zip(terms, duals0))]

    threshold = opts.stop_residual * (
        np.linalg.norm(x) + float(sum(np.linalg.norm(v) for v in duals)) + 1.0
    )
    recorder = _HistoryRecorder(opts, method, shape)
    start = time.perf_counter()

    converged = False
    n = -1
    with OperationLogger(logger, f"{method.value} solve", max_iters=opts.max_iters, terms=len(terms)):
        tracker = _iterations(opts, method)
        for n in tracker:
            dual_sum = np.zeros(shape)
            for term, v in zip(terms, duals):
                dual_sum += adjoint_apply(term.op, v)
            x_next = f.prox(x - tau * dual_sum, tau)
            extrapolated = 2.0 * x_next - x

            residual = float(np.linalg.norm(x_next - x))
            new_duals = []
            for term, v in zip(terms, duals):
                w = v + sigma * apply(term.op, extrapolated)
                v_next = w - sigma * term.fn.prox(w / sigma, term.weight / sigma)
                residual += float(np.linalg.norm(v_next - v))
                new_duals.append(v_next)

            converged = residual <= threshold
            recorder.record(n, x, residual, force=converged or n == opts.max_iters - 1)
            tracker.set_postfix(residual=f"{residual:.2e}")
            if opts.callback is not None:
                opts.callback(n, x, None)
            x = x_next
            duals = new_duals
            if converged:
                break

    return _finish(method, x, recorder, n + 1, converged, start)
