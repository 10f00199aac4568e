"""Composite-average vs comixture comparisons and their CSV/PGM artifacts."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from tabulate import tabulate

from ..exceptions import MethodMismatchError
from ..models import Comixture, ExperimentInstance, Method, SolveOptions, SolveRun
from ..utils.logger import OperationLogger
from .experiments import snr_db
from .image_io import write_pgm
from .solvers import condat_vu, constant_relaxation, douglas_rachford, forward_backward

logger = logging.getLogger(__name__)

CSV_COLUMNS = ['n', 'method', 'err_db', 'residual']

DEFAULT_PAIRS: Dict[str, Tuple[Method, Method]] = {
    'exp1': (Method.CONDAT_VU, Method.DOUGLAS_RACHFORD),
    'exp2': (Method.CONDAT_VU, Method.DOUGLAS_RACHFORD),
    'exp3': (Method.CONDAT_VU, Method.FORWARD_BACKWARD),
}


@dataclass
class ComparisonResult:
    """Runs of two methods on one instance, each measured against its own long-run reference."""
    instance: ExperimentInstance
    runs: Dict[Method, SolveRun] = field(default_factory=dict)
    references: Dict[Method, np.ndarray] = field(default_factory=dict)

    @property
    def methods(self) -> List[Method]:
        return list(self.runs)

    def frame(self) -> pd.DataFrame:
        """Convergence table with columns ``n, method, err_db, residual``."""
        rows = [
            (entry.n, method.value, entry.error_db, entry.residual)
            for method, run in self.runs.items()
            for entry in run.history
        ]
        return pd.DataFrame(rows, columns=CSV_COLUMNS)

    def summary_rows(self) -> List[List]:
        rows = []
        for method, run in self.runs.items():
            rows.append([
                method.value,
                run.iterations_used,
                run.final_error_db,
                run.final_residual,
                snr_db(self.instance.ground_truth, run.final_iterate),
                run.elapsed,
            ])
        return rows

    def summary_table(self) -> str:
        return tabulate(
            self.summary_rows(),
            headers=['method', 'iterations', 'final err (dB)', 'final residual', 'SNR (dB)', 'time (s)'],
            floatfmt='.4g'
        )


def check_method(inst: ExperimentInstance, method: Method) -> None:
    """Reject methods the instance cannot be solved with.

    Raises:
        MethodMismatchError: If forward-backward is requested for a
            nonsmooth ``f`` or a gradient whose Lipschitz constant is not in (0, 2)
    """
    if method is Method.FORWARD_BACKWARD:
        if not inst.f.is_smooth:
            raise MethodMismatchError(
                f"Forward-backward needs a smooth f; {inst.name} uses {inst.f.label}"
            )
        if not 0.0 < inst.f.lipschitz < 2.0:
            raise MethodMismatchError(
                f"Forward-backward needs a gradient Lipschitz constant in (0, 2), got {inst.f.lipschitz}"
            )


def solve_instance(
    inst: ExperimentInstance,
    method: Method,
    opts: SolveOptions,
    sigma_factor: float = 1.1,
    power_iteration: Optional[dict] = None
) -> SolveRun:
    """Solve ``inst`` with ``method`` from zero initial vectors."""
    check_method(inst, method)
    if method is Method.CONDAT_VU:
        return condat_vu(
            inst.f, inst.terms, None, None, opts,
            sigma_factor=sigma_factor, power_iteration=power_iteration
        )

    comixture = Comixture(terms=tuple(inst.terms), ambient_shape=tuple(inst.shape))
    if method is Method.DOUGLAS_RACHFORD:
        return douglas_rachford(inst.f, comixture, None, opts)
    return forward_backward(inst.f.gradient, inst.f.lipschitz, comixture, None, opts)


def run_comparison(
    inst: ExperimentInstance,
    method_a: Optional[Method] = None,
    method_b: Optional[Method] = None,
    iters: int = 500,
    record_every: int = 1,
    stop_residual: float = 1e-9,
    relaxation: float = 1.0,
    sigma_factor: float = 1.1,
    reference_multiplier: int = 10,
    workers: int = 2,
    show_progress: bool = False,
    power_iteration: Optional[dict] = None
) -> ComparisonResult:
    """Run two methods on ``inst`` and record normalized errors.

    Each method's reference ``x_inf`` is its own final iterate after
    ``reference_multiplier * iters`` iterations with no early stopping.
    The methods run concurrently on ``workers`` threads.
    """
    default_a, default_b = DEFAULT_PAIRS.get(inst.name, (Method.CONDAT_VU, Method.DOUGLAS_RACHFORD))
    methods = (method_a or default_a, method_b or default_b)
    for method in methods:
        check_method(inst, method)

    reference_iters = reference_multiplier * iters

    def run_method(method: Method) -> Tuple[np.ndarray, SolveRun]:
        reference = solve_instance(inst, method, SolveOptions(
            max_iters=reference_iters,
            relaxation=constant_relaxation(relaxation),
            stop_residual=0.0,
            record_every=reference_iters,
            show_progress=show_progress
        ), sigma_factor, power_iteration)
        run = solve_instance(inst, method, SolveOptions(
            max_iters=iters,
            relaxation=constant_relaxation(relaxation),
            stop_residual=stop_residual,
            record_every=record_every,
            reference_solution=reference.final_iterate,
            show_progress=show_progress
        ), sigma_factor, power_iteration)
        return reference.final_iterate, run

    result = ComparisonResult(instance=inst)
    with OperationLogger(logger, f"comparison on {inst.name}", methods='/'.join(m.value for m in methods), iters=iters):
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = {method: executor.submit(run_method, method) for method in methods}
            for method in methods:
                reference, run = futures[method].result()
                result.references[method] = reference
                result.runs[method] = run

    return result


def write_comparison_csv(result: ComparisonResult, path: Path, float_format: str = '%.10g') -> Path:
    """Write the convergence table; identical results give identical bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    result.frame().to_csv(path, index=False, float_format=float_format, lineterminator='\n')
    logger.info(f"Wrote {path}")
    return path


def write_restored_images(result: ComparisonResult, output_dir: Path) -> List[Path]:
    """Write ``<exp>_<method>.pgm`` for image experiments; nothing for vector ones."""
    if not result.instance.is_image:
        return []
    paths = []
    for method, run in result.runs.items():
        path = write_pgm(Path(output_dir) / f"{result.instance.name}_{method.value}.pgm", run.final_iterate)
        logger.info(f"Wrote {path}")
        paths.append(path)
    return paths
