"""Named numerical checks of the prox catalog, operators and comixture identities.

Each check returns the worst defect it observed; a check passes when that
defect is within its tolerance. Checks look up catalog functions through this
module's namespace, so a replaced function is what gets checked.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np

from ..exceptions import StepSizeError
from ..models import ComixtureTerm
from ..utils.progress import ProgressTracker
from .comixture import envelope_gradient, envelope_value, prox_comixture, proximal_average, validate
from .experiments import build_exp1
from .linops import (
    check_adjoint,
    dft2,
    idft2,
    make_convolution,
    make_coordinate_selector,
    make_finite_difference,
    make_identity,
    operator_norm_estimate,
    symmetric_closure,
)
from .prox import (
    ball_set,
    euclidean_norm,
    fourier_constraint,
    half_squared_norm,
    huber,
    huber_distance,
    huber_norm,
    l1_norm,
    least_squares,
    moreau_envelope_value,
    numeric_prox_oracle,
    project_ball,
    project_fourier_data,
    project_hyperplane,
    project_phase,
    prox_box,
    prox_distance,
    prox_euclidean_norm,
    prox_huber_of_distance,
    prox_huber_of_norm,
    prox_l1,
    prox_pair_difference,
)
from .solvers import check_step_sizes, condat_vu_steps

logger = logging.getLogger(__name__)

ORACLE_TOL = 1e-5
EXACT_TOL = 1e-9

CheckFunction = Callable[[np.random.Generator, int], float]


@dataclass(frozen=True)
class Check:
    name: str
    run: CheckFunction
    tolerance: float


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    defect: float
    tolerance: float
    detail: str = ""


CHECKS: Dict[str, Check] = {}


def register(name: str, tolerance: float = EXACT_TOL):
    """Decorator adding a check to the registry."""
    def decorator(func: CheckFunction) -> CheckFunction:
        CHECKS[name] = Check(name=name, run=func, tolerance=tolerance)
        return func
    return decorator


def _oracle_defect(
    rng: np.random.Generator,
    instances: int,
    prox: Callable[[np.ndarray, float], np.ndarray],
    value: Callable[[np.ndarray], float],
    dims: Iterable[int] = (1, 2),
    spread: float = 3.0,
    half_width: Optional[float] = None
) -> float:
    """Worst distance between ``prox(x, gamma)`` and the grid-search prox."""
    dims = tuple(dims)
    worst = 0.0
    for i in range(instances):
        x = spread * rng.standard_normal(dims[i % len(dims)])
        gamma = float(rng.uniform(0.2, 2.0))
        bounds = None if half_width is None else np.stack([x - half_width, x + half_width], axis=1)
        expected = numeric_prox_oracle(value, x, gamma, bounds=bounds, tol=1e-7)
        worst = max(worst, float(np.linalg.norm(prox(x, gamma) - expected)))
    return worst


# ---------------------------------------------------------------------------
# Prox catalog vs oracle
# ---------------------------------------------------------------------------

@register("prox_box vs oracle", ORACLE_TOL)
def _box_oracle(rng, instances):
    return _oracle_defect(
        rng, instances,
        lambda x, gamma: prox_box(x, -1.0, 2.0),
        lambda z: 0.0 if np.all((z >= -1.0) & (z <= 2.0)) else np.inf
    )


@register("prox_l1 vs oracle", ORACLE_TOL)
def _l1_oracle(rng, instances):
    return _oracle_defect(rng, instances, prox_l1, lambda z: float(np.sum(np.abs(z))))


@register("prox_euclidean_norm vs oracle", ORACLE_TOL)
def _norm_oracle(rng, instances):
    return _oracle_defect(rng, instances, prox_euclidean_norm, lambda z: float(np.linalg.norm(z)))


@register("prox_distance vs oracle", ORACLE_TOL)
def _distance_oracle(rng, instances):
    worst = 0.0
    for i in range(instances):
        dim = 1 + i % 2
        ball = ball_set(rng.standard_normal(dim), float(rng.uniform(0.5, 2.0)))
        worst = max(worst, _oracle_defect(
            rng, 1, lambda x, gamma: prox_distance(x, ball, gamma), ball.distance, dims=(dim,)
        ))
    return worst


@register("prox_huber_of_norm vs oracle", ORACLE_TOL)
def _huber_norm_oracle(rng, instances):
    worst = 0.0
    for i in range(instances):
        dim = 1 + i % 2
        center = rng.standard_normal(dim)
        rho = float(rng.uniform(0.3, 2.0))
        worst = max(worst, _oracle_defect(
            rng, 1,
            lambda x, gamma: prox_huber_of_norm(x, center, rho, gamma),
            lambda z: float(huber(np.linalg.norm(z - center), rho)),
            dims=(dim,)
        ))
    return worst


@register("prox_huber_of_distance vs oracle", ORACLE_TOL)
def _huber_distance_oracle(rng, instances):
    worst = 0.0
    for i in range(instances):
        dim = 1 + i % 2
        ball = ball_set(rng.standard_normal(dim), float(rng.uniform(0.5, 2.0)))
        rho = float(rng.uniform(0.3, 2.0))
        worst = max(worst, _oracle_defect(
            rng, 1,
            lambda x, gamma: prox_huber_of_distance(x, ball, rho, gamma),
            lambda z: float(huber(ball.distance(z), rho)),
            dims=(dim,)
        ))
    return worst


@register("prox_pair_difference vs oracle", ORACLE_TOL)
def _pair_difference_oracle(rng, instances):
    return _oracle_defect(
        rng, instances,
        lambda x, gamma: prox_pair_difference(x, 0, 1, gamma),
        lambda z: float(abs(z[0] - z[1])),
        dims=(2,)
    )


@register("least_squares prox vs oracle", ORACLE_TOL)
def _least_squares_oracle(rng, instances):
    worst = 0.0
    for _ in range(instances):
        f = least_squares(rng.standard_normal((3, 2)) / 3.0, rng.standard_normal(3))
        worst = max(worst, _oracle_defect(rng, 1, f.prox, f.value, dims=(2,), half_width=20.0))
    return worst


# ---------------------------------------------------------------------------
# Projections and envelope identities
# ---------------------------------------------------------------------------

@register("project_hyperplane membership")
def _hyperplane(rng, instances):
    worst = 0.0
    for _ in range(instances):
        x = 10.0 * rng.standard_normal(int(rng.integers(2, 50)))
        eta = float(rng.normal(scale=20.0))
        worst = max(worst, abs(float(project_hyperplane(x, eta).sum()) - eta) / (1.0 + abs(eta)))
    return worst


@register("project_ball characterization")
def _ball_characterization(rng, instances):
    worst = 0.0
    for _ in range(instances):
        center = rng.standard_normal(3)
        radius = float(rng.uniform(0.5, 2.0))
        x = 3.0 * rng.standard_normal(3)
        p = project_ball(x, center, radius)
        worst = max(worst, float(np.linalg.norm(project_ball(p, center, radius) - p)))
        member = project_ball(center + 3.0 * rng.standard_normal(3), center, radius)
        worst = max(worst, float(np.dot(x - p, member - p)))
    return worst


@register("moreau decomposition l1")
def _moreau_l1(rng, instances):
    worst = 0.0
    for _ in range(instances):
        x = 3.0 * rng.standard_normal(5)
        gamma = float(rng.uniform(0.2, 3.0))
        # conjugate of ||.||_1 is the indicator of the unit l-infinity ball
        recomposed = prox_l1(x, gamma) + gamma * prox_box(x / gamma, -1.0, 1.0)
        worst = max(worst, float(np.max(np.abs(recomposed - x))))
    return worst


@register("moreau decomposition euclidean norm")
def _moreau_norm(rng, instances):
    worst = 0.0
    for _ in range(instances):
        x = 3.0 * rng.standard_normal(5)
        gamma = float(rng.uniform(0.2, 3.0))
        recomposed = prox_euclidean_norm(x, gamma) + gamma * project_ball(x / gamma, np.zeros(5), 1.0)
        worst = max(worst, float(np.max(np.abs(recomposed - x))))
    return worst


@register("moreau envelope gradient", 1e-4)
def _envelope_gradient(rng, instances):
    functions = [
        euclidean_norm(),
        l1_norm(0.7),
        huber_norm(np.ones(3), 0.8),
        huber_distance(ball_set(np.zeros(3), 1.0), 1.5),
    ]
    delta = 1e-5
    worst = 0.0
    for i in range(instances):
        g = functions[i % len(functions)]
        x = 2.0 * rng.standard_normal(3)
        e = rng.standard_normal(3)
        e /= np.linalg.norm(e)
        numeric = (moreau_envelope_value(g, x + delta * e) - moreau_envelope_value(g, x - delta * e)) / (2 * delta)
        exact = float(np.dot(x - g.prox(x, 1.0), e))
        worst = max(worst, abs(numeric - exact) / (1.0 + abs(exact)))
    return worst


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

@register("adjoint convolution")
def _adjoint_convolution(rng, instances):
    return check_adjoint(make_convolution(3, 11, (32, 32)), trials=min(instances, 50), rng=rng)


@register("adjoint finite difference")
def _adjoint_differences(rng, instances):
    return check_adjoint(make_finite_difference((8, 8)), trials=min(instances, 50), rng=rng)


@register("adjoint coordinate selector")
def _adjoint_selector(rng, instances):
    return check_adjoint(make_coordinate_selector(46, 50, 2255), trials=min(instances, 50), rng=rng)


@register("norm bound convolution", 1e-6)
def _norm_convolution(rng, instances):
    op = make_convolution(7, 5, (32, 32))
    return max(0.0, operator_norm_estimate(op) - op.norm_bound)


@register("norm bound finite difference", 1e-6)
def _norm_differences(rng, instances):
    op = make_finite_difference((16, 16))
    return max(0.0, operator_norm_estimate(op) - op.norm_bound)


@register("dft round trip")
def _dft_round_trip(rng, instances):
    x = rng.standard_normal((64, 64))
    return float(np.max(np.abs(idft2(dft2(x)) - x)))


@register("dft parseval")
def _dft_parseval(rng, instances):
    x = rng.standard_normal((16, 16))
    norm = float(np.linalg.norm(x))
    return abs(float(np.linalg.norm(dft2(x).coefficients)) - norm) / norm


@register("dft vs direct sum")
def _dft_direct(rng, instances):
    x = rng.standard_normal((8, 8))
    k = np.arange(8)
    basis = np.exp(-2j * np.pi * np.outer(k, k) / 8) / np.sqrt(8)
    return float(np.max(np.abs(dft2(x).coefficients - basis @ x @ basis.T)))


@register("fourier data projection")
def _fourier_projection(rng, instances):
    reference = rng.uniform(0, 255, (16, 16))
    mask = np.zeros((16, 16), dtype=bool)
    mask[:3, :3] = True
    frozen = fourier_constraint(symmetric_closure(mask), dft2(reference))
    x = rng.uniform(0, 255, (16, 16))
    p = project_fourier_data(x, frozen)
    idempotence = float(np.max(np.abs(project_fourier_data(p, frozen) - p)))
    spectrum_gap = float(np.sum(np.abs(dft2(x).coefficients - frozen.values)[frozen.mask] ** 2))
    distance_gap = abs(float(np.sum((x - p) ** 2)) - spectrum_gap) / (1.0 + spectrum_gap)
    return max(idempotence / 255.0, distance_gap)


@register("phase projection idempotence")
def _phase_projection(rng, instances):
    theta = np.angle(dft2(rng.uniform(0, 255, (16, 16))).coefficients)
    worst = 0.0
    for _ in range(min(instances, 20)):
        p = project_phase(rng.standard_normal((16, 16)), theta)
        worst = max(worst, float(np.max(np.abs(project_phase(p, theta) - p))) / (1.0 + float(np.max(np.abs(p)))))
    return worst


# ---------------------------------------------------------------------------
# Comixture identities
# ---------------------------------------------------------------------------

@register("comixture single identity term", 1e-12)
def _single_term(rng, instances):
    g = huber_norm(np.ones(4), 0.5)
    c = validate([ComixtureTerm(1.0, make_identity((4,)), g)])
    worst = 0.0
    for _ in range(instances):
        x = 3.0 * rng.standard_normal(4)
        worst = max(worst, float(np.max(np.abs(prox_comixture(c, x) - g.prox(x, 1.0)))))
    return worst


@register("comixture proximal average", 1e-12)
def _proximal_average(rng, instances):
    functions = [l1_norm(), euclidean_norm(2.0), huber_norm(np.zeros(4), 1.0)]
    weights = [0.5, 0.3, 0.2]
    c = proximal_average(functions, weights, (4,))
    worst = 0.0
    for _ in range(instances):
        x = 3.0 * rng.standard_normal(4)
        average = sum(w * g.prox(x, 1.0) for w, g in zip(weights, functions))
        worst = max(worst, float(np.max(np.abs(prox_comixture(c, x) - average))))
    return worst


@register("comixture scaled identity quadratic", 1e-12)
def _scaled_quadratic(rng, instances):
    op = make_identity((5,)).scaled(1.0 / np.sqrt(2.0))
    c = validate([ComixtureTerm(1.0, op, half_squared_norm())])
    worst = 0.0
    for _ in range(instances):
        x = 3.0 * rng.standard_normal(5)
        worst = max(worst, float(np.max(np.abs(prox_comixture(c, x) - 0.75 * x))))
    return worst


@register("comixture firm nonexpansiveness")
def _firm_nonexpansive(rng, instances):
    inst = build_exp1(32, 0)
    c = validate(inst.terms)
    worst = 0.0
    for _ in range(min(instances, 100)):
        x = rng.uniform(0, 255, inst.shape)
        y = rng.uniform(0, 255, inst.shape)
        px, py = prox_comixture(c, x), prox_comixture(c, y)
        gap = float(np.sum((px - py) ** 2)) - float(np.sum((px - py) * (x - y)))
        worst = max(worst, gap / (1.0 + float(np.sum((x - y) ** 2))))
    return worst


@register("comixture envelope gradient", 1e-4)
def _comixture_envelope_gradient(rng, instances):
    ball = ball_set(np.zeros(3), 1.0)
    c = validate([
        ComixtureTerm(0.5, make_identity((3,)), huber_distance(ball, 0.7)),
        ComixtureTerm(0.3, make_identity((3,)).scaled(0.5), l1_norm()),
        ComixtureTerm(0.2, make_identity((3,)), huber_norm(np.ones(3), 2.0)),
    ])
    delta = 1e-5
    worst = 0.0
    for _ in range(min(instances, 20)):
        x = 2.0 * rng.standard_normal(3)
        gradient = envelope_gradient(c, x)
        numeric = np.array([
            (envelope_value(c, x + delta * e) - envelope_value(c, x - delta * e)) / (2 * delta)
            for e in np.eye(3)
        ])
        worst = max(worst, float(np.linalg.norm(numeric - gradient)) / (1.0 + float(np.linalg.norm(gradient))))
    return worst


@register("condat_vu step-size guardrail")
def _step_guardrail(rng, instances):
    norms = [1.0, 1.0, 1.0, 1.0]
    tau, sigma = condat_vu_steps(norms, 1.1)
    defect = abs(check_step_sizes(tau, sigma, norms) - 1.0 / 1.1)
    try:
        check_step_sizes(1.1, 1.1, [1.0])
    except StepSizeError:
        return defect
    return 1.0


def run_checks(
    instances: int = 100,
    seed: int = 0,
    names: Optional[Iterable[str]] = None,
    show_progress: bool = False
) -> List[CheckResult]:
    """Run registered checks (all by default) with a fresh seeded generator each."""
    selected = list(names) if names is not None else list(CHECKS)
    unknown = [name for name in selected if name not in CHECKS]
    if unknown:
        raise KeyError(f"Unknown checks: {', '.join(unknown)}")

    results = []
    for name in ProgressTracker(selected, total=len(selected), description="validate", unit="check",
                                disable=not show_progress):
        check = CHECKS[name]
        rng = np.random.default_rng(seed)
        try:
            defect = float(check.run(rng, instances))
        except Exception as e:
            logger.debug(f"Check '{name}' raised", exc_info=True)
            results.append(CheckResult(name, False, float('inf'), check.tolerance, f"{type(e).__name__}: {e}"))
            continue
        passed = bool(np.isfinite(defect) and defect <= check.tolerance)
        results.append(CheckResult(name, passed, defect, check.tolerance))
        logger.debug(f"Check '{name}': defect {defect:.3e} (tol {check.tolerance:g})")

    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.warning(f"{len(failed)} of {len(results)} checks failed: {', '.join(failed)}")
    else:
        logger.info(f"All {len(results)} checks passed")
    return results
