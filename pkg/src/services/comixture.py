"""Proximal comixtures: validation, explicit prox, and the averaged-envelope surrogate."""

import logging
from concurrent.futures import Executor
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import (
    AssumptionViolation,
    DimensionMismatchError,
    DuplicateEdgeError,
    NormBoundError,
    TermDimensionError,
    UnsupportedEvaluationError,
    WeightSumError,
)
from ..models import Comixture, ComixtureTerm, ConvexSet, LinearMap, ProxFunction, Violation
from .linops import adjoint_apply, apply, make_identity, operator_norm_estimate
from .prox import indicator, moreau_envelope_value

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOL = 1e-12
NORM_BOUND_TOL = 1e-9

TermLike = Union[ComixtureTerm, Tuple[float, LinearMap, ProxFunction]]

_VIOLATION_ERRORS = {
    'weight_sum': WeightSumError,
    'weight': WeightSumError,
    'norm_bound': NormBoundError,
    'dimension': TermDimensionError,
    'duplicate_edge': DuplicateEdgeError,
}


def _as_term(term: TermLike) -> ComixtureTerm:
    if isinstance(term, ComixtureTerm):
        return term
    weight, op, fn = term
    return ComixtureTerm(weight=float(weight), op=op, fn=fn)


def as_terms(terms: Iterable[TermLike]) -> Tuple[ComixtureTerm, ...]:
    """Normalize ``(weight, op, fn)`` tuples to ``ComixtureTerm`` objects."""
    return tuple(_as_term(term) for term in terms)


def term_norm_bound(op: LinearMap, tol: float = 1e-6, max_iters: int = 1000, seed: int = 0) -> float:
    """Declared norm bound of ``op``, or a power-iteration estimate when none is declared."""
    if op.norm_bound is not None:
        return float(op.norm_bound)
    return operator_norm_estimate(op, tol=tol, max_iters=max_iters, seed=seed)


def collect_violations(
    terms: Sequence[ComixtureTerm],
    ambient_shape: Optional[Tuple[int, ...]] = None,
    norm_tol: float = NORM_BOUND_TOL,
    weight_tol: float = WEIGHT_SUM_TOL,
    power_iteration: Optional[dict] = None
) -> List[Violation]:
    """Check weights, norm bounds and dimensions of a term list.

    Returns:
        One ``Violation`` per problem found (empty when the terms are valid)
    """
    power_iteration = power_iteration or {}
    violations: List[Violation] = []
    if ambient_shape is None:
        ambient_shape = terms[0].op.in_shape

    for index, term in enumerate(terms):
        if not 0.0 < term.weight <= 1.0:
            violations.append(Violation(
                'weight', f"Term {index} weight {term.weight} not in (0, 1]", index
            ))
        if tuple(term.op.in_shape) != tuple(ambient_shape):
            violations.append(Violation(
                'dimension',
                f"Term {index} operator {term.op.label} acts on {term.op.in_shape}, "
                f"ambient space is {tuple(ambient_shape)}",
                index
            ))
            continue
        bound = term_norm_bound(term.op, **power_iteration)
        if bound > 1.0 + norm_tol:
            violations.append(Violation(
                'norm_bound', f"Term {index} operator {term.op.label} has norm {bound:.6g} > 1", index
            ))

    total = float(sum(term.weight for term in terms))
    if abs(total - 1.0) > weight_tol:
        violations.append(Violation('weight_sum', f"Weights sum to {total!r}, expected 1"))

    return violations


def validate(
    terms: Iterable[TermLike],
    ambient_shape: Optional[Tuple[int, ...]] = None,
    norm_tol: float = NORM_BOUND_TOL,
    weight_tol: float = WEIGHT_SUM_TOL,
    power_iteration: Optional[dict] = None
) -> Comixture:
    """Build a comixture after checking the term list.

    Args:
        terms: ``ComixtureTerm`` objects or ``(weight, op, fn)`` tuples
        ambient_shape: Shape of the ambient space (defaults to the first
            operator's input shape)
        norm_tol: Slack allowed above the unit norm bound
        weight_tol: Slack allowed on the weight sum
        power_iteration: Keyword arguments for ``operator_norm_estimate``
            when an operator declares no norm bound

    Raises:
        WeightSumError, NormBoundError, TermDimensionError: Named after the
            first violation found; ``violations`` holds the whole report
    """
    terms = as_terms(terms)
    if not terms:
        raise WeightSumError("A comixture needs at least one term")

    shape = tuple(ambient_shape) if ambient_shape is not None else tuple(terms[0].op.in_shape)
    violations = collect_violations(terms, shape, norm_tol, weight_tol, power_iteration)
    if violations:
        error_class = _VIOLATION_ERRORS.get(violations[0].kind, AssumptionViolation)
        summary = "; ".join(v.message for v in violations)
        raise error_class(f"Invalid comixture: {summary}", violations)

    logger.debug(f"Validated comixture with {len(terms)} terms on shape {shape}")
    return Comixture(terms=terms, ambient_shape=shape)


def _check_ambient(c: Comixture, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != tuple(c.ambient_shape):
        raise DimensionMismatchError(
            f"Comixture acts on shape {c.ambient_shape}, got {x.shape}",
            expected=tuple(c.ambient_shape),
            received=x.shape
        )
    return x


def _term_correction(term: ComixtureTerm, x: np.ndarray) -> np.ndarray:
    y = apply(term.op, x)
    return term.weight * adjoint_apply(term.op, y - term.fn.prox(y, 1.0))


def prox_comixture(c: Comixture, x: np.ndarray, executor: Optional[Executor] = None) -> np.ndarray:
    """Explicit prox: ``x - sum_k alpha_k L_k^*(L_k x - prox_{g_k}(L_k x))``.

    Per-term corrections may be computed on ``executor``; they are summed in
    term order either way.
    """
    x = _check_ambient(c, x)
    if executor is not None:
        corrections = list(executor.map(lambda term: _term_correction(term, x), c.terms))
    else:
        corrections = [_term_correction(term, x) for term in c.terms]

    total = np.zeros_like(x)
    for correction in corrections:
        total += correction
    return x - total


def envelope_value(c: Comixture, x: np.ndarray) -> float:
    """``sum_k alpha_k (g_k □ Q)(L_k x)``: same minimizers as the comixture.

    Raises:
        UnsupportedEvaluationError: If a term function has no value
    """
    x = _check_ambient(c, x)
    missing = [term.fn.label for term in c.terms if not term.fn.has_value]
    if missing:
        raise UnsupportedEvaluationError(f"Terms without values: {', '.join(missing)}")
    return float(sum(term.weight * moreau_envelope_value(term.fn, apply(term.op, x)) for term in c.terms))


def envelope_gradient(c: Comixture, x: np.ndarray, executor: Optional[Executor] = None) -> np.ndarray:
    """Gradient of ``envelope_value``: ``x - prox_comixture(c, x)``."""
    x = _check_ambient(c, x)
    return x - prox_comixture(c, x, executor=executor)


def composite_value(terms: Iterable[TermLike], x: np.ndarray) -> float:
    """Standard composite average ``sum_k alpha_k g_k(L_k x)``."""
    total = 0.0
    for term in map(_as_term, terms):
        total += term.weight * term.fn(apply(term.op, x))
    return float(total)


def from_graph(
    edges: Sequence[Tuple[int, int, float]],
    ambient_shape: Tuple[int, ...],
    fn_factory: Callable[[int, int], ProxFunction],
    op_factory: Optional[Callable[[int, int], LinearMap]] = None,
    **validate_kwargs
) -> Comixture:
    """Comixture indexed by the edges of an undirected graph.

    Args:
        edges: ``(i, j, weight)`` triples; weights must sum to one
        ambient_shape: Shape of the space the edge operators act on
        fn_factory: ``(i, j) -> g_ij``
        op_factory: ``(i, j) -> L_ij``; identity when omitted

    Raises:
        DuplicateEdgeError: If an undirected edge appears twice
    """
    seen = set()
    duplicates = []
    for i, j, _ in edges:
        key = (min(i, j), max(i, j))
        if key in seen:
            duplicates.append(Violation('duplicate_edge', f"Edge ({i}, {j}) listed more than once"))
        seen.add(key)
    if duplicates:
        raise DuplicateEdgeError("Invalid graph: duplicate edges", duplicates)

    identity = make_identity(ambient_shape)
    terms = [
        ComixtureTerm(
            weight=float(weight),
            op=op_factory(i, j) if op_factory is not None else identity,
            fn=fn_factory(i, j)
        )
        for i, j, weight in edges
    ]
    return validate(terms, ambient_shape=ambient_shape, **validate_kwargs)


def proximal_average(
    functions: Sequence[ProxFunction],
    weights: Sequence[float],
    ambient_shape: Tuple[int, ...]
) -> Comixture:
    """Comixture with identity operators (its prox averages the individual proxes)."""
    identity = make_identity(ambient_shape)
    return validate(
        [ComixtureTerm(float(w), identity, fn) for w, fn in zip(weights, functions)],
        ambient_shape=ambient_shape
    )


def feasibility_comixture(
    sets: Sequence[ConvexSet],
    ops: Sequence[LinearMap],
    weights: Sequence[float]
) -> Comixture:
    """Comixture of indicators: relaxes ``L_k x in D_k`` to ``1/2 sum alpha_k d^2_{D_k}(L_k x)``."""
    if not (len(sets) == len(ops) == len(weights)):
        raise ValueError("sets, ops and weights must have the same length")
    return validate([
        ComixtureTerm(float(w), op, indicator(s)) for s, op, w in zip(sets, ops, weights)
    ])
