"""Catalog of convex functions with exact proximity operators.

Every ``prox_*`` function returns the proximity operator of ``gamma * f``.
Projections ignore the scale. The Huber penalties are Moreau envelopes of
scaled norms/distances and their proxes go through ``prox_moreau_envelope``.
"""

import logging
from typing import Callable, Dict, Optional, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ..exceptions import OracleError, SymmetryError, UnsupportedEvaluationError
from ..models import ConvexSet, FourierData, ProxFunction, Spectrum2D
from .linops import conjugate_reflection, dft2, idft2

logger = logging.getLogger(__name__)

ProxMap = Callable[[np.ndarray, float], np.ndarray]


def _check_gamma(gamma: float) -> None:
    if gamma <= 0:
        raise ValueError(f"Prox scale must be positive, got {gamma}")


def huber(t, rho: float):
    """Huber function: quadratic up to ``rho``, linear with slope ``rho`` beyond."""
    t = np.abs(t)
    return np.where(t > rho, rho * t - 0.5 * rho ** 2, 0.5 * t ** 2)


# ---------------------------------------------------------------------------
# Projections
# ---------------------------------------------------------------------------

def prox_box(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Clamp ``x`` coordinatewise to ``[lo, hi]``."""
    if lo >= hi:
        raise ValueError(f"Box needs lo < hi, got [{lo}, {hi}]")
    return np.clip(x, lo, hi)


def project_hyperplane(x: np.ndarray, eta: float) -> np.ndarray:
    """Project onto ``{x : sum(x) = eta}``."""
    x = np.asarray(x, dtype=float)
    return x + (eta - x.sum()) / x.size


def project_ball(x: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """Project onto the closed Euclidean ball of given center and radius."""
    if radius <= 0:
        raise ValueError(f"Ball radius must be positive, got {radius}")
    x = np.asarray(x, dtype=float)
    diff = x - center
    dist = np.linalg.norm(diff)
    if dist <= radius:
        return x.copy()
    return center + (radius / dist) * diff


def project_fourier_data(x: np.ndarray, frozen: FourierData) -> np.ndarray:
    """Impose the frozen DFT coefficients on ``x`` (projection onto an affine set)."""
    coefficients = dft2(x).coefficients
    coefficients[frozen.mask] = frozen.values[frozen.mask]
    return idft2(Spectrum2D(coefficients))


def project_phase(x: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Project onto images whose DFT has phase ``theta`` (nonnegative moduli)."""
    rotation = np.exp(1j * theta)
    coefficients = dft2(x).coefficients
    modulus = np.maximum(np.real(np.conj(rotation) * coefficients), 0.0)
    return idft2(Spectrum2D(modulus * rotation))


# ---------------------------------------------------------------------------
# Set factories
# ---------------------------------------------------------------------------

def box_set(lo: float, hi: float) -> ConvexSet:
    if lo >= hi:
        raise ValueError(f"Box needs lo < hi, got [{lo}, {hi}]")
    return ConvexSet(project=lambda x: prox_box(x, lo, hi), label=f"[{lo:g},{hi:g}]^N")


def singleton_set(point: np.ndarray) -> ConvexSet:
    point = np.asarray(point, dtype=float)
    return ConvexSet(project=lambda x: np.broadcast_to(point, np.shape(x)).copy(), label="{a}")


def hyperplane_set(eta: float) -> ConvexSet:
    return ConvexSet(project=lambda x: project_hyperplane(x, eta), label=f"<x,1>={eta:g}")


def ball_set(center: np.ndarray, radius: float) -> ConvexSet:
    if radius <= 0:
        raise ValueError(f"Ball radius must be positive, got {radius}")
    center = np.asarray(center, dtype=float)
    return ConvexSet(project=lambda x: project_ball(x, center, radius), label=f"ball(r={radius:g})")


def fourier_constraint(mask: np.ndarray, target: Spectrum2D, tol: float = 1e-9) -> FourierData:
    """Validate a frozen frequency set and its target coefficients.

    Raises:
        SymmetryError: If the mask is not closed under ``k -> -k`` or the
            target values are not conjugate symmetric on the mask
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != target.shape:
        raise SymmetryError(f"Mask shape {mask.shape} does not match spectrum shape {target.shape}")
    if not np.array_equal(mask, conjugate_reflection(mask)):
        raise SymmetryError("Frozen frequency set is not closed under conjugate symmetry")
    values = target.coefficients
    mirrored = np.conj(conjugate_reflection(values))
    scale = max(1.0, float(np.max(np.abs(values))))
    if np.any(np.abs(values - mirrored)[mask] > tol * scale):
        raise SymmetryError("Frozen values are not conjugate symmetric")
    return FourierData(mask=mask, values=np.where(mask, values, 0.0))


def fourier_data_set(frozen: FourierData) -> ConvexSet:
    return ConvexSet(project=lambda x: project_fourier_data(x, frozen), label=f"E(|R|={frozen.count})")


def phase_set(theta: np.ndarray, tol: float = 1e-9) -> ConvexSet:
    """Set of images with Fourier phase ``theta``.

    Raises:
        SymmetryError: If ``theta`` is not the phase of a real image
    """
    rotation = np.exp(1j * np.asarray(theta, dtype=float))
    if np.max(np.abs(rotation - np.conj(conjugate_reflection(rotation)))) > tol:
        raise SymmetryError("Phase is not conjugate antisymmetric")
    return ConvexSet(project=lambda x: project_phase(x, theta), label="phase")


# ---------------------------------------------------------------------------
# Proximity operators
# ---------------------------------------------------------------------------

def prox_distance(x: np.ndarray, convex_set: ConvexSet, gamma: float) -> np.ndarray:
    """Prox of ``gamma * d_C``: move toward the projection by at most ``gamma``."""
    _check_gamma(gamma)
    x = np.asarray(x, dtype=float)
    p = convex_set.project(x)
    dist = np.linalg.norm(x - p)
    if dist <= gamma:
        return p
    return x + (gamma / dist) * (p - x)


def prox_l1(x: np.ndarray, gamma: float) -> np.ndarray:
    """Soft threshold at ``gamma``."""
    _check_gamma(gamma)
    return np.sign(x) * np.maximum(np.abs(x) - gamma, 0.0)


def prox_euclidean_norm(x: np.ndarray, gamma: float) -> np.ndarray:
    """Block soft threshold at ``gamma``."""
    _check_gamma(gamma)
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    if norm <= gamma:
        return np.zeros_like(x)
    return (1.0 - gamma / norm) * x


def prox_moreau_envelope(prox_f: ProxMap, x: np.ndarray, gamma: float) -> np.ndarray:
    """Prox of ``gamma * (f □ Q)`` from the scaled proxes of ``f``.

    ``prox_f(v, s)`` must return the prox of ``s * f``. For ``gamma = 1``
    this is ``(x + prox_{2f}(x)) / 2``.
    """
    _check_gamma(gamma)
    x = np.asarray(x, dtype=float)
    return x + (gamma / (1.0 + gamma)) * (prox_f(x, 1.0 + gamma) - x)


def prox_huber_of_norm(x: np.ndarray, center: np.ndarray, rho: float, gamma: float) -> np.ndarray:
    """Prox of ``gamma * h_rho(||. - center||)``; lies on the segment [center, x]."""
    if rho <= 0:
        raise ValueError(f"Huber parameter must be positive, got {rho}")

    def prox_scaled_norm(v, s):
        return center + prox_euclidean_norm(v - center, s * rho)

    return prox_moreau_envelope(prox_scaled_norm, x, gamma)


def prox_huber_of_distance(x: np.ndarray, convex_set: ConvexSet, rho: float, gamma: float) -> np.ndarray:
    """Prox of ``gamma * h_rho(d_C(.))``; lies on the segment [P_C x, x]."""
    if rho <= 0:
        raise ValueError(f"Huber parameter must be positive, got {rho}")

    def prox_scaled_distance(v, s):
        return prox_distance(v, convex_set, s * rho)

    return prox_moreau_envelope(prox_scaled_distance, x, gamma)


def prox_pair_difference(x: np.ndarray, i: int, j: int, gamma: float) -> np.ndarray:
    """Prox of ``gamma * |x_i - x_j|``: keep the pair mean, shrink the difference by 2 gamma."""
    _check_gamma(gamma)
    out = np.array(x, dtype=float, copy=True)
    mean = 0.5 * (out[i] + out[j])
    diff = out[i] - out[j]
    shrunk = np.sign(diff) * max(abs(diff) - 2.0 * gamma, 0.0)
    out[i] = mean + 0.5 * shrunk
    out[j] = mean - 0.5 * shrunk
    return out


def moreau_envelope_value(g: ProxFunction, x: np.ndarray) -> float:
    """Value of the Moreau envelope ``g □ Q`` at ``x``.

    Raises:
        UnsupportedEvaluationError: If ``g`` has no value function
    """
    if not g.has_value:
        raise UnsupportedEvaluationError(f"Moreau envelope of {g.label} needs function values")
    p = g.prox(x, 1.0)
    fit = 0.5 * float(np.sum((x - p) ** 2))
    if g.is_indicator:
        return fit
    return g(p) + fit


# ---------------------------------------------------------------------------
# Function factories
# ---------------------------------------------------------------------------

def zero_function() -> ProxFunction:
    return ProxFunction(
        prox=lambda x, gamma=1.0: np.array(x, dtype=float, copy=True),
        value=lambda x: 0.0,
        gradient=lambda x: np.zeros_like(x, dtype=float),
        lipschitz=0.0,
        label="0"
    )


def half_squared_norm() -> ProxFunction:
    """``Q = ||.||^2 / 2``; its prox is ``x / (1 + gamma)``."""
    return ProxFunction(
        prox=lambda x, gamma=1.0: np.asarray(x, dtype=float) / (1.0 + gamma),
        value=lambda x: 0.5 * float(np.sum(np.square(x))),
        gradient=lambda x: np.array(x, dtype=float, copy=True),
        lipschitz=1.0,
        label="Q"
    )


def indicator(convex_set: ConvexSet) -> ProxFunction:
    """Indicator of ``convex_set``; value is 0 on the set and +inf elsewhere."""
    return ProxFunction(
        prox=lambda x, gamma=1.0: convex_set.project(x),
        value=lambda x: 0.0 if convex_set.contains(x) else np.inf,
        label=f"iota_{convex_set.label}",
        is_indicator=True
    )


def distance_function(convex_set: ConvexSet) -> ProxFunction:
    return ProxFunction(
        prox=lambda x, gamma=1.0: prox_distance(x, convex_set, gamma),
        value=convex_set.distance,
        label=f"d_{convex_set.label}"
    )


def huber_norm(center: np.ndarray, rho: float) -> ProxFunction:
    """``h_rho(||. - center||)``."""
    center = np.asarray(center, dtype=float)
    return ProxFunction(
        prox=lambda x, gamma=1.0: prox_huber_of_norm(x, center, rho, gamma),
        value=lambda x: float(huber(np.linalg.norm(x - center), rho)),
        label=f"h_{rho:g}(||.-z||)"
    )


def huber_distance(convex_set: ConvexSet, rho: float) -> ProxFunction:
    """``h_rho(d_C(.))``."""
    return ProxFunction(
        prox=lambda x, gamma=1.0: prox_huber_of_distance(x, convex_set, rho, gamma),
        value=lambda x: float(huber(convex_set.distance(x), rho)),
        label=f"h_{rho:g}(d_{convex_set.label})"
    )


def l1_norm(weight: float = 1.0) -> ProxFunction:
    """``weight * ||.||_1``; the weight is folded into the threshold."""
    return ProxFunction(
        prox=lambda x, gamma=1.0: prox_l1(x, gamma * weight),
        value=lambda x: weight * float(np.sum(np.abs(x))),
        label=f"{weight:g}*l1"
    )


def euclidean_norm(weight: float = 1.0) -> ProxFunction:
    return ProxFunction(
        prox=lambda x, gamma=1.0: prox_euclidean_norm(x, gamma * weight),
        value=lambda x: weight * float(np.linalg.norm(x)),
        label=f"{weight:g}*l2"
    )


def absolute_difference(i: int, j: int) -> ProxFunction:
    """``x -> |x_i - x_j|`` (edge penalty of a feature graph)."""
    return ProxFunction(
        prox=lambda x, gamma=1.0: prox_pair_difference(x, i, j, gamma),
        value=lambda x: float(abs(x[i] - x[j])),
        label=f"|x{i}-x{j}|"
    )


class _LeastSquaresProx:
    """Exact prox of ``gamma/2 ||A x - z||^2``.

    The resolvent ``(I + gamma A^T A)^{-1}`` is formed once per gamma from a
    Cholesky factor, so each call is a single matrix-vector product.
    """

    def __init__(self, gram: np.ndarray, rhs_shift: np.ndarray):
        self.gram = gram
        self.rhs_shift = rhs_shift
        self._resolvents: Dict[float, np.ndarray] = {}

    def resolvent(self, gamma: float) -> np.ndarray:
        if gamma not in self._resolvents:
            size = self.gram.shape[0]
            logger.debug(f"Factorizing I + {gamma:g} A^T A ({size} unknowns)")
            factor = cho_factor(np.eye(size) + gamma * self.gram, lower=True, check_finite=False)
            self._resolvents[gamma] = cho_solve(factor, np.eye(size), check_finite=False)
        return self._resolvents[gamma]

    def __call__(self, x: np.ndarray, gamma: float = 1.0) -> np.ndarray:
        _check_gamma(gamma)
        return self.resolvent(gamma) @ (x + gamma * self.rhs_shift)


def least_squares(matrix: np.ndarray, target: np.ndarray, lipschitz: Optional[float] = None) -> ProxFunction:
    """``1/2 ||A x - z||^2`` with gradient, Lipschitz constant ``||A||^2`` and exact prox.

    Gradient and prox both work on ``A^T A`` and ``A^T z``, so an iteration
    costs one product with an ``n x n`` matrix whatever the number of rows.
    """
    matrix = np.asarray(matrix, dtype=float)
    target = np.asarray(target, dtype=float)
    if lipschitz is None:
        lipschitz = float(np.linalg.norm(matrix, 2) ** 2)
    gram = matrix.T @ matrix
    rhs_shift = matrix.T @ target

    def value(x):
        residual = matrix @ x - target
        return 0.5 * float(residual @ residual)

    return ProxFunction(
        prox=_LeastSquaresProx(gram, rhs_shift),
        value=value,
        gradient=lambda x: gram @ x - rhs_shift,
        lipschitz=lipschitz,
        label="1/2||A.-z||^2"
    )


# ---------------------------------------------------------------------------
# Numeric oracle
# ---------------------------------------------------------------------------

def numeric_prox_oracle(
    g_value: Callable[[np.ndarray], float],
    x: np.ndarray,
    gamma: float,
    bounds: Optional[Sequence[Sequence[float]]] = None,
    grid_points: int = 17,
    tol: float = 1e-9
) -> np.ndarray:
    """Brute-force prox: grid search with successive zooming.

    Minimizes ``g(z) + ||x - z||^2 / (2 gamma)`` over a box. Each round keeps
    a window of four grid steps on either side of the best point, so with the
    default 17 points per axis the box halves per round until the step drops
    below ``tol``.

    Args:
        g_value: Function value (may return +inf outside its domain)
        x: Point of dimension at most 3
        gamma: Prox scale
        bounds: ``(dim, 2)`` search box; defaults to a box around ``x``
            wide enough for unit-slope penalties and nearby sets
        grid_points: Points per axis per round
        tol: Final grid step

    Raises:
        OracleError: If the dimension exceeds 3, the box is not finite, or
            no finite objective value is found
    """
    _check_gamma(gamma)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    dim = x.size
    if dim > 3:
        raise OracleError(f"Grid oracle supports dimension <= 3, got {dim}")

    if bounds is None:
        half_width = 2.0 * (1.0 + np.max(np.abs(x)) + gamma)
        bounds = np.stack([x - half_width, x + half_width], axis=1)
    bounds = np.asarray(bounds, dtype=float).reshape(dim, 2)
    if not np.all(np.isfinite(bounds)) or np.any(bounds[:, 0] >= bounds[:, 1]):
        raise OracleError(f"Search region must be a finite nonempty box, got {bounds.tolist()}")

    def objective(z):
        return g_value(z.reshape(x.shape)) + float(np.sum((x - z) ** 2)) / (2.0 * gamma)

    lo, hi = bounds[:, 0].copy(), bounds[:, 1].copy()
    while True:
        axes = [np.linspace(lo[i], hi[i], grid_points) for i in range(dim)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
        values = np.array([objective(z) for z in mesh], dtype=float)
        if not np.any(np.isfinite(values)):
            raise OracleError("Objective is infinite everywhere on the search grid")
        best = mesh[int(np.nanargmin(np.where(np.isfinite(values), values, np.nan)))]
        step = (hi - lo) / (grid_points - 1)
        if np.max(step) < tol:
            return best.reshape(x.shape)
        lo, hi = best - 4.0 * step, best + 4.0 * step
