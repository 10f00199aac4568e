"""Builders for the three recovery experiments and image-quality metrics."""

import logging
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy.linalg import svdvals

from ..exceptions import ExperimentError
from ..models import ComixtureTerm, ExperimentInstance
from ..utils.logger import OperationLogger
from .comixture import term_norm_bound, validate
from .image_io import resize_image
from .linops import (
    FINITE_DIFFERENCE_NORM,
    apply,
    conjugate_reflection,
    dft2,
    make_convolution,
    make_coordinate_selector,
    make_finite_difference,
    make_identity,
    make_matrix_map,
    symmetric_closure,
)
from .prox import (
    ball_set,
    box_set,
    distance_function,
    euclidean_norm,
    fourier_constraint,
    fourier_data_set,
    huber_distance,
    huber_norm,
    hyperplane_set,
    indicator,
    l1_norm,
    least_squares,
    phase_set,
)

logger = logging.getLogger(__name__)

PIXEL_RANGE = (0.0, 255.0)

# Deblurring setup (reference scale 256 x 256)
EXP1_REFERENCE_SIDE = 256
EXP1_KERNELS = ((3, 11), (7, 5))
EXP1_BSNR_DB = (30.1, 34.6)
EXP1_RHO = 300.0
EXP1_WEIGHTS = (3 / 8, 3 / 8, 1 / 8, 1 / 8)

# Phase recovery setup (reference scale 512 x 512)
EXP2_REFERENCE_SIDE = 512
EXP2_RHOS = (3000.0, 3000.0, 3000.0, 5000.0)
EXP2_BLUR = (5, 5)
EXP2_BSNR_DB = 30.0
EXP2_SATURATION = 130.0
EXP2_GRADIENT_SLACK = 1.05
EXP2_PROXIMITY_SLACK = 0.95

# Overlapping group lasso layout
GROUP_SIZE = 50
GROUP_STRIDE = 45


def check_side(side: int) -> int:
    """Image sides must be powers of two, at least 32."""
    if not isinstance(side, (int, np.integer)) or side < 32 or side & (side - 1):
        raise ExperimentError(f"Image side must be a power of two >= 32, got {side}")
    return int(side)


def synthetic_phantom(side: int) -> np.ndarray:
    """Deterministic piecewise-constant test image with values in [0, 255]."""
    u = (np.arange(side) + 0.5) / side * 2.0 - 1.0
    rows, cols = np.meshgrid(u, u, indexing="ij")
    image = np.full((side, side), 16.0)

    def ellipse(r0, c0, a, b):
        return ((rows - r0) / a) ** 2 + ((cols - c0) / b) ** 2 <= 1.0

    image[ellipse(0.0, 0.0, 0.85, 0.7)] = 180.0
    image[ellipse(0.05, 0.0, 0.75, 0.6)] = 110.0
    image[ellipse(-0.25, -0.25, 0.15, 0.2)] = 230.0
    image[ellipse(-0.25, 0.25, 0.15, 0.2)] = 230.0
    image[ellipse(0.35, 0.0, 0.1, 0.3)] = 60.0
    image[(np.abs(rows - 0.05) < 0.08) & (np.abs(cols) < 0.05)] = 255.0
    image[(rows > 0.55) & (rows < 0.65) & (np.abs(cols + 0.4) < 0.15)] = 200.0
    return image


def snr_db(reference: np.ndarray, x: np.ndarray) -> float:
    """``20 log10(||reference|| / ||reference - x||)``."""
    error = float(np.linalg.norm(np.asarray(reference) - np.asarray(x)))
    if error == 0.0:
        return float('inf')
    return 20.0 * np.log10(float(np.linalg.norm(reference)) / error)


def blurred_snr_db(clean_blurred: np.ndarray, noise: np.ndarray) -> float:
    """Blurred-image-to-noise ratio ``10 log10(var(Lx) / var(w))``."""
    return 10.0 * np.log10(float(np.var(clean_blurred)) / float(np.var(noise)))


def _noise_for_bsnr(blurred: np.ndarray, bsnr_db: float, rng: np.random.Generator) -> np.ndarray:
    sigma = np.sqrt(np.var(blurred) / 10.0 ** (bsnr_db / 10.0))
    return sigma * rng.standard_normal(blurred.shape)


def _ground_truth(side: int, image: Optional[np.ndarray]) -> np.ndarray:
    if image is None:
        return synthetic_phantom(side)
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise ExperimentError(f"Ground truth must be a grayscale image, got ndim={image.ndim}")
    return resize_image(image, side)


def _image_scale(side: int, reference_side: int) -> float:
    return side ** 2 / reference_side ** 2


def real_spectrum_phase(image: np.ndarray) -> np.ndarray:
    """Fourier phase of a real image, symmetrized so that ``theta(-k) = -theta(k)`` holds exactly."""
    coefficients = dft2(image).coefficients
    symmetric = 0.5 * (coefficients + np.conj(conjugate_reflection(coefficients)))
    return np.angle(symmetric)


def build_exp1(
    side: int,
    seed: int,
    image: Optional[np.ndarray] = None,
    power_iteration: Optional[dict] = None
) -> ExperimentInstance:
    """Deblurring from two blurred observations and a partially known spectrum.

    Terms: Huber fits to both observations, distance to the set of images
    sharing the low-frequency DFT coefficients of the ground truth, and a
    total-variation-like l1 penalty on finite differences; ``f`` is the
    indicator of [0, 255]^N.
    """
    side = check_side(side)
    with OperationLogger(logger, "build exp1", side=side, seed=seed):
        rng = np.random.default_rng(seed)
        truth = _ground_truth(side, image)
        shape = (side, side)

        blurs = [make_convolution(min(kr, side), min(kc, side), shape) for kr, kc in EXP1_KERNELS]
        observations: Dict[str, np.ndarray] = {}
        for index, (blur, bsnr) in enumerate(zip(blurs, EXP1_BSNR_DB), start=1):
            blurred = apply(blur, truth)
            noise = _noise_for_bsnr(blurred, bsnr, rng)
            observations[f"w{index}"] = noise
            observations[f"z{index}"] = blurred + noise

        low = side // 16
        mask = np.zeros(shape, dtype=bool)
        mask[:low, :low] = True
        mask = symmetric_closure(mask)
        frozen = fourier_constraint(mask, dft2(truth))
        observations["frozen_mask"] = mask

        rho = EXP1_RHO * _image_scale(side, EXP1_REFERENCE_SIDE)
        fields = make_finite_difference(shape)
        terms = [
            ComixtureTerm(EXP1_WEIGHTS[0], blurs[0], huber_norm(observations["z1"], rho)),
            ComixtureTerm(EXP1_WEIGHTS[1], blurs[1], huber_norm(observations["z2"], rho)),
            ComixtureTerm(EXP1_WEIGHTS[2], make_identity(shape), distance_function(fourier_data_set(frozen))),
            ComixtureTerm(EXP1_WEIGHTS[3], fields, l1_norm(FINITE_DIFFERENCE_NORM)),
        ]
        comixture = validate(terms, ambient_shape=shape, power_iteration=power_iteration)

    return ExperimentInstance(
        name="exp1",
        f=indicator(box_set(*PIXEL_RANGE)),
        terms=comixture.terms,
        ground_truth=truth,
        observations=observations,
        seed=seed,
        scale={'side': side},
        parameters={
            'rho': rho,
            'bsnr_db': EXP1_BSNR_DB,
            'kernels': tuple(blur.label for blur in blurs),
            'frozen_count': frozen.count,
        }
    )


def _degraded_reference(truth: np.ndarray, rng: np.random.Generator) -> Dict[str, Any]:
    """Blurred, noisy, saturated copy of ``truth`` with a corrupted rectangle."""
    side = truth.shape[0]
    blur = make_convolution(*EXP2_BLUR, truth.shape)
    blurred = apply(blur, truth)
    z = np.minimum(blurred + _noise_for_bsnr(blurred, EXP2_BSNR_DB, rng), EXP2_SATURATION)

    r0, r1 = int(0.3 * side), int(0.42 * side)
    c0, c1 = int(0.58 * side), int(0.78 * side)
    z[r0:r1, c0:c1] += rng.uniform(0.0, 255.0, size=(r1 - r0, c1 - c0))
    return {'z': z, 'rectangle': (r0, r1, c0, c1)}


def build_exp2(
    side: int,
    seed: int,
    image: Optional[np.ndarray] = None,
    power_iteration: Optional[dict] = None
) -> ExperimentInstance:
    """Phase recovery posed as a relaxed (inconsistent) feasibility problem.

    Constraint data is derived from the ground truth with deliberately inexact
    bounds: the gradient-energy bound is inflated by 5% and the proximity
    radius to the degraded reference shrunk by 5%.
    """
    side = check_side(side)
    with OperationLogger(logger, "build exp2", side=side, seed=seed):
        rng = np.random.default_rng(seed)
        truth = _ground_truth(side, image)
        shape = (side, side)
        fields = make_finite_difference(shape)

        theta = real_spectrum_phase(truth)
        eta = float(truth.sum())
        gradient_bound = EXP2_GRADIENT_SLACK * float(np.linalg.norm(apply(fields, truth)))
        degraded = _degraded_reference(truth, rng)
        z = degraded['z']
        proximity_bound = EXP2_PROXIMITY_SLACK * float(np.linalg.norm(truth - z))

        sets = [
            phase_set(theta),
            hyperplane_set(eta),
            ball_set(np.zeros(fields.out_shape), gradient_bound),
            ball_set(z, proximity_bound),
        ]
        rhos = tuple(rho * _image_scale(side, EXP2_REFERENCE_SIDE) for rho in EXP2_RHOS)
        identity = make_identity(shape)
        ops = [identity, identity, fields, identity]
        terms = [
            ComixtureTerm(0.25, op, huber_distance(s, rho))
            for op, s, rho in zip(ops, sets, rhos)
        ]
        comixture = validate(terms, ambient_shape=shape, power_iteration=power_iteration)

    return ExperimentInstance(
        name="exp2",
        f=indicator(box_set(*PIXEL_RANGE)),
        terms=comixture.terms,
        ground_truth=truth,
        observations={'z': z, 'theta': theta},
        seed=seed,
        scale={'side': side},
        parameters={
            'eta': eta,
            'gradient_bound': gradient_bound,
            'proximity_bound': proximity_bound,
            'rhos': rhos,
            'saturation': EXP2_SATURATION,
            'rectangle': degraded['rectangle'],
        }
    )


def group_signal(n: int) -> np.ndarray:
    """``x_j = (-1)^j exp(-(j - 1) / 50)`` for ``j = 1..n``."""
    j = np.arange(1, n + 1)
    return np.where(j % 2 == 0, 1.0, -1.0) * np.exp(-(j - 1) / 50.0)


def build_exp3(n: int, m: int, p: int, seed: int, power_iteration: Optional[dict] = None) -> ExperimentInstance:
    """Overlapping group lasso with groups of 50 coordinates every 45.

    ``A`` has i.i.d. standard normal entries rescaled to spectral norm just
    below 1; the noise is standard normal.
    """
    expected = GROUP_STRIDE * (p - 1) + GROUP_SIZE if p >= 1 else None
    if m <= 0 or p <= 0 or n != expected:
        raise ExperimentError(
            f"Group layout needs n = {GROUP_STRIDE}(p-1)+{GROUP_SIZE} with positive m, p; got n={n}, m={m}, p={p}"
        )

    with OperationLogger(logger, "build exp3", n=n, m=m, p=p, seed=seed):
        rng = np.random.default_rng(seed)
        truth = group_signal(n)
        matrix = rng.standard_normal((m, n))
        shrink = 1.0 + 1e-12
        matrix /= float(svdvals(matrix, check_finite=False)[0]) * shrink
        noise = rng.standard_normal(m)
        z = matrix @ truth + noise
        lipschitz = shrink ** -2

        terms = [
            ComixtureTerm(
                1.0 / p,
                make_coordinate_selector(GROUP_STRIDE * k + 1, GROUP_SIZE, n),
                euclidean_norm()
            )
            for k in range(p)
        ]
        comixture = validate(terms, ambient_shape=(n,), power_iteration=power_iteration)

    return ExperimentInstance(
        name="exp3",
        f=least_squares(matrix, z, lipschitz=lipschitz),
        terms=comixture.terms,
        ground_truth=truth,
        observations={'z': z, 'w': noise},
        seed=seed,
        scale={'n': n, 'm': m, 'p': p},
        parameters={'A': make_matrix_map(matrix, norm_bound=1.0), 'lipschitz': lipschitz}
    )


EXPERIMENT_BUILDERS: Dict[str, Callable[..., ExperimentInstance]] = {
    'exp1': build_exp1,
    'exp2': build_exp2,
    'exp3': build_exp3,
}


def build_instance(
    name: str,
    seed: int = 0,
    image: Optional[np.ndarray] = None,
    power_iteration: Optional[dict] = None,
    **scale
) -> ExperimentInstance:
    """Build an experiment by name from its scale parameters (``side`` or ``n, m, p``).

    ``power_iteration`` holds the ``operator_norm_estimate`` settings used for
    operators that declare no norm bound.
    """
    if name not in EXPERIMENT_BUILDERS:
        raise ExperimentError(f"Unknown experiment: {name}")
    if name == 'exp3':
        if image is not None:
            raise ExperimentError("exp3 does not take a ground-truth image")
        return build_exp3(scale['n'], scale['m'], scale['p'], seed, power_iteration=power_iteration)
    return EXPERIMENT_BUILDERS[name](scale['side'], seed, image=image, power_iteration=power_iteration)


def describe_instance(inst: ExperimentInstance, power_iteration: Optional[dict] = None) -> Dict[str, Any]:
    """Summary of scale, weights, operators and observation statistics."""
    description: Dict[str, Any] = {
        'name': inst.name,
        'seed': inst.seed,
        'shape': inst.shape,
        'p': inst.p,
        'f': inst.f.label,
    }
    description.update(inst.scale)

    description['terms'] = [
        {
            'k': k,
            'weight': term.weight,
            'operator': term.op.label,
            'norm_bound': term_norm_bound(term.op, **(power_iteration or {})),
            'function': term.fn.label,
        }
        for k, term in enumerate(inst.terms, start=1)
    ]
    description['observations'] = {
        name: {
            'shape': values.shape,
            'mean': float(np.mean(values)),
            'std': float(np.std(values)),
            'min': float(np.min(values)),
            'max': float(np.max(values)),
        }
        for name, values in inst.observations.items()
    }
    description['parameters'] = {
        name: value for name, value in inst.parameters.items()
        if isinstance(value, (int, float, str, tuple))
    }
    return description
