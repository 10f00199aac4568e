"""Linear operators, their adjoints and norm bounds, and the unitary 2-D DFT."""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from ..exceptions import DimensionMismatchError, OperatorConstructionError, SymmetryError
from ..models import LinearMap, Spectrum2D
from ..models.linear_map import conjugate_reflection

logger = logging.getLogger(__name__)

# Finite differences along two periodic directions have norm at most sqrt(8).
FINITE_DIFFERENCE_NORM = np.sqrt(8.0)


def _check_shape(x: np.ndarray, expected: Tuple[int, ...], what: str) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != tuple(expected):
        raise DimensionMismatchError(
            f"{what}: expected array of shape {tuple(expected)}, got {x.shape}",
            expected=tuple(expected),
            received=x.shape
        )
    return x


def apply(op: LinearMap, x: np.ndarray) -> np.ndarray:
    """Apply ``op`` to ``x`` after checking dimensions."""
    x = _check_shape(x, op.in_shape, f"apply({op.label})")
    return op.forward(x)


def adjoint_apply(op: LinearMap, y: np.ndarray) -> np.ndarray:
    """Apply the adjoint of ``op`` to ``y`` after checking dimensions."""
    y = _check_shape(y, op.out_shape, f"adjoint_apply({op.label})")
    return op.adjoint(y)


def operator_norm_estimate(
    op: LinearMap,
    tol: float = 1e-6,
    max_iters: int = 1000,
    seed: int = 0
) -> float:
    """Estimate the largest singular value of ``op`` by power iteration on op* op.

    Args:
        op: Operator to measure
        tol: Relative change at which the iteration stops
        max_iters: Iteration cap
        seed: Seed of the random start vector

    Returns:
        Estimate of the operator norm (0.0 for the zero operator)
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(op.in_shape)
    x /= np.linalg.norm(x)
    value = 0.0

    for iteration in range(max_iters):
        y = op.adjoint(op.forward(x))
        new_value = float(np.linalg.norm(y))
        if new_value == 0.0:
            logger.debug(f"Power iteration on {op.label}: zero operator")
            return 0.0
        x = y / new_value
        if iteration > 0 and abs(new_value - value) <= tol * new_value:
            value = new_value
            break
        value = new_value

    estimate = float(np.sqrt(value))
    logger.debug(f"Power iteration on {op.label}: norm ~ {estimate:.8f} after {iteration + 1} iterations")
    return estimate


def check_adjoint(
    op: LinearMap,
    trials: int = 50,
    rng: Optional[np.random.Generator] = None
) -> float:
    """Largest adjoint-identity defect over random vector pairs.

    The defect is ``|<Lx, y> - <x, L*y>| / (||x|| ||y|| + 1)``.
    """
    rng = rng or np.random.default_rng(0)
    worst = 0.0
    for _ in range(trials):
        x = rng.standard_normal(op.in_shape)
        y = rng.standard_normal(op.out_shape)
        lhs = np.vdot(op.forward(x), y)
        rhs = np.vdot(x, op.adjoint(y))
        defect = abs(lhs - rhs) / (np.linalg.norm(x) * np.linalg.norm(y) + 1.0)
        worst = max(worst, float(defect))
    return worst


def make_identity(shape: Sequence[int]) -> LinearMap:
    """Identity operator on arrays of ``shape``."""
    shape = tuple(int(s) for s in np.atleast_1d(shape))
    return LinearMap(
        forward=lambda x: np.array(x, dtype=float, copy=True),
        adjoint=lambda y: np.array(y, dtype=float, copy=True),
        in_shape=shape,
        out_shape=shape,
        norm_bound=1.0,
        label="Id"
    )


def make_matrix_map(matrix: np.ndarray, norm_bound: Optional[float] = None, label: str = "A") -> LinearMap:
    """Dense matrix operator ``x -> A x`` on vectors."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise OperatorConstructionError(f"Matrix operator needs a 2-D array, got ndim={matrix.ndim}")
    rows, cols = matrix.shape
    return LinearMap(
        forward=lambda x: matrix @ x,
        adjoint=lambda y: matrix.T @ y,
        in_shape=(cols,),
        out_shape=(rows,),
        norm_bound=norm_bound,
        label=label
    )


def make_convolution(kernel_rows: int, kernel_cols: int, image_dims: Sequence[int]) -> LinearMap:
    """Periodic convolution with a constant kernel normalized to sum one.

    The kernel is centered on the output pixel, so a one-hot image maps to a
    ``kernel_rows x kernel_cols`` patch around the hot pixel.
    """
    rows, cols = (int(d) for d in image_dims)
    if kernel_rows <= 0 or kernel_cols <= 0:
        raise OperatorConstructionError(f"Kernel dims must be positive, got {kernel_rows}x{kernel_cols}")
    if kernel_rows > rows or kernel_cols > cols:
        raise OperatorConstructionError(
            f"Kernel {kernel_rows}x{kernel_cols} larger than image {rows}x{cols}"
        )

    kernel = np.zeros((rows, cols))
    kernel[:kernel_rows, :kernel_cols] = 1.0 / (kernel_rows * kernel_cols)
    kernel = np.roll(kernel, (-(kernel_rows // 2), -(kernel_cols // 2)), axis=(0, 1))
    transfer = np.fft.rfft2(kernel)
    transfer_adj = np.conj(transfer)
    shape = (rows, cols)

    def forward(x: np.ndarray) -> np.ndarray:
        return np.fft.irfft2(np.fft.rfft2(x) * transfer, s=shape)

    def adjoint(y: np.ndarray) -> np.ndarray:
        return np.fft.irfft2(np.fft.rfft2(y) * transfer_adj, s=shape)

    return LinearMap(
        forward=forward,
        adjoint=adjoint,
        in_shape=shape,
        out_shape=shape,
        norm_bound=1.0,
        label=f"blur{kernel_rows}x{kernel_cols}"
    )


def make_finite_difference(image_dims: Sequence[int], normalized: bool = True) -> LinearMap:
    """Horizontal and vertical periodic forward differences stacked as ``(2, rows, cols)``.

    With ``normalized`` the map is ``D / sqrt(8)`` and has norm bound 1.
    """
    rows, cols = (int(d) for d in image_dims)
    if rows < 2 or cols < 2:
        raise OperatorConstructionError(f"Finite differences need at least 2x2 images, got {rows}x{cols}")

    scale = 1.0 / FINITE_DIFFERENCE_NORM if normalized else 1.0

    def forward(x: np.ndarray) -> np.ndarray:
        return scale * np.stack([
            np.roll(x, -1, axis=1) - x,
            np.roll(x, -1, axis=0) - x
        ])

    def adjoint(y: np.ndarray) -> np.ndarray:
        return scale * (
            np.roll(y[0], 1, axis=1) - y[0]
            + np.roll(y[1], 1, axis=0) - y[1]
        )

    return LinearMap(
        forward=forward,
        adjoint=adjoint,
        in_shape=(rows, cols),
        out_shape=(2, rows, cols),
        norm_bound=scale * FINITE_DIFFERENCE_NORM,
        label="D/sqrt8" if normalized else "D"
    )


def make_coordinate_selector(start: int, length: int, ambient_dim: int) -> LinearMap:
    """Extract the contiguous block ``start .. start+length-1`` (1-based)."""
    if length <= 0 or start < 1 or start + length - 1 > ambient_dim:
        raise OperatorConstructionError(
            f"Block starting at {start} with length {length} does not fit in dimension {ambient_dim}"
        )
    first = start - 1
    block = slice(first, first + length)

    def forward(x: np.ndarray) -> np.ndarray:
        return np.array(x[block], dtype=float, copy=True)

    def adjoint(y: np.ndarray) -> np.ndarray:
        out = np.zeros(ambient_dim)
        out[block] = y
        return out

    return LinearMap(
        forward=forward,
        adjoint=adjoint,
        in_shape=(ambient_dim,),
        out_shape=(length,),
        norm_bound=1.0,
        label=f"select[{start}:{start + length - 1}]"
    )


def dft2(image: np.ndarray, dims: Optional[Sequence[int]] = None) -> Spectrum2D:
    """Unitary 2-D DFT of a real image."""
    image = np.asarray(image, dtype=float)
    if dims is not None:
        _check_shape(image, tuple(dims), "dft2")
    if image.ndim != 2:
        raise DimensionMismatchError(f"dft2 expects a 2-D image, got ndim={image.ndim}")
    return Spectrum2D(np.fft.fft2(image, norm="ortho"))


def idft2(spec: Spectrum2D, tol: float = 1e-9) -> np.ndarray:
    """Inverse unitary 2-D DFT returning a real image.

    Raises:
        SymmetryError: If the spectrum is not conjugate symmetric, i.e. the
            inverse has an imaginary part above ``tol`` (relative)
    """
    values = np.fft.ifft2(spec.coefficients, norm="ortho")
    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    scale = max(1.0, float(np.max(np.abs(values.real))) if values.size else 1.0)
    if residue > tol * scale:
        raise SymmetryError(
            f"Spectrum is not conjugate symmetric: imaginary residue {residue:.3e}"
        )
    return np.ascontiguousarray(values.real)


def symmetric_closure(mask: np.ndarray) -> np.ndarray:
    """Smallest superset of ``mask`` closed under ``k -> -k mod dims``."""
    mask = np.asarray(mask, dtype=bool)
    return mask | conjugate_reflection(mask)
