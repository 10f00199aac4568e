"""Binary PGM (P5) reading and writing for 8-bit grayscale images."""

import logging
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from scipy import ndimage

from ..exceptions import ImageFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _header_tokens(data: bytes, count: int) -> Tuple[List[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments."""
    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ImageFormatError("Truncated PGM header")
        if data[pos:pos + 1] == b'#':
            end = data.find(b'\n', pos)
            pos = len(data) if end < 0 else end + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def read_pgm(path: PathLike) -> np.ndarray:
    """Read an 8-bit binary PGM as a float array of shape ``(rows, cols)``.

    Raises:
        ImageFormatError: If the file is not an 8-bit P5 image
    """
    path = Path(path)
    data = path.read_bytes()
    tokens, offset = _header_tokens(data, 4)

    if tokens[0] != b'P5':
        raise ImageFormatError(f"{path.name}: not a binary PGM (magic {tokens[0]!r})")
    try:
        cols, rows, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ImageFormatError(f"{path.name}: malformed PGM header")
    if cols <= 0 or rows <= 0:
        raise ImageFormatError(f"{path.name}: invalid dimensions {cols}x{rows}")
    if not 0 < maxval < 256:
        raise ImageFormatError(f"{path.name}: only 8-bit PGM supported (maxval {maxval})")

    raster = data[offset:offset + rows * cols]
    if len(raster) != rows * cols:
        raise ImageFormatError(
            f"{path.name}: expected {rows * cols} pixels, found {len(raster)}"
        )

    image = np.frombuffer(raster, dtype=np.uint8).reshape(rows, cols).astype(float)
    if maxval != 255:
        image *= 255.0 / maxval
    logger.debug(f"Read {path} ({rows}x{cols}, maxval {maxval})")
    return image


def write_pgm(path: PathLike, image: np.ndarray) -> Path:
    """Write ``image`` as an 8-bit binary PGM; values are clamped to [0, 255] and rounded."""
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise ImageFormatError(f"PGM images are 2-D, got ndim={image.ndim}")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pixels = np.rint(np.clip(image, 0.0, 255.0)).astype(np.uint8)
    rows, cols = pixels.shape
    with open(path, 'wb') as f:
        f.write(f"P5\n{cols} {rows}\n255\n".encode('ascii'))
        f.write(pixels.tobytes())

    logger.debug(f"Wrote {path} ({rows}x{cols})")
    return path


def resize_image(image: np.ndarray, side: int) -> np.ndarray:
    """Resample a grayscale image to ``side x side`` (linear interpolation), kept in [0, 255]."""
    image = np.asarray(image, dtype=float)
    if image.shape == (side, side):
        return image.copy()
    rows, cols = image.shape
    resized = ndimage.zoom(image, (side / rows, side / cols), order=1, grid_mode=True, mode='nearest')
    # zoom rounds the output size; enforce the requested one
    resized = resized[:side, :side]
    if resized.shape != (side, side):
        resized = np.pad(resized, ((0, side - resized.shape[0]), (0, side - resized.shape[1])), mode='edge')
    return np.clip(resized, 0.0, 255.0)
