"""Input validation utilities for command-line runs."""

import os
from pathlib import Path
from typing import Optional, Union


class ValidationError(ValueError):
    """Custom validation error."""
    pass


class RunConfigValidator:
    """Validator for experiment run parameters."""

    EXPERIMENTS = ('exp1', 'exp2', 'exp3')
    MIN_SIDE = 32
    GROUP_SIZE = 50
    GROUP_STRIDE = 45

    @classmethod
    def validate_experiment(cls, name: Optional[str]) -> str:
        """Validate experiment name."""
        if not name:
            raise ValidationError(f"No experiment given. Choose one of: {', '.join(cls.EXPERIMENTS)}")

        name = name.strip().lower()
        if name not in cls.EXPERIMENTS:
            raise ValidationError(
                f"Unknown experiment '{name}'. Choose one of: {', '.join(cls.EXPERIMENTS)}"
            )
        return name

    @classmethod
    def validate_side(cls, side: int) -> int:
        """Validate image side: a power of two, at least 32."""
        if not isinstance(side, int) or isinstance(side, bool):
            raise ValidationError(f"Image side must be an integer, got {type(side).__name__}")

        if side < cls.MIN_SIDE:
            raise ValidationError(f"Image side {side} too small. Minimum: {cls.MIN_SIDE}")

        if side & (side - 1):
            raise ValidationError(f"Image side {side} is not a power of two")

        return side

    @classmethod
    def validate_group_geometry(cls, n: int, m: int, p: int) -> None:
        """Validate the overlapping-group layout ``45 (p - 1) + 50 = n``."""
        for label, value in (('n', n), ('m', m), ('p', p)):
            if not isinstance(value, int) or value <= 0:
                raise ValidationError(f"{label} must be a positive integer, got {value}")

        expected = cls.GROUP_STRIDE * (p - 1) + cls.GROUP_SIZE
        if n != expected:
            raise ValidationError(
                f"Group layout needs n = {cls.GROUP_STRIDE}(p-1)+{cls.GROUP_SIZE} = {expected} for p={p}, got n={n}"
            )

    @classmethod
    def validate_positive(cls, value: int, label: str) -> int:
        """Validate a positive integer flag (iters, record-every)."""
        if not isinstance(value, int) or value <= 0:
            raise ValidationError(f"{label} must be a positive integer, got {value}")
        return value

    @classmethod
    def validate_seed(cls, seed: int) -> int:
        if not isinstance(seed, int) or seed < 0:
            raise ValidationError(f"Seed must be a non-negative integer, got {seed}")
        return seed

    @classmethod
    def validate_output_dir(cls, path: Union[str, Path]) -> Path:
        """Create the output directory if needed and check it is writable."""
        output_dir = Path(path)
        if output_dir.exists() and not output_dir.is_dir():
            raise ValidationError(f"Output path is not a directory: {output_dir}")

        try:
            output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ValidationError(f"Cannot create output directory {output_dir}: {e}")

        if not os.access(output_dir, os.W_OK):
            raise ValidationError(f"Output directory is not writable: {output_dir}")

        return output_dir

    @classmethod
    def validate_image_path(cls, path: Optional[Union[str, Path]]) -> Optional[Path]:
        """Validate an optional ground-truth PGM path."""
        if path is None:
            return None

        image_path = Path(path)
        if not image_path.is_file():
            raise ValidationError(f"Image file not found: {image_path}")

        if image_path.suffix.lower() != '.pgm':
            raise ValidationError(f"Ground truth must be a .pgm file, got {image_path.name}")

        return image_path
