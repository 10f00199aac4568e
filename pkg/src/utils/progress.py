"""Progress tracking for solver loops and validation checks."""

import logging
from typing import Any, Iterable, Iterator, Optional

from tqdm import tqdm


logger = logging.getLogger(__name__)


def _debug_on_console() -> bool:
    for handler in logging.getLogger().handlers:
        if isinstance(handler, logging.FileHandler):
            continue
        if isinstance(handler, logging.StreamHandler) and handler.level <= logging.DEBUG:
            return True
    return False


class ProgressTracker:
    """Wrapper around tqdm that can be switched off per call."""

    def __init__(
        self,
        items: Iterable[Any],
        total: Optional[int] = None,
        description: str = "Processing",
        unit: str = "it",
        disable: bool = False
    ):
        """Initialize progress tracker.

        Args:
            items: Iterable to track
            total: Total number of items
            description: Progress bar description
            unit: Unit name for items
            disable: Disable progress tracking
        """
        self.items = items
        self.total = total
        self.description = description
        self.unit = unit
        # Bars would interleave with DEBUG records
        self.disable = disable or _debug_on_console()
        self._progress_bar: Optional[tqdm] = None

    def __iter__(self) -> Iterator[Any]:
        """Iterate with progress tracking."""
        if self.disable:
            yield from self.items
            return

        with tqdm(
            self.items,
            total=self.total,
            desc=self.description,
            unit=self.unit,
            leave=False
        ) as pbar:
            self._progress_bar = pbar
            for item in pbar:
                yield item
        self._progress_bar = None

    def set_postfix(self, **values: Any) -> None:
        """Show extra values (e.g. the current residual) next to the bar."""
        if self._progress_bar is not None:
            self._progress_bar.set_postfix(values, refresh=False)
