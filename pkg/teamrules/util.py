import hashlib
import logging
import time
from functools import wraps
from typing import Callable

logger = logging.getLogger(__name__)


def render_text_hash(text: str, digits: int = 12) -> str:
    """Leading ``digits`` hex characters of the SHA-256 of ``text``."""
    return hashlib.sha256(text.encode()).hexdigest()[:digits]


def derive_seed(seed: int, *salt: str | int) -> int:
    """Derive an independent 32-bit seed from a base seed and labels.

    Used so that data generation, splitting, human simulation and the search
    of one scenario draw from unrelated streams.
    """
    text = ":".join(str(s) for s in (seed, *salt))
    return int(render_text_hash(text, digits=8), 16)


def wrap_with(func: Callable, stage_name: str) -> Callable:
    """Wrap a pipeline stage with start/finish logging.

    Args:
        func: The stage function.
        stage_name: Name used in log lines.

    Returns:
        Callable: The wrapped function.
    """

    @wraps(func)
    def wrapper(*args, **kwargs):
        logger.info(f"Starting to execute {stage_name}")
        start = time.perf_counter()
        result = func(*args, **kwargs)
        logger.debug(
            f"Finished {stage_name} in {1e3 * (time.perf_counter() - start):.1f} ms"
        )
        return result

    return wrapper


try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        """Backport of ``enum.StrEnum`` for Python < 3.11."""

        def __str__(self) -> str:
            return str(self.value)

        def __format__(self, format_spec: str) -> str:
            return str.__format__(str(self.value), format_spec)

        @staticmethod
        def _generate_next_value_(name, start, count, last_values):
            return name.lower()
