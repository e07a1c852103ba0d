import functools
import logging
import time
from typing import Callable

logger = logging.getLogger("aimkit.benchmark")


def benchmark(func: Callable) -> Callable:
    """Decorator to log how long a call took, at DEBUG level."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        execution_time = time.perf_counter() - start_time
        logger.debug("%s took %.6f seconds", func.__qualname__, execution_time)
        return result

    return wrapper
