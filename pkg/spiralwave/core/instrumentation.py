import functools
import time
from contextlib import contextmanager

from prometheus_client import write_to_textfile

from .metrics import REGISTRY, SOLVER_FAILURES


@contextmanager
def track_latency(metric, **labels):
    """
    Context manager to track operation latency using Prometheus histograms.

    Example:
        with track_latency(SOLVER_LATENCY, operation='eigenvalue'):
            # Your operation here
    """
    start_time = time.perf_counter()
    try:
        yield
    finally:
        metric.labels(**labels).observe(time.perf_counter() - start_time)


def instrument(metric, **labels):
    """
    Decorator to instrument a function with latency and failure metrics.

    Failures are counted by exception class name under the same operation label.

    Example:
        @instrument(SOLVER_LATENCY, operation='solve_perturbed')
        def solve_perturbed(base, eta, b):
            ...
    """
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            with track_latency(metric, **labels):
                try:
                    return func(*args, **kwargs)
                except Exception as exc:
                    SOLVER_FAILURES.labels(
                        operation=labels.get('operation', func.__name__),
                        reason=type(exc).__name__,
                    ).inc()
                    raise
        return wrapper
    return decorator


def export_metrics(path) -> None:
    """Write the toolkit registry in text exposition format."""
    write_to_textfile(str(path), REGISTRY)
