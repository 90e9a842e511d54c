"""
Wall time and resident memory of a verification check.

Memory figures need the optional `psutil` extra (`uv sync --extra monitor`); without it
they are reported as N/A.
"""

import time
from contextlib import contextmanager
from dataclasses import dataclass

try:
    import psutil
except ImportError:
    psutil = None

BYTES_PER_MB = 1024 * 1024


@dataclass
class CheckMetrics:
    check_name: str
    execution_time_s: float = 0.0
    peak_rss_mb: float | None = None

    def memory_label(self) -> str:
        return "N/A" if self.peak_rss_mb is None else f"{self.peak_rss_mb:.1f}MB"


def _rss_mb() -> float | None:
    if psutil is None:
        return None
    return psutil.Process().memory_info().rss / BYTES_PER_MB


@contextmanager
def monitor_check(check_name: str):
    """
    Yield a CheckMetrics that is filled in when the block exits, including on error.

    Usage:
        with monitor_check("identity") as metrics:
            check_identity(cfg)
        print(format_time(metrics.execution_time_s))
    """
    metrics = CheckMetrics(check_name, peak_rss_mb=_rss_mb())
    start = time.perf_counter()
    try:
        yield metrics
    finally:
        metrics.execution_time_s = time.perf_counter() - start
        end_rss = _rss_mb()
        if end_rss is not None:
            metrics.peak_rss_mb = max(metrics.peak_rss_mb or 0.0, end_rss)


def format_time(seconds: float) -> str:
    """Milliseconds below one second, seconds above."""
    if seconds < 1:
        return f"{seconds * 1000:.1f}ms"
    return f"{seconds:.3f}s"
