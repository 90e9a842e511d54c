"""
Monte Carlo checks of the centralized q-density.

Every sample has its own Philox stream keyed by (seed, n) with the sample index in
the high counter word, so a sample's value depends only on (seed, n, index). Work is
split into index ranges that may run in a process pool; ranges are reassembled and
reduced in range order, so results do not depend on the number of workers.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import stats

from .errors import DegenerateFitError, DomainError, InsufficientSamplesError
from .numerics import stable_sum
from .q_algebra import ScalingLaw, centralized_q_density, fluctuation_term, scaling_q
from .source_model import SourcePmf, block_moments, info_moments

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
RANGE_SIZE = 8192
MIN_SLOPE_SAMPLES = 10**4


@dataclass(frozen=True)
class McConfig:
    samples: int
    seed: int
    n_grid: tuple[int, ...] = field(default=(16, 64, 256, 1024, 4096))
    max_k: int = 3
    alpha: float = 0.0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        if self.samples < 1:
            raise DomainError(f"samples must be positive, got {self.samples}")
        if not (0 <= self.seed <= MASK64):
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not (2 <= self.max_k <= 6):
            raise DomainError(f"max_k must be in [2, 6], got {self.max_k}")
        if any(n < 1 for n in self.n_grid):
            raise DomainError(f"n_grid must hold positive blocklengths, got {self.n_grid}")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:], strict=False)):
            raise DomainError(f"n_grid must be strictly increasing, got {self.n_grid}")
        if self.workers < 1:
            raise DomainError(f"workers must be positive, got {self.workers}")


@dataclass(frozen=True)
class SlopeEstimate:
    k: int
    slope: float
    stderr: float
    expected: float

    @property
    def deviation(self) -> float:
        return abs(self.slope - self.expected)


class CentralizationResult(NamedTuple):
    empirical_mean: float
    z_score: float


# ---- sampling ----


def _generator(seed: int, n: int, sample_index: int) -> np.random.Generator:
    key = (seed & MASK64) | ((n & MASK64) << 64)
    counter = (sample_index & MASK64) << 64
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def sample_w_n(pmf: SourcePmf, n: int, sample_index: int, seed: int) -> float:
    """
    One draw of W_n = S_n - n*H1.

    The sequence is drawn through its type: S_n depends on a sequence only through
    its symbol counts, and the counts of n i.i.d. symbols are multinomial.
    """
    moments = info_moments(pmf, 3)
    centered = pmf.self_informations() - moments.h1
    counts = _generator(seed, n, sample_index).multinomial(n, pmf.as_array())
    return float(_weighted_rows(counts[np.newaxis, :], centered)[0])


def _weighted_rows(counts: np.ndarray, centered: np.ndarray) -> np.ndarray:
    # Accumulate in symbol order so a row rounds the same whatever batch it is in.
    acc = counts[:, 0] * centered[0]
    for j in range(1, centered.size):
        acc = acc + counts[:, j] * centered[j]
    return acc


def _draw_range(pmf: SourcePmf, n: int, seed: int, start: int, stop: int) -> np.ndarray:
    probs = pmf.as_array()
    centered = pmf.self_informations() - info_moments(pmf, 3).h1
    counts = np.empty((stop - start, probs.size))
    for row, index in enumerate(range(start, stop)):
        counts[row] = _generator(seed, n, index).multinomial(n, probs)
    return _weighted_rows(counts, centered)


def _ranges(start: int, stop: int, size: int = RANGE_SIZE) -> list[tuple[int, int]]:
    return [(lo, min(lo + size, stop)) for lo in range(start, stop, size)]


def draw_fluctuations(
    pmf: SourcePmf, n: int, cfg: McConfig, start: int = 0, stop: int | None = None
) -> np.ndarray:
    """W_n for sample indices [start, stop), in index order."""
    stop = cfg.samples if stop is None else stop
    ranges = _ranges(start, stop)
    if cfg.workers == 1 or len(ranges) == 1:
        parts = [_draw_range(pmf, n, cfg.seed, lo, hi) for lo, hi in ranges]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(_draw_range, pmf, n, cfg.seed, lo, hi) for lo, hi in ranges]
            parts = [f.result() for f in futures]
    logger.debug(f"drew {stop - start:,} samples of W_{n} in {len(ranges)} ranges")
    return np.concatenate(parts) if parts else np.empty(0)


def _ordered_mean(values: np.ndarray) -> float:
    """Compensated mean reduced over fixed-size ranges in index order."""
    partials = [stable_sum(values[lo:hi]) for lo, hi in _ranges(0, values.size)]
    return stable_sum(partials) / values.size


def _ordered_std(values: np.ndarray) -> float:
    mean = _ordered_mean(values)
    return math.sqrt(_ordered_mean((values - mean) ** 2))


# ---- checks ----


def verify_centralization(pmf: SourcePmf, n: int, cfg: McConfig) -> CentralizationResult:
    """Sample mean of the centralized q-density and its z-score against n*H1."""
    h1 = info_moments(pmf, 3).h1
    q_n = scaling_q(ScalingLaw(cfg.alpha), n)
    w = draw_fluctuations(pmf, n, cfg)
    mapped = np.atleast_1d(centralized_q_density(w + n * h1, pmf, n, q_n, h1=h1))

    if np.ptp(mapped) == 0.0:
        # constant draws (uniform source): no spread to score against
        mean, z_score = float(mapped[0]), 0.0
    else:
        mean = _ordered_mean(mapped)
        stderr = _ordered_std(mapped) / math.sqrt(mapped.size)
        z_score = 0.0 if stderr == 0.0 else (mean - n * h1) / stderr
    logger.info(f"centralization n={n}: mean={mean:.12g} target={n * h1:.12g} z={z_score:.3f}")
    return CentralizationResult(mean, z_score)


def estimate_term_scaling(pmf: SourcePmf, cfg: McConfig) -> list[SlopeEstimate]:
    """
    Log-log slope of the standard deviation of each expansion term against n.

    Row k = 1 is the raw fluctuation W_n; rows k = 2..max_k are the degree-k terms
    under q_n = scaling_q(alpha, n).
    """
    if cfg.samples < MIN_SLOPE_SAMPLES:
        raise DegenerateFitError(
            f"Slope estimation needs at least {MIN_SLOPE_SAMPLES:,} samples, got {cfg.samples:,}"
        )
    if len(cfg.n_grid) < 4 or cfg.n_grid[-1] < 100 * cfg.n_grid[0]:
        raise DegenerateFitError(
            f"n_grid needs >= 4 points spanning >= 2 decades, got {cfg.n_grid}"
        )

    moments = info_moments(pmf)
    law = ScalingLaw(cfg.alpha)
    ks = list(range(1, cfg.max_k + 1))
    spreads = {k: [] for k in ks}

    for n in cfg.n_grid:
        w = draw_fluctuations(pmf, n, cfg)
        q_n = scaling_q(law, n)
        block = block_moments(moments, n, cfg.max_k)
        for k in ks:
            spreads[k].append(_ordered_std(np.atleast_1d(fluctuation_term(w, q_n, k, block))))

    log_n = np.log(np.asarray(cfg.n_grid, dtype=float))
    estimates = []
    for k in ks:
        sd = np.asarray(spreads[k])
        if np.any(~np.isfinite(sd)) or np.any(sd <= 0.0):
            raise DegenerateFitError(f"Term k={k} has non-positive spread on the grid: {sd}")
        fit = stats.linregress(log_n, np.log(sd))
        estimates.append(
            SlopeEstimate(k=k, slope=float(fit.slope), stderr=float(fit.stderr), expected=1 - k / 2)
        )
        logger.info(f"k={k}: slope={fit.slope:.4f} +/- {fit.stderr:.4f} (expected {1 - k / 2})")
    return estimates


def empirical_q_quantile(pmf: SourcePmf, n: int, eps: float, cfg: McConfig) -> float:
    """Order statistic ceil((1 - eps) * samples) of the centralized q-density."""
    if not (0.0 < eps < 1.0):
        raise DomainError(f"eps must be in (0, 1), got {eps}")
    if cfg.samples < 100.0 / eps:
        raise InsufficientSamplesError(
            f"{cfg.samples:,} samples cannot resolve eps={eps}; need >= {math.ceil(100 / eps):,}"
        )
    h1 = info_moments(pmf, 3).h1
    q_n = scaling_q(ScalingLaw(cfg.alpha), n)
    w = draw_fluctuations(pmf, n, cfg)
    mapped = np.sort(np.atleast_1d(centralized_q_density(w + n * h1, pmf, n, q_n, h1=h1)))
    # 1e-9 absorbs the representation error of (1 - eps) * samples at integer rank.
    rank = math.ceil((1.0 - eps) * cfg.samples - 1e-9)
    rank = min(max(rank, 1), cfg.samples)
    return float(mapped[rank - 1])


def empirical_cdf(pmf: SourcePmf, n: int, levels, cfg: McConfig) -> np.ndarray:
    """Fraction of sampled S_n at or below each level."""
    h1 = info_moments(pmf, 3).h1
    s_n = np.sort(draw_fluctuations(pmf, n, cfg) + n * h1)
    hits = np.searchsorted(s_n, np.asarray(levels, dtype=float), side="right")
    return hits / s_n.size


def dkw_epsilon(samples: int, confidence: float) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band half-width at the given confidence."""
    if not (0.0 < confidence < 1.0):
        raise DomainError(f"confidence must be in (0, 1), got {confidence}")
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * samples))
