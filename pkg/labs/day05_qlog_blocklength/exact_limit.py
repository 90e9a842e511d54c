"""
Exact law of the block information density S_n and the limits read off it.

A spectrum is the list of distinct values of S_n with their total probability
(kept in log domain). Binary sources use the binomial construction; general
alphabets enumerate type classes (compositions of n); the brute-force
enumeration over all m^n sequences is the test oracle for both.
"""

import logging
import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CapExceededError, DomainError
from .numerics import CompensatedSum, log_gamma, log_sum_exp, sorted_stable_sum, stable_sum
from .q_algebra import QParam, centralized_q_density
from .source_model import SourcePmf, info_moments

logger = logging.getLogger(__name__)

MAX_BINARY_N = 10**6
MAX_COMPOSITIONS = 10**7
MAX_SEQUENCES = 10**7
MERGE_REL_TOL = 1e-12
CHUNK = 1 << 16


@dataclass(frozen=True)
class SpectrumAtom:
    value: float
    log_prob: float


@dataclass(frozen=True)
class Spectrum:
    """Atoms of the law of S_n, strictly increasing in value."""

    n: int
    atoms: tuple[SpectrumAtom, ...]

    def __post_init__(self):
        if not self.atoms:
            raise DomainError("A spectrum needs at least one atom")
        vals = self.values()
        if vals.size > 1 and not np.all(np.diff(vals) > 0):
            raise DomainError("Spectrum atoms must be strictly increasing in value")

    def __len__(self) -> int:
        return len(self.atoms)

    def values(self) -> np.ndarray:
        return np.fromiter((a.value for a in self.atoms), dtype=float, count=len(self.atoms))

    def log_probs(self) -> np.ndarray:
        return np.fromiter((a.log_prob for a in self.atoms), dtype=float, count=len(self.atoms))

    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_probs())

    def total_mass(self) -> float:
        return sorted_stable_sum(self.probabilities())


class QuantileHit(NamedTuple):
    index: int
    value: float
    cumulative: float


def _merge_atoms(n: int, values: np.ndarray, log_probs: np.ndarray) -> Spectrum:
    """Sort by value and fuse neighbours equal within MERGE_REL_TOL."""
    order = np.argsort(values, kind="stable")
    values = values[order]
    log_probs = log_probs[order]

    breaks = np.diff(values) > MERGE_REL_TOL * np.abs(values[:-1])
    starts = np.flatnonzero(np.concatenate(([True], breaks)))
    ends = np.append(starts[1:], values.size)

    merged = log_probs[starts].copy()
    for g in np.flatnonzero(ends - starts > 1):
        merged[g] = log_sum_exp(log_probs[starts[g] : ends[g]])

    atoms = tuple(
        SpectrumAtom(float(v), float(lp)) for v, lp in zip(values[starts], merged, strict=True)
    )
    logger.debug(f"spectrum n={n}: {values.size} raw atoms merged into {len(atoms)}")
    return Spectrum(n=n, atoms=atoms)


def binary_spectrum(p: float, n: int) -> Spectrum:
    """Law of S_n for Bernoulli(p): atom k (k ones) carries C(n,k) p^k (1-p)^(n-k)."""
    if not (0.0 < p < 1.0):
        raise DomainError(f"Bernoulli parameter must be in (0, 1), got {p}")
    if not (1 <= n <= MAX_BINARY_N):
        raise DomainError(f"Blocklength must be in [1, {MAX_BINARY_N}], got {n}")

    k = np.arange(n + 1, dtype=float)
    log_p, log_q = math.log(p), math.log1p(-p)
    log_weight = k * log_p + (n - k) * log_q
    log_binom = log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0)
    return _merge_atoms(n, -log_weight, log_binom + log_weight)


def composition_count(n: int, m: int) -> int:
    return math.comb(n + m - 1, m - 1)


def _compositions(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """All (k_1..k_m) with sum n, lexicographic."""
    if m == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, m - 1):
            yield (first, *rest)


def _chunked(iterator: Iterator[tuple[int, ...]], size: int) -> Iterator[list[tuple[int, ...]]]:
    chunk: list[tuple[int, ...]] = []
    for item in iterator:
        chunk.append(item)
        if len(chunk) == size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def type_class_spectrum(pmf: SourcePmf, n: int) -> Spectrum:
    """Law of S_n from the type classes of length-n sequences."""
    if n < 1:
        raise DomainError(f"Blocklength must be positive, got {n}")
    m = pmf.size
    count = composition_count(n, m)
    if count > MAX_COMPOSITIONS:
        raise CapExceededError(
            f"{count:,} type classes for n={n}, m={m} exceed the cap of {MAX_COMPOSITIONS:,}"
        )

    log_p = np.log(pmf.as_array())
    values = np.empty(count)
    log_probs = np.empty(count)
    log_n_fact = log_gamma(n + 1.0)

    filled = 0
    for chunk in _chunked(_compositions(n, m), CHUNK):
        counts = np.asarray(chunk, dtype=float)
        log_weight = counts @ log_p
        log_multinomial = log_n_fact - log_gamma(counts + 1.0).sum(axis=1)
        stop = filled + len(chunk)
        values[filled:stop] = -log_weight
        log_probs[filled:stop] = log_multinomial + log_weight
        filled = stop

    return _merge_atoms(n, values, log_probs)


def brute_force_spectrum(pmf: SourcePmf, n: int) -> Spectrum:
    """Law of S_n by enumerating every one of the m^n sequences."""
    if n < 1:
        raise DomainError(f"Blocklength must be positive, got {n}")
    m = pmf.size
    total = m**n
    if total > MAX_SEQUENCES:
        raise CapExceededError(f"{total:,} sequences exceed the cap of {MAX_SEQUENCES:,}")

    info = pmf.self_informations()
    powers = m ** np.arange(n, dtype=np.int64)
    values = np.empty(total)
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        symbols = (idx[:, None] // powers[None, :]) % m
        values[start : start + idx.size] = info[symbols].sum(axis=1)

    # Every sequence has probability exp(-value).
    return _merge_atoms(n, values, -values)


def spectrum_cdf(spec: Spectrum, level: float) -> float:
    """P(S_n <= level)."""
    cutoff = int(np.searchsorted(spec.values(), level, side="right"))
    return sorted_stable_sum(spec.probabilities()[:cutoff])


def spectrum_mean(spec: Spectrum, fn: Callable[[np.ndarray], np.ndarray] | None = None) -> float:
    """E[fn(S_n)] over the atoms; E[S_n] when fn is None."""
    values = spec.values()
    mapped = values if fn is None else np.asarray(fn(values), dtype=float)
    return stable_sum(spec.probabilities() * mapped)


def locate_quantile(spec: Spectrum, eps: float) -> QuantileHit:
    """First atom whose closed cumulative probability reaches 1 - eps."""
    if not (0.0 < eps < 1.0):
        raise DomainError(f"eps must be in (0, 1), got {eps}")
    target = 1.0 - eps
    acc = CompensatedSum()
    probs = spec.probabilities()
    for i, prob in enumerate(probs):
        acc.add(prob)
        if acc.value >= target:
            return QuantileHit(i, spec.atoms[i].value, acc.value)
    # Total mass short of 1 - eps only through rounding; the largest atom always qualifies.
    last = len(spec) - 1
    return QuantileHit(last, spec.atoms[last].value, acc.value)


def exact_source_limit(spec: Spectrum, eps: float) -> float:
    """L*(n, eps): smallest atom value L with P(S_n <= L) >= 1 - eps."""
    return locate_quantile(spec, eps).value


def transform_spectrum(spec: Spectrum, pmf: SourcePmf, q: QParam) -> Spectrum:
    """
    Apply the centralized q-map atomwise.

    The map is non-decreasing; far in the tail exp(dW) - 1 rounds to -1 and distinct
    atoms land on the same value, so coinciding images are fused and their mass summed.
    """
    mapped = centralized_q_density(spec.values(), pmf, spec.n, q, h1=info_moments(pmf, 3).h1)
    return _merge_atoms(spec.n, np.atleast_1d(np.asarray(mapped, dtype=float)), spec.log_probs())


def exact_q_limit(spec: Spectrum, pmf: SourcePmf, q: QParam, eps: float) -> float:
    """(1 - eps)-quantile of the centralized q-density, via the monotone map of L*."""
    level = exact_source_limit(spec, eps)
    return float(centralized_q_density(level, pmf, spec.n, q, h1=info_moments(pmf, 3).h1))


def source_spectrum(pmf: SourcePmf, n: int) -> Spectrum:
    """Cheapest exact construction for this source."""
    if pmf.size == 2:
        return binary_spectrum(pmf.probs[1], n)
    return type_class_spectrum(pmf, n)
