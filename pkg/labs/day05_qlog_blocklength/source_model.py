"""
Finite-alphabet memoryless sources and the moments of their self-information.

All quantities are in nats. Block-level moments of the fluctuation
W_n = S_n - n*H1 are rebuilt from single-symbol cumulants, which add across
independent symbols.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, MomentOrderError
from .numerics import RealTolerance, stable_sum

logger = logging.getLogger(__name__)

MAX_ORDER = 12
PMF_SUM_TOLERANCE = RealTolerance(abs_tol=1e-12, rel_tol=1e-12)


@dataclass(frozen=True)
class SourcePmf:
    """Strictly positive probability distribution over symbols 0..m-1."""

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)

        if len(probs) < 2:
            raise DomainError(f"Alphabet size must be at least 2, got {len(probs)}")
        bad = [p for p in probs if not (p > 0.0) or not math.isfinite(p)]
        if bad:
            raise DomainError(f"Probabilities must be strictly positive and finite, got {bad}")
        total = math.fsum(probs)
        if not PMF_SUM_TOLERANCE.close(total, 1.0):
            raise DomainError(f"Probabilities must sum to 1, got {total!r}")

    @classmethod
    def from_text(cls, text: str) -> "SourcePmf":
        """Parse comma-separated probabilities, e.g. '0.11,0.89'."""
        try:
            probs = [float(tok) for tok in text.split(",") if tok.strip()]
        except ValueError as e:
            raise DomainError(f"Cannot parse pmf {text!r}: {e}") from e
        return cls(tuple(probs))

    @classmethod
    def bernoulli(cls, p: float) -> "SourcePmf":
        """Binary source with P(X=1) = p."""
        if not (0.0 < p < 1.0):
            raise DomainError(f"Bernoulli parameter must be in (0, 1), got {p}")
        return cls((1.0 - p, p))

    @property
    def size(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def self_informations(self) -> np.ndarray:
        return -np.log(self.as_array())

    def to_text(self) -> str:
        return ",".join(repr(p) for p in self.probs)


@dataclass(frozen=True)
class InfoMoments:
    """
    Moments of single-symbol self-information.

    central_moments is keyed by order 2..K, cumulants by order 1..K.
    """

    h1: float
    varentropy: float
    third_central: float
    central_moments: dict[int, float] = field(repr=False)
    cumulants: dict[int, float] = field(repr=False)

    @property
    def max_order(self) -> int:
        return max(self.central_moments)


@dataclass(frozen=True)
class BlockMoments:
    """Central moments E[W_n^j] of the block fluctuation, keyed by order."""

    n: int
    central_moments_w: dict[int, float] = field(repr=False)

    @property
    def max_order(self) -> int:
        return max(self.central_moments_w)

    def moment(self, order: int) -> float:
        if order == 1:
            return 0.0
        try:
            return self.central_moments_w[order]
        except KeyError:
            raise MomentOrderError(
                f"Block moment of order {order} not available (max {self.max_order})"
            ) from None


def self_information(pmf: SourcePmf, symbol: int) -> float:
    if not (0 <= symbol < pmf.size):
        raise DomainError(f"Symbol index {symbol} out of range for alphabet of size {pmf.size}")
    return -math.log(pmf.probs[symbol])


def _cumulants_from_moments(moments: dict[int, float], max_order: int) -> dict[int, float]:
    """kappa_j = mu_j - sum_{m<j} C(j-1, m-1) kappa_m mu_{j-m}, moments about a fixed origin."""
    raw = {0: 1.0, **moments}
    kappa: dict[int, float] = {}
    for j in range(1, max_order + 1):
        acc = raw[j] - stable_sum(
            math.comb(j - 1, m - 1) * kappa[m] * raw[j - m] for m in range(1, j)
        )
        kappa[j] = acc
    return kappa


def _moments_from_cumulants(cumulants: dict[int, float], max_order: int) -> dict[int, float]:
    """mu_j = sum_{m=1..j} C(j-1, m-1) kappa_m mu_{j-m}."""
    raw = {0: 1.0}
    for j in range(1, max_order + 1):
        raw[j] = stable_sum(
            math.comb(j - 1, m - 1) * cumulants[m] * raw[j - m] for m in range(1, j + 1)
        )
    return raw


def info_moments(pmf: SourcePmf, max_order: int = MAX_ORDER) -> InfoMoments:
    if not (3 <= max_order <= MAX_ORDER):
        raise MomentOrderError(f"max_order must be in [3, {MAX_ORDER}], got {max_order}")

    p = pmf.as_array()
    info = pmf.self_informations()

    if np.ptp(info) == 0.0:
        # Constant self-information: every centered power vanishes identically.
        h1 = float(info[0])
        centered = np.zeros_like(info)
    else:
        h1 = stable_sum(p * info)
        centered = info - h1

    central = {j: stable_sum(p * centered**j) for j in range(2, max_order + 1)}
    about_mean = _cumulants_from_moments({1: 0.0, **central}, max_order)
    cumulants = {1: h1, **{j: about_mean[j] for j in range(2, max_order + 1)}}

    return InfoMoments(
        h1=h1,
        varentropy=central[2],
        third_central=central[3],
        central_moments=central,
        cumulants=cumulants,
    )


def bernoulli_closed_forms(p: float) -> tuple[float, float, float]:
    """(H1, V, T) of a Bernoulli(p) source from the log-odds L = ln((1-p)/p)."""
    if not (0.0 < p < 1.0):
        raise DomainError(f"Bernoulli parameter must be in (0, 1), got {p}")
    q = 1.0 - p
    log_odds = math.log(q / p)
    h1 = -p * math.log(p) - q * math.log1p(-p)
    varentropy = p * q * log_odds**2
    third_central = p * q * (q - p) * log_odds**3
    return h1, varentropy, third_central


def block_moments(moments: InfoMoments, n: int, max_order: int | None = None) -> BlockMoments:
    if n < 1:
        raise DomainError(f"Blocklength must be positive, got {n}")
    order = moments.max_order if max_order is None else max_order
    if order > moments.max_order:
        raise MomentOrderError(
            f"Requested block order {order} exceeds available order {moments.max_order}"
        )
    if order < 2:
        raise MomentOrderError(f"Block order must be at least 2, got {order}")

    block_kappa = {1: 0.0, **{j: n * moments.cumulants[j] for j in range(2, order + 1)}}
    raw = _moments_from_cumulants(block_kappa, order)
    return BlockMoments(n=n, central_moments_w={j: raw[j] for j in range(2, order + 1)})
