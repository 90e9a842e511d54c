"""
Generalized-logarithm algebra.

ln_q x = (x^(1-q) - 1) / (1 - q), Tsallis entropy, the q-information density and
its centralized form

    S_q(W_n) = n*H1 + [exp((1-q) W_n) - E exp((1-q) W_n)] / (1 - q),

whose deformation is tied to blocklength by 1 - q_n = alpha / n.

Functions taking a realized value (`ln_q`, `centralized_q_density`,
`fluctuation_term`, ...) accept numpy arrays as well as floats.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSourceError, DomainError, MgfOverflowError
from .numerics import log_sum_exp, stable_sum
from .source_model import BlockMoments, InfoMoments, SourcePmf, info_moments

logger = logging.getLogger(__name__)

SHANNON_THRESHOLD = 1e-14
LOG_MGF_LIMIT = 700.0
VARENTROPY_TOL = 1e-14


@dataclass(frozen=True)
class QParam:
    """Deformation parameter; 1 - q is stored to avoid forming it by subtraction."""

    q: float
    one_minus_q: float

    @classmethod
    def from_q(cls, q: float) -> "QParam":
        return cls(q=q, one_minus_q=1.0 - q)

    @classmethod
    def from_one_minus_q(cls, one_minus_q: float) -> "QParam":
        return cls(q=1.0 - one_minus_q, one_minus_q=one_minus_q)

    @classmethod
    def shannon(cls) -> "QParam":
        return cls(q=1.0, one_minus_q=0.0)

    @property
    def is_shannon(self) -> bool:
        return abs(self.one_minus_q) < SHANNON_THRESHOLD


@dataclass(frozen=True)
class ScalingLaw:
    """1 - q_n = alpha / n."""

    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise DomainError(f"Scaling constant must be finite, got {self.alpha}")


def _scalar_or_array(result):
    return float(result) if np.ndim(result) == 0 else result


# ---- q-logarithm and entropies ----


def _ln_q_of_log(log_x, q: QParam):
    """ln_q evaluated from ln x."""
    if q.is_shannon:
        return log_x
    d = q.one_minus_q
    return np.expm1(d * log_x) / d


def ln_q(x, q: QParam):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"ln_q requires x > 0, got {x}")
    return _scalar_or_array(_ln_q_of_log(np.log(arr), q))


def ln_q_expansion(x, q: QParam):
    """Two-term expansion around q = 1: ln x + (1-q)/2 (ln x)^2."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"ln_q_expansion requires x > 0, got {x}")
    log_x = np.log(arr)
    return _scalar_or_array(log_x + 0.5 * q.one_minus_q * log_x**2)


def tsallis_entropy(pmf: SourcePmf, q: QParam) -> float:
    """H_q = sum_x p_x ln_q(1/p_x); equals (1 - sum p^q)/(q - 1) and H1 at q = 1."""
    p = pmf.as_array()
    return stable_sum(p * _ln_q_of_log(-np.log(p), q))


def q_entropy_expansion(moments: InfoMoments, q: QParam) -> float:
    return moments.h1 + 0.5 * q.one_minus_q * (moments.varentropy + moments.h1**2)


def block_q_entropy_expansion(moments: InfoMoments, n: int, q: QParam) -> float:
    """Expansion of H_q for the n-fold product source."""
    h1, v = moments.h1, moments.varentropy
    return n * h1 + 0.5 * q.one_minus_q * (n * v + n * n * h1 * h1)


def block_tsallis_entropy(spectrum, q: QParam) -> float:
    """H_q of the n-fold product, summed over the atoms of its exact spectrum."""
    values = spectrum.values()
    weights = np.exp(spectrum.log_probs())
    return stable_sum(weights * _ln_q_of_log(values, q))


# ---- information densities ----


def q_info_density(joint_prob, q: QParam):
    arr = np.asarray(joint_prob, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"q_info_density requires joint_prob > 0, got {joint_prob}")
    return _scalar_or_array(_ln_q_of_log(-np.log(arr), q))


def q_info_density_expansion(s_n, q: QParam):
    """S_n + (1-q)/2 S_n^2."""
    s = np.asarray(s_n, dtype=float)
    return _scalar_or_array(s + 0.5 * q.one_minus_q * s**2)


def log_mgf_fluctuation(pmf: SourcePmf, n: int, theta: float) -> float:
    """
    ln E[exp(theta W_n)] = n ln sum_x p_x exp(theta (s_x - H1)).

    For small |theta| the inner sum is formed as 1 + sum p_x expm1(.) so that the
    second-order term is not lost against the leading 1.
    """
    if n < 1:
        raise DomainError(f"Blocklength must be positive, got {n}")
    if theta == 0.0:
        return 0.0

    p = pmf.as_array()
    centered = pmf.self_informations() - info_moments(pmf, 3).h1
    spread = abs(theta) * float(np.max(np.abs(centered)))
    if spread <= 1.0:
        per_symbol = math.log1p(stable_sum(p * np.expm1(theta * centered)))
    else:
        per_symbol = log_sum_exp(np.log(p) + theta * centered)

    log_mgf = n * per_symbol
    if log_mgf > LOG_MGF_LIMIT:
        raise MgfOverflowError(
            f"log MGF {log_mgf:.1f} exceeds {LOG_MGF_LIMIT} (n={n}, theta={theta})"
        )
    return log_mgf


def mgf_fluctuation(pmf: SourcePmf, n: int, theta: float) -> float:
    """E[exp(theta W_n)] = exp(-theta n H1) (sum_x p_x^(1-theta))^n."""
    return math.exp(log_mgf_fluctuation(pmf, n, theta))


def centralized_q_density(s_n, pmf: SourcePmf, n: int, q: QParam, h1: float | None = None):
    """
    Map a realized S_n to the centralized q-generalized information density.

    The expectation over the law of S_n is n*H1 for every q. At q = 1 the map is the
    identity.
    """
    if q.is_shannon:
        return _scalar_or_array(np.asarray(s_n, dtype=float))

    if h1 is None:
        h1 = info_moments(pmf, 3).h1
    d = q.one_minus_q
    log_mgf = log_mgf_fluctuation(pmf, n, d)
    w = np.asarray(s_n, dtype=float) - n * h1
    # exp(dw) - M written as expm1(dw) - expm1(ln M) keeps precision for small d.
    return _scalar_or_array(n * h1 + (np.expm1(d * w) - math.expm1(log_mgf)) / d)


def uncentralized_q_density(s_n, h1: float, n: int, q: QParam):
    """n*H1 + ln_q(exp(W_n)): the map before its mean is re-centred."""
    w = np.asarray(s_n, dtype=float) - n * h1
    return _scalar_or_array(n * h1 + _ln_q_of_log(w, q))


def centralization_shift(pmf: SourcePmf, n: int, q: QParam) -> float:
    """Mean drift (E exp((1-q)W_n) - 1)/(1-q) of the uncentralized map."""
    if q.is_shannon:
        return 0.0
    return math.expm1(log_mgf_fluctuation(pmf, n, q.one_minus_q)) / q.one_minus_q


def fluctuation_term(w, q: QParam, k: int, block: BlockMoments):
    """k-th degree term (1-q)^(k-1)/k! (W_n^k - E[W_n^k]); k = 1 gives W_n itself."""
    if k < 1:
        raise DomainError(f"Expansion degree must be >= 1, got {k}")
    mean_k = block.moment(k)
    coeff = q.one_minus_q ** (k - 1) / math.factorial(k)
    w = np.asarray(w, dtype=float)
    return _scalar_or_array(coeff * (w**k - mean_k))


def expanded_q_density(w, h1: float, q: QParam, block: BlockMoments, max_k: int):
    """n*H1 + W_n + sum_{k=2..max_k} fluctuation_term."""
    w = np.asarray(w, dtype=float)
    total = block.n * h1 + w
    for k in range(2, max_k + 1):
        total = total + fluctuation_term(w, q, k, block)
    return _scalar_or_array(total)


# ---- scaling law ----


def scaling_q(law: ScalingLaw, n: int) -> QParam:
    if n < 1:
        raise DomainError(f"Blocklength must be positive, got {n}")
    return QParam.from_one_minus_q(law.alpha / n)


def optimal_alpha(moments: InfoMoments, tol: float = VARENTROPY_TOL) -> ScalingLaw:
    """alpha = T / (3 V^2), the constant that reproduces the skewness correction."""
    if moments.varentropy <= tol:
        raise DegenerateSourceError(
            f"Varentropy {moments.varentropy!r} is zero; the q-deformation is undefined"
        )
    alpha = moments.third_central / (3.0 * moments.varentropy**2)
    logger.debug(f"optimal alpha = {alpha:.10g}")
    return ScalingLaw(alpha)
