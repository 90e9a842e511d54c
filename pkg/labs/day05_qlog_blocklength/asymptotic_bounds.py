"""
Closed-form approximations of the finite-blocklength limit L*(n, eps).

- Shannon:   n*H1
- Normal:    n*H1 + sqrt(nV) Z_eps
- Edgeworth: normal + T/(6V) (Z_eps^2 - 1)        (Cornish-Fisher skewness term)
- q-bound:   normal + alpha*V/2 (Z_eps^2 - 1)

With alpha = T/(3V^2) the last two are the same number.
"""

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass

from .errors import CapExceededError, DegenerateSourceError, DomainError
from .exact_limit import exact_source_limit, source_spectrum
from .numerics import inv_q_function
from .q_algebra import VARENTROPY_TOL, ScalingLaw, optimal_alpha, scaling_q
from .source_model import InfoMoments, SourcePmf, info_moments

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundInputs:
    n: int
    eps: float
    z_eps: float
    h1: float
    varentropy: float
    third_central: float
    alpha: float | None

    @classmethod
    def from_moments(
        cls, moments: InfoMoments, n: int, eps: float, alpha: float | None = None
    ) -> "BoundInputs":
        """Bundle inputs; alpha defaults to T/(3V^2) and is None for a degenerate source."""
        if n < 1:
            raise DomainError(f"Blocklength must be positive, got {n}")
        if alpha is None:
            try:
                alpha = optimal_alpha(moments).alpha
            except DegenerateSourceError:
                alpha = None
        return cls(
            n=n,
            eps=eps,
            z_eps=inv_q_function(eps),
            h1=moments.h1,
            varentropy=moments.varentropy,
            third_central=moments.third_central,
            alpha=alpha,
        )


@dataclass(frozen=True)
class BoundRow:
    n: int
    shannon: float
    normal: float
    edgeworth: float | None
    q_bound: float | None
    exact: float | None = None
    degenerate: bool = False
    exact_capped: bool = False


def shannon_limit(inputs: BoundInputs) -> float:
    return inputs.n * inputs.h1


def normal_approx(inputs: BoundInputs) -> float:
    return shannon_limit(inputs) + math.sqrt(inputs.n * inputs.varentropy) * inputs.z_eps


def edgeworth_third(inputs: BoundInputs) -> float:
    if inputs.varentropy <= VARENTROPY_TOL:
        raise DegenerateSourceError(
            f"Edgeworth term undefined for varentropy {inputs.varentropy!r}"
        )
    skew = inputs.third_central / (6.0 * inputs.varentropy)
    return normal_approx(inputs) + skew * (inputs.z_eps**2 - 1.0)


def q_bound(inputs: BoundInputs) -> float:
    if inputs.alpha is None:
        raise DegenerateSourceError("q-bound needs a scaling constant; source is degenerate")
    return normal_approx(inputs) + 0.5 * inputs.alpha * inputs.varentropy * (
        inputs.z_eps**2 - 1.0
    )


def gaussian_baseline_quantile(inputs: BoundInputs) -> float:
    """
    Normal-baseline q-density n*H1 + sqrt(nV) Z + (1-q_n)/2 nV (Z^2 - 1) at Z = Z_eps.

    Same quantity as q_bound, reached by deforming the Gaussian variable first and
    taking its quantile second.
    """
    if inputs.alpha is None:
        raise DegenerateSourceError("Gaussian-baseline quantile needs a scaling constant")
    q_n = scaling_q(ScalingLaw(inputs.alpha), inputs.n)
    n_v = inputs.n * inputs.varentropy
    z = inputs.z_eps
    return inputs.n * inputs.h1 + math.sqrt(n_v) * z + 0.5 * q_n.one_minus_q * n_v * (z * z - 1)


def bound_sweep(
    pmf: SourcePmf,
    eps: float,
    n_values: Iterable[int],
    include_exact: bool = True,
    alpha: float | None = None,
) -> list[BoundRow]:
    """One BoundRow per blocklength, in the order given."""
    moments = info_moments(pmf)
    rows: list[BoundRow] = []
    for n in n_values:
        inputs = BoundInputs.from_moments(moments, n, eps, alpha)
        degenerate = inputs.varentropy <= VARENTROPY_TOL
        edge = None if degenerate else edgeworth_third(inputs)
        qb = None if inputs.alpha is None else q_bound(inputs)

        exact = None
        capped = False
        if include_exact:
            try:
                exact = exact_source_limit(source_spectrum(pmf, n), eps)
            except CapExceededError as e:
                logger.warning(f"n={n}: exact limit skipped ({e})")
                capped = True

        rows.append(
            BoundRow(
                n=n,
                shannon=shannon_limit(inputs),
                normal=normal_approx(inputs),
                edgeworth=edge,
                q_bound=qb,
                exact=exact,
                degenerate=degenerate,
                exact_capped=capped,
            )
        )
    if rows and rows[0].degenerate:
        logger.warning("Degenerate source (V = 0): edgeworth and q-bound columns are empty")
    return rows
