"""
Verification checks behind `cli verify`.

Each check takes a RunConfig and returns a CheckResult with status PASS, FAIL or
SKIP. Checks that need the scaling constant are skipped for degenerate (V = 0)
sources.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

from .asymptotic_bounds import BoundInputs, edgeworth_third, q_bound
from .config import (
    CENTRALIZATION_BLOCKLENGTHS,
    IDENTITY_MAX_ULP,
    RESONANCE_GRID,
    RESONANCE_MAX_K,
    SLOPE_TOLERANCE,
    RunConfig,
)
from .errors import BlocklengthError, CapExceededError, DegenerateFitError, DegenerateSourceError
from .exact_limit import (
    exact_q_limit,
    exact_source_limit,
    source_spectrum,
    spectrum_mean,
    transform_spectrum,
)
from .monte_carlo import McConfig, estimate_term_scaling, verify_centralization
from .performance_monitor import CheckMetrics, monitor_check
from .q_algebra import (
    QParam,
    ScalingLaw,
    centralized_q_density,
    optimal_alpha,
    q_entropy_expansion,
    scaling_q,
    tsallis_entropy,
)
from .source_model import info_moments

logger = logging.getLogger(__name__)

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"

CENTRALIZATION_REL_TOL = 1e-9
CENTRALIZATION_MAX_Z = 4.0
RESIDUAL_STEPS = (1e-2, 1e-3, 1e-4)
RESIDUAL_MAX_RATIO = 3.0
TRANSFORM_BLOCKLENGTHS = (10, 50, 100)


@dataclass
class CheckResult:
    name: str
    status: str
    detail: str
    metrics: CheckMetrics | None = None


def _alpha(cfg: RunConfig) -> float:
    if cfg.alpha_override is not None:
        return cfg.alpha_override
    return optimal_alpha(info_moments(cfg.pmf())).alpha


def check_centralization(cfg: RunConfig) -> CheckResult:
    """Exact-spectrum mean of the centralized density equals n*H1; MC z-score is small."""
    pmf = cfg.pmf()
    h1 = info_moments(pmf).h1
    law = ScalingLaw(_alpha(cfg))

    worst = 0.0
    for n in CENTRALIZATION_BLOCKLENGTHS:
        try:
            spec = source_spectrum(pmf, n)
        except CapExceededError as e:
            logger.warning(f"centralization n={n} skipped: {e}")
            continue
        q_n = scaling_q(law, n)
        mean = spectrum_mean(
            spec, lambda v, n=n, q_n=q_n: centralized_q_density(v, pmf, n, q_n, h1=h1)
        )
        worst = max(worst, abs(mean - n * h1) / (n * h1))

    mc = McConfig(samples=cfg.samples, seed=cfg.seed, alpha=law.alpha, workers=cfg.workers)
    result = verify_centralization(pmf, cfg.n_max, mc)

    ok = worst <= CENTRALIZATION_REL_TOL and abs(result.z_score) <= CENTRALIZATION_MAX_Z
    detail = (
        f"max exact rel. deviation {worst:.3e} (tol {CENTRALIZATION_REL_TOL:g}); "
        f"MC z-score at n={cfg.n_max}: {result.z_score:.3f}"
    )
    return CheckResult("centralization", PASS if ok else FAIL, detail)


def check_identity(cfg: RunConfig) -> CheckResult:
    """q-bound with alpha = T/(3V^2) reproduces the Edgeworth bound to a few ulp."""
    moments = info_moments(cfg.pmf())
    worst = 0.0
    for n in cfg.n_values():
        inputs = BoundInputs.from_moments(moments, n, cfg.eps)
        edge = edgeworth_third(inputs)
        worst = max(worst, abs(q_bound(inputs) - edge) / math.ulp(edge))
    ok = worst <= IDENTITY_MAX_ULP
    return CheckResult(
        "identity",
        PASS if ok else FAIL,
        f"max |q_bound - edgeworth| = {worst:g} ulp (tol {IDENTITY_MAX_ULP})",
    )


def check_resonance(cfg: RunConfig) -> CheckResult:
    """Term k spreads grow like n^(1 - k/2)."""
    mc = McConfig(
        samples=cfg.samples,
        seed=cfg.seed,
        n_grid=RESONANCE_GRID,
        max_k=RESONANCE_MAX_K,
        alpha=_alpha(cfg),
        workers=cfg.workers,
    )
    estimates = estimate_term_scaling(cfg.pmf(), mc)
    ok = all(e.deviation <= SLOPE_TOLERANCE for e in estimates)
    detail = ", ".join(f"k={e.k}: {e.slope:+.3f} (exp {e.expected:+.1f})" for e in estimates)
    return CheckResult("resonance", PASS if ok else FAIL, detail)


def check_entropy_expansion(cfg: RunConfig) -> CheckResult:
    """Tsallis entropy minus its two-term expansion shrinks like (1-q)^2."""
    pmf = cfg.pmf()
    moments = info_moments(pmf)
    scaled = []
    for step in RESIDUAL_STEPS:
        q = QParam.from_one_minus_q(step)
        scaled.append(abs(tsallis_entropy(pmf, q) - q_entropy_expansion(moments, q)) / step**2)
    if min(scaled) == 0.0:
        return CheckResult("entropy_expansion", PASS, "residual vanishes identically")
    ratio = max(scaled) / min(scaled)
    ok = ratio < RESIDUAL_MAX_RATIO
    return CheckResult(
        "entropy_expansion",
        PASS if ok else FAIL,
        f"residual/(1-q)^2 spread ratio {ratio:.4f} (tol {RESIDUAL_MAX_RATIO:g})",
    )


def check_quantile_transform(cfg: RunConfig) -> CheckResult:
    """Quantile of the transformed spectrum equals the transformed quantile."""
    pmf = cfg.pmf()
    law = ScalingLaw(_alpha(cfg))
    mismatches = 0
    compared = 0
    for n in TRANSFORM_BLOCKLENGTHS:
        spec = source_spectrum(pmf, n)
        q_n = scaling_q(law, n)
        mapped = transform_spectrum(spec, pmf, q_n)
        for eps in sorted({cfg.eps, 0.1}):
            compared += 1
            if exact_q_limit(spec, pmf, q_n, eps) != exact_source_limit(mapped, eps):
                mismatches += 1
    return CheckResult(
        "quantile_transform",
        PASS if mismatches == 0 else FAIL,
        f"{compared - mismatches}/{compared} quantiles match exactly",
    )


CHECKS: dict[str, tuple[str, Callable[[RunConfig], CheckResult]]] = {
    "identity": ("Edgeworth / q-bound identity", check_identity),
    "centralization": ("Centralization conservation", check_centralization),
    "entropy_expansion": ("Tsallis expansion residual", check_entropy_expansion),
    "quantile_transform": ("Quantile transform", check_quantile_transform),
    "resonance": ("Term scaling resonance", check_resonance),
}


def run_checks(cfg: RunConfig, names: list[str] | None = None) -> list[CheckResult]:
    results = []
    for name in names or list(CHECKS):
        title, run_func = CHECKS[name]
        logger.info(f"running check: {title}")
        with monitor_check(name) as metrics:
            try:
                result = run_func(cfg)
            except DegenerateSourceError as e:
                result = CheckResult(name, SKIP, f"degenerate source: {e}")
            except (CapExceededError, DegenerateFitError) as e:
                result = CheckResult(name, SKIP, str(e))
            except BlocklengthError as e:
                result = CheckResult(name, FAIL, f"{type(e).__name__}: {e}")
        result.metrics = metrics
        results.append(result)
    return results


def any_failed(results: list[CheckResult]) -> bool:
    return any(r.status == FAIL for r in results)
