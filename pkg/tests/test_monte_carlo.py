import math

import numpy as np
import pytest
from conftest import ALPHA_011, H1_011

from labs.day05_qlog_blocklength.errors import (
    DegenerateFitError,
    DomainError,
    InsufficientSamplesError,
)
from labs.day05_qlog_blocklength.exact_limit import (
    binary_spectrum,
    exact_source_limit,
    spectrum_cdf,
    transform_spectrum,
)
from labs.day05_qlog_blocklength.monte_carlo import (
    McConfig,
    dkw_epsilon,
    draw_fluctuations,
    empirical_cdf,
    empirical_q_quantile,
    estimate_term_scaling,
    sample_w_n,
    verify_centralization,
)
from labs.day05_qlog_blocklength.q_algebra import ScalingLaw, scaling_q

SEED = 20250611


class TestMcConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"samples": 0},
            {"seed": -1},
            {"seed": 2**64},
            {"max_k": 0},
            {"max_k": 1},
            {"max_k": 7},
            {"n_grid": (16, 16, 64, 256)},
            {"n_grid": (0, 16, 64, 256)},
            {"workers": 0},
        ],
    )
    def test_rejects_invalid(self, kwargs):
        params = {"samples": 1000, "seed": SEED, **kwargs}
        with pytest.raises(DomainError):
            McConfig(**params)

    def test_grid_is_tuple_of_ints(self):
        cfg = McConfig(samples=10, seed=1, n_grid=[4, 16.0, 64, 1024])
        assert cfg.n_grid == (4, 16, 64, 1024)


class TestSampling:
    def test_uniform_source_has_no_fluctuation(self, uniform4):
        assert sample_w_n(uniform4, 100, 7, SEED) == 0.0

    def test_deterministic(self, bern011):
        assert sample_w_n(bern011, 500, 42, SEED) == sample_w_n(bern011, 500, 42, SEED)

    def test_streams_differ(self, bern011):
        draws = {sample_w_n(bern011, 500, i, SEED) for i in range(20)}
        assert len(draws) > 1

    def test_vector_matches_single_draws(self, bern011):
        cfg = McConfig(samples=50, seed=SEED)
        w = draw_fluctuations(bern011, 64, cfg)
        singles = [sample_w_n(bern011, 64, i, SEED) for i in range(50)]
        np.testing.assert_array_equal(w, singles)

    def test_sub_range(self, bern011):
        cfg = McConfig(samples=10_000, seed=SEED)
        full = draw_fluctuations(bern011, 32, cfg)
        part = draw_fluctuations(bern011, 32, cfg, start=8000, stop=9000)
        np.testing.assert_array_equal(part, full[8000:9000])

    def test_independent_of_workers(self, bern011):
        serial = draw_fluctuations(bern011, 128, McConfig(samples=20_000, seed=SEED))
        pooled = draw_fluctuations(bern011, 128, McConfig(samples=20_000, seed=SEED, workers=2))
        np.testing.assert_array_equal(serial, pooled)

    def test_mean_within_clt_band(self, bern011, moments011):
        n, samples = 1000, 20_000
        w = draw_fluctuations(bern011, n, McConfig(samples=samples, seed=SEED))
        band = 3 * math.sqrt(n * moments011.varentropy / samples)
        assert abs(w.mean()) <= band


class TestCentralization:
    def test_undeformed(self, bern011):
        result = verify_centralization(bern011, 100, McConfig(samples=20_000, seed=SEED))
        assert abs(result.z_score) <= 4.0

    def test_deformed(self, bern011):
        cfg = McConfig(samples=20_000, seed=SEED, alpha=ALPHA_011)
        result = verify_centralization(bern011, 50, cfg)
        assert abs(result.z_score) <= 4.0

    def test_uniform_guarded(self, uniform4):
        result = verify_centralization(uniform4, 30, McConfig(samples=500, seed=SEED, alpha=0.7))
        assert result.z_score == 0.0
        assert result.empirical_mean == pytest.approx(30 * math.log(4.0), rel=1e-12)


class TestTermScaling:
    def test_needs_enough_samples(self, bern011):
        with pytest.raises(DegenerateFitError):
            estimate_term_scaling(bern011, McConfig(samples=9_999, seed=SEED))

    @pytest.mark.parametrize("grid", [(16, 64, 256), (16, 32, 64, 128, 256)])
    def test_needs_wide_grid(self, bern011, grid):
        with pytest.raises(DegenerateFitError):
            estimate_term_scaling(bern011, McConfig(samples=10_000, seed=SEED, n_grid=grid))

    def test_uniform_source_cannot_be_fit(self, uniform4):
        cfg = McConfig(samples=10_000, seed=SEED, n_grid=(4, 16, 64, 400), max_k=2)
        with pytest.raises(DegenerateFitError):
            estimate_term_scaling(uniform4, cfg)

    def test_raw_fluctuation_slope(self, bern011):
        cfg = McConfig(samples=10_000, seed=SEED, n_grid=(4, 16, 64, 400), max_k=2, alpha=ALPHA_011)
        estimates = estimate_term_scaling(bern011, cfg)
        assert [e.k for e in estimates] == [1, 2]
        assert [e.expected for e in estimates] == [0.5, 0.0]
        assert estimates[0].slope == pytest.approx(0.5, abs=0.05)
        assert all(e.stderr >= 0 for e in estimates)

    @pytest.mark.slow
    def test_resonance_slopes(self, bern011):
        cfg = McConfig(samples=10**5, seed=SEED, alpha=ALPHA_011, max_k=3)
        estimates = estimate_term_scaling(bern011, cfg)
        for estimate in estimates:
            assert estimate.deviation <= 0.1, estimate


class TestQuantiles:
    def test_insufficient_samples(self, bern011):
        with pytest.raises(InsufficientSamplesError):
            empirical_q_quantile(bern011, 50, 0.01, McConfig(samples=9_999, seed=SEED))

    def test_eps_domain(self, bern011):
        with pytest.raises(DomainError):
            empirical_q_quantile(bern011, 50, 1.0, McConfig(samples=1000, seed=SEED))

    def test_undeformed_quantile_against_spectrum(self, bern011):
        n, eps, samples = 50, 0.1, 20_000
        estimate = empirical_q_quantile(bern011, n, eps, McConfig(samples=samples, seed=SEED))
        spec = binary_spectrum(0.11, n)
        band = dkw_epsilon(samples, 0.999)
        assert spectrum_cdf(spec, estimate + 1e-9) >= 1 - eps - band
        assert spectrum_cdf(spec, estimate - 1e-9) <= 1 - eps + band
        assert abs(estimate - exact_source_limit(spec, eps)) <= 2 * math.log(0.89 / 0.11) + 1e-9

    def test_deformed_quantile_against_transformed_spectrum(self, bern011):
        n, eps, samples = 500, 0.01, 20_000
        cfg = McConfig(samples=samples, seed=SEED, alpha=ALPHA_011)
        estimate = empirical_q_quantile(bern011, n, eps, cfg)
        mapped = transform_spectrum(
            binary_spectrum(0.11, n), bern011, scaling_q(ScalingLaw(ALPHA_011), n)
        )
        band = dkw_epsilon(samples, 0.999)
        assert spectrum_cdf(mapped, estimate + 1e-8) >= 1 - eps - band
        assert spectrum_cdf(mapped, estimate - 1e-8) <= 1 - eps + band

    def test_median(self, bern011):
        cfg = McConfig(samples=1000, seed=SEED)
        median = empirical_q_quantile(bern011, 40, 0.5, cfg)
        s_n = np.sort(draw_fluctuations(bern011, 40, cfg))
        assert median == pytest.approx(s_n[499] + 40 * H1_011, abs=1e-5)

    def test_empirical_cdf_within_dkw_band(self, bern011):
        n, samples = 100, 20_000
        cfg = McConfig(samples=samples, seed=SEED)
        spec = binary_spectrum(0.11, n)
        lo, hi = spec.values()[0], spec.values()[-1]
        levels = np.linspace(lo, 0.5 * (lo + hi), 20)
        empirical = empirical_cdf(bern011, n, levels, cfg)
        exact = np.array([spectrum_cdf(spec, level) for level in levels])
        assert np.max(np.abs(empirical - exact)) <= dkw_epsilon(samples, 0.999)

    def test_dkw_epsilon(self):
        assert dkw_epsilon(10_000, 0.95) == pytest.approx(
            math.sqrt(math.log(40.0) / 20_000), rel=1e-12
        )
        with pytest.raises(DomainError):
            dkw_epsilon(100, 1.0)
