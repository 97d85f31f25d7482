import math
import numpy as np
import pytest

from scipy import integrate, stats

from segsignal import analytics
from segsignal import (ConfigurationError, NoiseFamily, NoiseSpec, fit_rate, hellinger_affinity_dd, hellinger_affinity_rd,
                       lower_bound_s0, noise_affinity, one_cp_moment_bound_rd, one_cp_tail_bound, risk_floor,
                       two_step_tail_term)


class TestAffinities:
    def test_regular_design_values(self) -> None:
        assert hellinger_affinity_dd(0, 0.3) == 1.0
        assert hellinger_affinity_dd(1, 1.0) == pytest.approx(0.8824969025845955)
        assert hellinger_affinity_dd(8, 1.0) == pytest.approx(math.exp(-1))

    @pytest.mark.parametrize("sigma", [0.25, 0.5, 1.0, 2.0])
    def test_regular_design_matches_quadrature(self, sigma) -> None:
        phi      = stats.norm(0, sigma).pdf
        value, _ = integrate.quad(lambda t: math.sqrt(phi(t) * phi(t - 1)), -12 * sigma, 1 + 12 * sigma,
                                  points=[0.0, 0.5, 1.0], limit=200, epsabs=1e-10)
        assert hellinger_affinity_dd(1, sigma) == pytest.approx(value, abs=1e-6)
        assert hellinger_affinity_dd(3, sigma) == pytest.approx(value ** 3, abs=1e-6)

    def test_regular_design_tensorizes(self) -> None:
        for k1, k2 in [(1, 2), (3, 5), (0, 7)]:
            assert hellinger_affinity_dd(k1 + k2, 0.7) == pytest.approx(hellinger_affinity_dd(k1, 0.7) * hellinger_affinity_dd(k2, 0.7))

    def test_random_design_values(self) -> None:
        assert hellinger_affinity_rd(0.0, 0.5, 10) == 1.0
        assert hellinger_affinity_rd(1.0, 1.0, 1) == pytest.approx(math.exp(-1 / 8))
        expected = (1 - 0.2 * (1 - math.exp(-1 / 8))) ** 2
        assert hellinger_affinity_rd(0.2, 1.0, 2) == pytest.approx(expected)
        assert expected == pytest.approx(0.95355, abs=1e-5)

    def test_random_design_is_monotone(self) -> None:
        deltas = np.linspace(0, 1, 100)
        for sigma in (0.25, 1.0):
            for n in (1, 10, 100):
                values = [hellinger_affinity_rd(float(d), sigma, n) for d in deltas]
                assert all(a >= b for a, b in zip(values, values[1:]))
                assert all(hellinger_affinity_rd(float(d), sigma, n + 1) <= v for d, v in zip(deltas, values))

    def test_random_design_increases_with_sigma(self) -> None:
        sigmas = np.linspace(0.1, 4, 100)
        for delta, n in [(0.2, 2), (0.5, 10), (1.0, 1)]:
            values = [hellinger_affinity_rd(delta, float(s), n) for s in sigmas]
            assert all(a < b for a, b in zip(values, values[1:]))

    def test_random_design_matches_simulation(self) -> None:
        # segments [0,0.2] and the empty one: K points of a uniform design land in
        # the symmetric difference and the conditional affinity is exp(-K/8)
        rng      = np.random.default_rng(11)
        points   = rng.uniform(0, 1, (200000, 2))
        factors  = np.exp(-np.count_nonzero(points <= 0.2, axis=1) / 8.0)
        stderr   = factors.std(ddof=1) / math.sqrt(factors.size)
        assert abs(factors.mean() - hellinger_affinity_rd(0.2, 1.0, 2)) <= 5 * stderr

    def test_rejects_bad_arguments(self) -> None:
        with pytest.raises(ConfigurationError):
            hellinger_affinity_dd(-1, 1.0)
        with pytest.raises(ConfigurationError):
            hellinger_affinity_dd(1, 0.0)
        with pytest.raises(ConfigurationError):
            hellinger_affinity_rd(1.5, 1.0, 3)

    def test_noise_affinity(self) -> None:
        gaussian = noise_affinity(NoiseSpec(NoiseFamily.GAUSSIAN, 1.0))
        assert not gaussian.approximate
        assert gaussian.value == hellinger_affinity_dd(1, 1.0)
        for family, sigma in [(NoiseFamily.UNIFORM, 1.0), (NoiseFamily.RADEMACHER, 0.5)]:
            estimate = noise_affinity(NoiseSpec(family, sigma), rng=np.random.default_rng(5))
            assert estimate.approximate
            assert abs(estimate.value - 0.5) <= 5 * estimate.stderr + 1e-12

    def test_testing_error_floor(self) -> None:
        assert analytics.testing_error_floor(1.0) == 0.5
        assert analytics.testing_error_floor(hellinger_affinity_dd(8, 1.0)) == pytest.approx(0.5 * math.exp(-2))
        with pytest.raises(ConfigurationError):
            analytics.testing_error_floor(1.5)


class TestBounds:
    def test_tail_bound_values(self) -> None:
        assert one_cp_tail_bound(8.0, 1.0) == 1.0
        assert one_cp_tail_bound(80.0, 0.5) == pytest.approx(2.159e-17, rel=1e-3)
        sigma = 0.7
        c0    = 2 / (1 - math.exp(-1 / (8 * sigma ** 2)))
        assert one_cp_tail_bound(200 * sigma ** 2, sigma) <= c0 * math.exp(-25) * (1 + 1e-12)

    def test_tail_bound_decreases(self) -> None:
        values = [one_cp_tail_bound(x, 0.5) for x in np.linspace(1, 100, 50)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_moment_bound(self) -> None:
        sigma, n = 0.5, 100
        assert one_cp_moment_bound_rd(1, sigma, n) == pytest.approx(2 * (2 + 16 * sigma ** 2) * 2 * 16 * sigma ** 2 / n)
        assert one_cp_moment_bound_rd(2, sigma, 2 * n) < one_cp_moment_bound_rd(2, sigma, n)
        with pytest.raises(ConfigurationError):
            one_cp_moment_bound_rd(0, sigma, n)

    def test_two_step_tail_term(self) -> None:
        values = [two_step_tail_term(x, 0.25, 0.2) for x in (1e2, 1e4, 1e5, 1e6)]
        assert values[0] == 1.0
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-10

    def test_lower_bound(self) -> None:
        assert lower_bound_s0(1) == 0.125
        assert lower_bound_s0(8) == 1 / 64
        assert lower_bound_s0(1000) == pytest.approx(1.25e-4)
        with pytest.raises(ConfigurationError):
            lower_bound_s0(0)


class TestFitRate:
    def test_exact_power_law(self) -> None:
        fit = fit_rate([100, 1000], [0.1, 0.01])
        assert fit.slope == pytest.approx(-1.0, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.risk_times_n == pytest.approx([10.0, 10.0])

    def test_logarithmic_factor_flattens_slope(self) -> None:
        ns  = [10, 100, 1000]
        fit = fit_rate(ns, [math.log(n) / n for n in ns])
        expected = -1 + (math.log(math.log(1000)) - math.log(math.log(10))) / (math.log(1000) - math.log(10))
        assert fit.slope == pytest.approx(expected)
        assert -0.8 < fit.slope < -0.7
        assert fit.risk_times_n_over_log == pytest.approx([1.0, 1.0, 1.0])

    def test_constant_risks(self) -> None:
        fit = fit_rate([10, 100, 1000], [0.3, 0.3, 0.3])
        assert fit.slope == 0.0
        assert fit.r_squared == 1.0
        assert fit.zero_variance

    def test_rejects_bad_input(self) -> None:
        with pytest.raises(ConfigurationError):
            fit_rate([10], [0.1])
        with pytest.raises(ConfigurationError):
            fit_rate([10, 100], [0.1, 0.0])
        with pytest.raises(ConfigurationError):
            fit_rate([10, 100], [0.1])

    def test_risk_floor(self) -> None:
        assert risk_floor(1000, 500) == 1e-6
