import math

import numpy as np
import pytest
from scipy import stats

from horizonpi.dgp import (
    BetaSpec,
    DgpSpec,
    draw_beta,
    exp_weights,
    exp_weights_raw,
    gen_ar1,
    gen_deterministic_covariates,
    gen_longmem,
    gen_lstar,
    gen_stochastic_covariates,
    logistic_transition,
    longmem_from_innovations,
    sample_alpha_stable,
    simulate_errors,
)
from horizonpi.errors import (
    AlphaOutOfRange,
    TooManyFrequencies,
    TruncationTooSmall,
    UnstableSpec,
)


def sample_acf(x, lag):
    x = x - x.mean()
    return float(x[:-lag] @ x[lag:] / (x @ x))


def hill_index(draws, top_frac=0.01):
    """Hill tail-index estimator on the top fraction of |draws|."""
    a = np.sort(np.abs(draws))[::-1]
    k = int(len(a) * top_frac)
    return 1.0 / float(np.mean(np.log(a[:k] / a[k])))


class TestAlphaStable:
    def test_alpha2_is_gaussian_variance_two(self):
        draws = sample_alpha_stable(2.0, np.random.default_rng(0), size=10**6)
        assert 1.98 <= draws.var() <= 2.02

    def test_alpha2_ks_normality(self):
        draws = sample_alpha_stable(2.0, np.random.default_rng(1), size=10**5)
        _, pval = stats.kstest(draws, "norm", args=(0.0, math.sqrt(2.0)))
        assert pval > 0.01

    def test_hill_index_alpha_15(self):
        draws = sample_alpha_stable(1.5, np.random.default_rng(2), size=10**6)
        assert 1.3 <= hill_index(draws) <= 1.7

    def test_symmetry(self):
        draws = sample_alpha_stable(1.5, np.random.default_rng(3), size=10**6)
        assert abs(float(np.median(draws))) < 0.01

    def test_alpha1_is_cauchy(self):
        # standard Cauchy IQR = 2
        draws = sample_alpha_stable(1.0, np.random.default_rng(4), size=10**5)
        q75, q25 = np.quantile(draws, [0.75, 0.25])
        assert abs((q75 - q25) - 2.0) < 0.05

    def test_scalar_draw(self):
        x = sample_alpha_stable(1.5, np.random.default_rng(5))
        assert isinstance(x, float)

    def test_range_validation(self):
        rng = np.random.default_rng(6)
        for bad in (0.0, -1.0, 2.5):
            with pytest.raises(AlphaOutOfRange):
                sample_alpha_stable(bad, rng)


class TestLogisticTransition:
    def test_midpoint(self):
        assert logistic_transition(3.0, 0.7, 3.0) == 0.5

    def test_saturation(self):
        assert logistic_transition(1e6 / 0.05, 0.05, 0.0) > 1 - 1e-6
        assert logistic_transition(-1e6 / 0.05, 0.05, 0.0) < 1e-6

    def test_paper_parameters(self):
        assert logistic_transition(0.0, 0.05, 0.0) == 0.5

    def test_monotone(self):
        vals = logistic_transition(np.linspace(-50, 50, 101), 0.05, 0.0)
        assert np.all(np.diff(vals) > 0)


class TestGenAr1:
    def test_phi_zero_is_iid(self):
        spec = DgpSpec(kind="ar1", n=10**5, phi1=0.0, sigma=1.0, alpha_star=2.0)
        e = gen_ar1(spec, np.random.default_rng(7))
        assert abs(sample_acf(e, 1)) < 0.01

    def test_lag1_autocorrelation(self):
        spec = DgpSpec(kind="ar1", n=10**5, phi1=0.6, sigma=1.0, alpha_star=2.0)
        e = gen_ar1(spec, np.random.default_rng(8))
        assert 0.58 <= sample_acf(e, 1) <= 0.62

    def test_paper_parameters_sane(self):
        spec = DgpSpec(kind="ar1", n=10**4)  # sigma=54.1, alpha*=1.5
        e = gen_ar1(spec, np.random.default_rng(9))
        assert np.isfinite(e).all()
        assert 20 <= np.median(np.abs(e)) <= 200

    def test_stability_validation(self):
        with pytest.raises(UnstableSpec):
            DgpSpec(kind="ar1", n=10, phi1=1.0)

    def test_seed_determinism(self):
        spec = DgpSpec(kind="ar1", n=100)
        a = gen_ar1(spec, np.random.default_rng(10))
        b = gen_ar1(spec, np.random.default_rng(10))
        assert np.array_equal(a, b)


class TestGenLongmem:
    def test_effectively_white_for_steep_decay(self):
        spec = DgpSpec(kind="longmem", n=10**5, gamma=-10.0, alpha_star=2.0,
                       sigma=1.0, truncation_J=1000)
        e = gen_longmem(spec, np.random.default_rng(11))
        assert abs(sample_acf(e, 1)) < 0.02

    def test_slow_decay_vs_ar1(self):
        spec = DgpSpec(kind="longmem", n=10**5, gamma=-0.8, alpha_star=2.0,
                       sigma=1.0, truncation_J=10**4)
        e = gen_longmem(spec, np.random.default_rng(12))
        assert sample_acf(e, 100) > 0.6**100

    def test_zero_innovations(self):
        spec = DgpSpec(kind="longmem", n=50, truncation_J=1000, gamma=-1.5)
        out = longmem_from_innovations(spec, np.zeros(50 + 1000))
        assert np.all(out == 0.0)

    def test_linearity_in_innovations(self):
        spec = DgpSpec(kind="longmem", n=80, truncation_J=2000, gamma=-1.5)
        eps = np.random.default_rng(13).standard_normal(80 + 2000)
        assert np.allclose(
            longmem_from_innovations(spec, 3.0 * eps),
            3.0 * longmem_from_innovations(spec, eps),
            rtol=1e-12,
        )

    def test_matches_direct_sum(self):
        spec = DgpSpec(kind="longmem", n=5, truncation_J=1000, gamma=-1.2, sigma=2.0)
        eps = np.random.default_rng(14).standard_normal(1005)
        out = longmem_from_innovations(spec, eps)
        J = spec.truncation_J
        for i in range(5):
            direct = 2.0 * sum(
                (j + 1.0) ** -1.2 * eps[J + i - j] for j in range(J + 1)
            )
            assert abs(out[i] - direct) < 1e-10

    def test_truncation_guard(self):
        bad = DgpSpec(kind="longmem", n=100, gamma=-0.6, truncation_J=1000)
        with pytest.raises(TruncationTooSmall):
            gen_longmem(bad, np.random.default_rng(15))
        ok = DgpSpec(kind="longmem", n=100, gamma=-0.8, truncation_J=10**4)
        gen_longmem(ok, np.random.default_rng(16))

    def test_gamma_validation(self):
        with pytest.raises(ValueError):
            DgpSpec(kind="longmem", n=10, gamma=-0.4)


class TestGenLstar:
    def test_delta_zero_reduces_to_ar1_with_half_phi2(self):
        spec = DgpSpec(kind="lstar", n=10**5, phi1=0.6, phi2=-0.3, delta=0.0,
                       sigma=1.0, alpha_star=2.0)
        e = gen_lstar(spec, np.random.default_rng(17))
        target = 0.6 - 0.15
        assert abs(sample_acf(e, 1) - target) < 0.02

    def test_phi2_zero_path_identical_to_ar1(self):
        ls = DgpSpec(kind="lstar", n=5000, phi1=0.6, phi2=0.0, sigma=1.0, alpha_star=2.0)
        ar = DgpSpec(kind="ar1", n=5000, phi1=0.6, sigma=1.0, alpha_star=2.0)
        a = gen_lstar(ls, np.random.default_rng(18))
        b = gen_ar1(ar, np.random.default_rng(18))
        assert np.array_equal(a, b)

    def test_paper_parameters_finite(self):
        spec = DgpSpec(kind="lstar", n=5000)
        e = gen_lstar(spec, np.random.default_rng(19))
        assert np.isfinite(e).all()

    def test_unstable_spec(self):
        spec = DgpSpec(kind="lstar", n=10, phi1=0.8, phi2=0.4)
        with pytest.raises(UnstableSpec):
            gen_lstar(spec, np.random.default_rng(20))

    def test_dispatcher(self):
        spec = DgpSpec(kind="lstar", n=200)
        a = simulate_errors(spec, np.random.default_rng(21))
        b = gen_lstar(spec, np.random.default_rng(21))
        assert np.array_equal(a, b)


class TestDeterministicCovariates:
    def test_weekly_periodicity_exact(self):
        X = gen_deterministic_covariates(400, 1)
        assert X.values[0, 0] == X.values[168, 0]
        assert X.values[13, 1] == X.values[13 + 168, 1]

    def test_fourier_orthogonality_over_week(self):
        X = gen_deterministic_covariates(168, 10)
        sums = X.values.sum(axis=0)
        assert np.max(np.abs(sums[::2])) < 1e-9   # sin columns
        assert np.max(np.abs(sums[1::2])) < 1e-9  # cos columns

    def test_full_set_is_170_columns(self):
        X = gen_deterministic_covariates(336, 84, include_weekend_dummies=True)
        assert X.p == 170
        assert X.col_names[-2:] == ["d_sat", "d_sun"]

    def test_weekend_dummies_day_mapping(self):
        X = gen_deterministic_covariates(24 * 7, 0, include_weekend_dummies=True)
        sat, sun = X.values[:, 0], X.values[:, 1]
        assert sat[24 * 5 : 24 * 6].sum() == 24
        assert sun[24 * 6 :].sum() == 24
        assert sat.sum() == 24 and sun.sum() == 24

    def test_too_many_frequencies(self):
        with pytest.raises(TooManyFrequencies):
            gen_deterministic_covariates(100, 85)
        gen_deterministic_covariates(100, 167, base_period=336)
        with pytest.raises(TooManyFrequencies):
            gen_deterministic_covariates(100, 169, base_period=336)


class TestStochasticCovariates:
    def test_uncorrelated_when_white(self):
        X = gen_stochastic_covariates(10**4, q=20, ar_coef=0.0, rng=np.random.default_rng(22))
        corr = np.corrcoef(X.values.T)
        np.fill_diagonal(corr, 0.0)
        assert np.abs(corr).max() < 0.05

    def test_default_count_matches_weather_series(self):
        X = gen_stochastic_covariates(50, rng=np.random.default_rng(23))
        assert X.p == 151

    def test_standardized_output(self):
        X = gen_stochastic_covariates(500, q=5, ar_coef=0.9, rng=np.random.default_rng(24))
        assert X.standardized
        assert np.all(np.abs(X.values.mean(axis=0)) < 1e-10)
        assert np.all(np.abs(X.values.std(axis=0, ddof=1) - 1) < 1e-8)

    def test_seed_determinism(self):
        a = gen_stochastic_covariates(100, q=3, rng=np.random.default_rng(25))
        b = gen_stochastic_covariates(100, q=3, rng=np.random.default_rng(25))
        assert np.array_equal(a.values, b.values)

    def test_persistence(self):
        X = gen_stochastic_covariates(10**4, q=1, ar_coef=0.9, rng=np.random.default_rng(26))
        assert 0.85 <= sample_acf(X.values[:, 0], 1) <= 0.95


class TestDrawBeta:
    def test_full_sparsity_is_zero_vector(self):
        beta = draw_beta(BetaSpec(p=100, sparsity_pct=100.0, dist="uniform", rng_seed=0))
        assert np.all(beta == 0.0)

    def test_count_at_99pct_of_487(self):
        beta = draw_beta(BetaSpec(p=487, sparsity_pct=99.0, dist="uniform", rng_seed=1))
        assert int((beta != 0).sum()) == 5

    def test_rounding_rule(self):
        spec = BetaSpec(p=10, sparsity_pct=85.0, dist="uniform", rng_seed=2)
        assert spec.n_nonzero == int(np.rint(1.5))

    def test_uniform_support(self):
        beta = draw_beta(BetaSpec(p=200, sparsity_pct=50.0, dist="uniform", rng_seed=3))
        nz = beta[beta != 0]
        assert np.all(np.abs(nz) <= 1.0)

    def test_fixed_across_calls(self):
        spec = BetaSpec(p=50, sparsity_pct=90.0, dist="cauchy", rng_seed=4)
        assert np.array_equal(draw_beta(spec), draw_beta(spec))

    def test_different_seeds_differ(self):
        a = draw_beta(BetaSpec(p=50, sparsity_pct=50.0, dist="uniform", rng_seed=5))
        b = draw_beta(BetaSpec(p=50, sparsity_pct=50.0, dist="uniform", rng_seed=6))
        assert not np.array_equal(a, b)


class TestExpWeights:
    def test_printed_formula_values(self):
        raw = exp_weights_raw(6, 0.8)
        assert raw[-1] == 1.0                      # t=1 term
        assert abs(raw[-2] - 0.8 * 0.2 / 0.36) < 1e-12  # t=2 term

    def test_monotone_most_recent_largest(self):
        w = exp_weights(50, 0.8)
        assert np.all(np.diff(w.v) >= 0)

    def test_normalized_to_n(self):
        w = exp_weights(30, 0.8)
        assert abs(w.v.sum() - 30.0) < 1e-10

    def test_delta_validation(self):
        with pytest.raises(ValueError):
            exp_weights(10, 1.0)
        with pytest.raises(ValueError):
            exp_weights(10, 0.0)
