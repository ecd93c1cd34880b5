import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from hulllab.experiments import (
    EventRates,
    ExperimentConfig,
    berry_esseen_curve,
    binomial_poisson_gap,
    buchta_check,
    buchta_rhs,
    efron_check,
    ks_noise_width,
    ks_to_normal,
    predicted_moments,
    run_experiment,
    vervaat_check,
    vervaat_default_grid,
    vervaat_values,
)
from hulllab.floating_body import EventParams
from hulllab.geometry import normalize_to_unit_area, Polygon, unit_area_triangle, unit_square
from hulllab.sampling import RandomStream


class TestPredictedMoments:
    def test_triangle_reference_values(self, triangle):
        # ell=3, all corner ratios 1: mean = 2 log n + 2 gamma
        p = predicted_moments(triangle, 1e5)
        assert p.mean == pytest.approx(24.180, abs=5e-4)
        assert p.variance == pytest.approx(11.240, abs=5e-4)

    def test_square_reference_value(self, square):
        p = predicted_moments(square, 1e4)
        assert p.mean == pytest.approx(24.252, abs=5e-4)

    def test_scale_invariance(self, pentagon):
        big = Polygon(pentagon.vertices * 7.3)
        a = predicted_moments(big, 1234.0)
        b = predicted_moments(normalize_to_unit_area(big), 1234.0)
        assert a.mean == pytest.approx(b.mean, rel=1e-12)
        assert a.variance == pytest.approx(b.variance, rel=1e-12)

    def test_positive_variance(self, square):
        assert predicted_moments(square, 10.0).variance > 0

    def test_model_tag_same_values(self, square):
        a = predicted_moments(square, 500.0, "binomial")
        b = predicted_moments(square, 500.0, "poisson")
        assert a.mean == b.mean and a.variance == b.variance


class TestRunExperiment:
    def test_binomial_three_points(self, square):
        cfg = ExperimentConfig(square, "binomial", 3, 500, root_seed=1)
        s = run_experiment(cfg)
        assert s.mean == 3.0 and s.variance == 0.0
        assert math.isnan(s.ks)

    def test_poisson_tiny_mean_mass_at_zero(self, square):
        cfg = ExperimentConfig(square, "poisson", 0.1, 20_000, root_seed=2, keep_sample=True)
        s = run_experiment(cfg)
        p0 = float((s.vertex_counts == 0).mean())
        target = math.exp(-0.1)
        se = math.sqrt(target * (1 - target) / cfg.reps)
        assert abs(p0 - target) < 4 * se

    def test_rerun_bit_identical(self, triangle):
        cfg = ExperimentConfig(triangle, "binomial", 100, 300, root_seed=3, keep_sample=True)
        a = run_experiment(cfg)
        b = run_experiment(cfg)
        assert np.array_equal(a.vertex_counts, b.vertex_counts)
        assert a.mean == b.mean and a.ks == b.ks

    def test_thread_count_invariance(self, triangle):
        base = ExperimentConfig(triangle, "binomial", 50, 200, root_seed=4, keep_sample=True)
        seq = run_experiment(base)
        par = run_experiment(
            ExperimentConfig(triangle, "binomial", 50, 200, root_seed=4,
                             keep_sample=True, threads=2)
        )
        assert np.array_equal(seq.vertex_counts, par.vertex_counts)

    def test_mean_tracks_prediction(self, triangle):
        cfg = ExperimentConfig(triangle, "binomial", 2000, 2000, root_seed=5)
        s = run_experiment(cfg)
        pred = predicted_moments(triangle, 2000)
        assert abs(s.mean - pred.mean) < 4 * s.stderr_mean + 0.5

    def test_event_rates_collected(self, square):
        cfg = ExperimentConfig(
            square, "poisson", 1000.0, 100, root_seed=6,
            event_params=EventParams(),
        )
        s = run_experiment(cfg)
        assert isinstance(s.event_rates, EventRates)
        assert 0.0 <= s.event_rates.regular <= 1.0
        assert s.event_rates.covered > 0.9
        assert s.event_rates.wet_count_ok == 1.0

    def test_config_validation(self, square):
        with pytest.raises(ValueError):
            ExperimentConfig(square, "binomial", 2, 100)
        with pytest.raises(ValueError):
            ExperimentConfig(square, "binomial", 10.5, 100)
        with pytest.raises(ValueError):
            ExperimentConfig(square, "bogus", 10, 100)
        with pytest.raises(ValueError):
            ExperimentConfig(square, "poisson", 10.0, 1)

    def test_scale_invariant_counts_shared_stream(self, pentagon):
        doubled = Polygon(pentagon.vertices * 2.0)
        a = run_experiment(
            ExperimentConfig(pentagon, "binomial", 200, 100, root_seed=7, keep_sample=True)
        )
        b = run_experiment(
            ExperimentConfig(doubled, "binomial", 200, 100, root_seed=7, keep_sample=True)
        )
        assert np.array_equal(a.vertex_counts, b.vertex_counts)


class TestKs:
    def test_single_atom(self):
        assert ks_to_normal([0.0], 0.0, 1.0) == pytest.approx(0.5)

    def test_million_normal_draws(self):
        g = RandomStream(8).generator()
        z = g.standard_normal(1_000_000)
        assert ks_to_normal(z, 0.0, 1.0) < 0.002

    def test_matches_scipy_on_continuous_sample(self):
        g = RandomStream(9).generator()
        x = g.standard_normal(5000) * 1.3 + 0.2
        mine = ks_to_normal(x, 0.2, 1.3)
        ref = stats.kstest((x - 0.2) / 1.3, "norm").statistic
        assert mine == pytest.approx(ref, abs=1e-12)

    def test_lattice_atoms_both_sides(self):
        # for a fair coin at -1/+1 the sup gap sits at the atoms:
        # |Phi(-1) - 0|, |Phi(-1) - 1/2|, |Phi(1) - 1/2|, |Phi(1) - 1|
        x = np.array([-1.0, 1.0])
        expected = stats.norm.cdf(1.0) - 0.5
        assert ks_to_normal(x, 0.0, 1.0) == pytest.approx(expected, rel=1e-12)

    def test_shift_scale_invariance(self):
        g = RandomStream(10).generator()
        x = g.poisson(30.0, size=2000).astype(float)
        a = ks_to_normal(x, x.mean(), x.std())
        y = 5.0 * x - 7.0
        b = ks_to_normal(y, y.mean(), y.std())
        assert a == pytest.approx(b, abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            ks_to_normal([], 0.0, 1.0)
        with pytest.raises(ValueError):
            ks_to_normal([1.0], 0.0, 0.0)


class TestBerryEsseenCurve:
    def test_small_reps_warning(self, triangle):
        rows = berry_esseen_curve(triangle, [100.0], 10, RandomStream(11))
        assert rows[0].small_sample_warning
        assert ks_noise_width(10) > 0.4

    def test_rows_and_scaling(self, triangle):
        rows = berry_esseen_curve(
            triangle, [200.0, 2000.0], 2000, RandomStream(12)
        )
        for r in rows:
            assert r.ks_scaled == pytest.approx(r.ks * math.sqrt(math.log(r.n)))
            assert not r.small_sample_warning
            assert r.ks < 0.2

    def test_predicted_standardization_mode(self, triangle):
        rows = berry_esseen_curve(
            triangle, [500.0], 1000, RandomStream(13), standardize="predicted"
        )
        assert rows[0].ks < 0.3

    def test_n_must_exceed_e(self, triangle):
        with pytest.raises(ValueError):
            berry_esseen_curve(triangle, [2.0], 100, RandomStream(14))


class TestEfron:
    def test_exact_zero_n1_n2(self, square):
        for n in (1, 2):
            c = efron_check(square, n, 2000, RandomStream(15))
            assert c.lhs == 0.0 and c.rhs == 0.0

    def test_square_n10(self, square):
        c = efron_check(square, 10, 60_000, RandomStream(16))
        assert abs(c.diff) <= 4 * c.combined_stderr

    def test_residual_changes_sign(self, square):
        signs = set()
        for i in range(40):
            c = efron_check(square, 10, 1500, RandomStream(17, i))
            signs.add(c.diff > 0)
        assert signs == {True, False}


class TestBuchta:
    def test_rhs_exact_rational_n2(self):
        # frozen exact moments: E f0 at 3 points = 3 (deterministic);
        # E f0(P_4) = 4 - 11/9 per the square's Sylvester constant 11/144,
        # Var f0(P_4) = (11/36)(25/36); the identity gives exactly 0
        mean3 = Fraction(3)
        mean4 = Fraction(133, 36)
        var4 = Fraction(11, 36) * Fraction(25, 36)
        a = mean4**2 - Fraction(4, 3) * mean3**2
        b = 7 * mean4 - 8 * mean3
        assert var4 + a - b == 0
        assert buchta_rhs(2, float(mean3), float(mean4), float(var4)) == pytest.approx(
            0.0, abs=1e-15
        )

    def test_exact_zero_n1(self, square):
        c = buchta_check(square, 1, 2000, RandomStream(18))
        assert c.lhs == 0.0 and c.rhs == 0.0

    def test_square_n10(self, square):
        c = buchta_check(square, 10, 60_000, RandomStream(19))
        assert abs(c.diff) <= 4 * c.combined_stderr

    def test_rescaling_invariance_of_rhs(self, square):
        big = Polygon(square.vertices * 3.0)
        a = buchta_check(square, 5, 2000, RandomStream(20))
        b = buchta_check(big, 5, 2000, RandomStream(20))
        assert a.rhs == pytest.approx(b.rhs, rel=1e-12)
        assert a.lhs == pytest.approx(b.lhs, rel=1e-9)


class TestVervaat:
    def test_tiny_p_limit(self):
        c = vervaat_check(10, 1e-9, 0)
        assert c.total <= 2e-9

    def test_k0_example(self):
        c = vervaat_check(100, 0.01, 0)
        assert c.total <= 0.02

    def test_k2_large_np(self):
        c = vervaat_check(1000, 0.1, 2)
        assert c.total <= 2 * 1000 * 0.01 * (1 + 100)

    def test_k0_k1_full_grid(self):
        for n, p, k in vervaat_default_grid():
            if k == 2:
                continue
            assert vervaat_check(n, p, k).holds

    def test_k2_small_np_stated_bound_fails_derived_bound_holds(self):
        # the stated k=2 bound 2np^2(1+np) loses an np^2 against its own
        # derivation; at small np the exact sum ~ 3np^2 exceeds it
        v = vervaat_values(10, 0.001, 2)
        assert not v.holds
        assert v.total <= 3 * 10 * 0.001**2 + 2 * (10 * 0.001) ** 2 * 0.001

    def test_validation(self):
        with pytest.raises(ValueError):
            vervaat_values(0, 0.1, 0)
        with pytest.raises(ValueError):
            vervaat_values(10, 0.0, 0)
        with pytest.raises(ValueError):
            vervaat_values(10, 0.1, 3)


class TestModelGap:
    def test_gap_shrinks_with_n(self, square):
        g_small, se_small = binomial_poisson_gap(square, 30.0, 20_000, RandomStream(21))
        g_big, se_big = binomial_poisson_gap(square, 1000.0, 20_000, RandomStream(22))
        assert abs(g_big) < abs(g_small) + 2 * (se_small + se_big)
