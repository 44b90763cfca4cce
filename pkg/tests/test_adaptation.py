"""Round-based tuning: eta mixing, variance estimation, round mechanics."""

import math

import numpy as np
import pytest

import automala as am


class TestSampleEta:
    def test_equal_thirds_under_defaults(self):
        rng = np.random.default_rng(0)
        draws = np.array([am.sample_eta(rng) for _ in range(10 ** 6)])
        assert np.mean(draws == 0.0) == pytest.approx(1.0 / 3.0, abs=0.01)
        assert np.mean(draws == 1.0) == pytest.approx(1.0 / 3.0, abs=0.01)
        assert np.mean((draws > 0.0) & (draws < 1.0)) == pytest.approx(1.0 / 3.0, abs=0.01)

    def test_degenerate_single_mode(self):
        rng = np.random.default_rng(1)
        assert all(am.sample_eta(rng, p=1.0, m=1.0) == 1.0 for _ in range(1000))

    def test_pure_beta_is_uniform(self):
        rng = np.random.default_rng(2)
        draws = np.array([am.sample_eta(rng, m=0.0) for _ in range(10 ** 6)])
        assert draws.mean() == pytest.approx(0.5, abs=0.002)

    def test_parameter_validation(self):
        rng = np.random.default_rng(3)
        with pytest.raises(ValueError):
            am.sample_eta(rng, alpha_tilde=0.0)
        with pytest.raises(ValueError):
            am.sample_eta(rng, p=1.5)
        with pytest.raises(ValueError):
            am.sample_eta(rng, m=-0.1)

    def test_presets_cover_modes(self):
        rng = np.random.default_rng(4)
        single = am.PRECONDITIONER_PRESETS["single"]
        identity = am.PRECONDITIONER_PRESETS["identity"]
        assert all(
            am.sample_eta(rng, single.alpha, single.beta, single.p, single.m) == 1.0
            for _ in range(100)
        )
        assert all(
            am.sample_eta(rng, identity.alpha, identity.beta, identity.p, identity.m) == 0.0
            for _ in range(100)
        )


class TestMixPreconditioner:
    def test_zero_eta_is_identity(self):
        est = am.PreconditionerEstimate(np.array([2.0, 5.0]))
        mass = am.mix_preconditioner(est, 0.0)
        np.testing.assert_allclose(mass.inv_sqrt_scale, [1.0, 1.0])

    def test_full_eta_inverts_scales(self):
        est = am.PreconditionerEstimate(np.array([2.0, 4.0]))
        mass = am.mix_preconditioner(est, 1.0)
        np.testing.assert_allclose(mass.inv_sqrt_scale, [0.5, 0.25])

    def test_interior_eta_interpolates(self):
        est = am.PreconditionerEstimate(np.array([2.0]))
        mass = am.mix_preconditioner(est, 0.5)
        np.testing.assert_allclose(mass.inv_sqrt_scale, [0.75])
        # Momentum variance is the square of the mixed scale.
        rng = np.random.default_rng(5)
        draws = np.array([am.sample_momentum(mass, rng)[0] for _ in range(10 ** 5)])
        assert draws.var() == pytest.approx(0.5625, abs=0.02)

    def test_invalid_inputs(self):
        est = am.PreconditionerEstimate(np.array([2.0]))
        with pytest.raises(ValueError):
            am.mix_preconditioner(est, 1.5)
        with pytest.raises(ValueError):
            am.PreconditionerEstimate(np.array([0.0]))
        with pytest.raises(ValueError):
            am.PreconditionerEstimate(np.array([np.inf]))


class TestVarianceEstimation:
    def test_two_point_hand_value(self):
        np.testing.assert_allclose(am.estimate_diag_variance([[0.0], [2.0]]), [2.0])

    def test_constant_sequence_gives_zero(self):
        np.testing.assert_allclose(
            am.estimate_diag_variance([[1.5, -2.0]] * 10), [0.0, 0.0]
        )

    def test_iid_consistency(self):
        rng = np.random.default_rng(6)
        draws = rng.standard_normal((10 ** 5, 2))
        np.testing.assert_allclose(am.estimate_diag_variance(draws), 1.0, atol=0.02)

    def test_too_few_positions(self):
        with pytest.raises(ValueError):
            am.estimate_diag_variance([[1.0, 2.0]])


class TestRoundSchedule:
    def test_round_lengths_double(self):
        sched = am.RoundSchedule(5)
        assert [sched.round_length(r) for r in range(1, 6)] == [2, 4, 8, 16, 32]

    def test_validation(self):
        with pytest.raises(ValueError):
            am.RoundSchedule(0)
        with pytest.raises(ValueError):
            am.RoundSchedule(3, t_unadj=-1)
        with pytest.raises(ValueError):
            am.RoundSchedule(3, t_unadj=3)


class TestRunRound:
    def test_single_unadjusted_iteration(self):
        target = am.make_normal_iid(2)
        est = am.PreconditionerEstimate.identity(2)
        rng = np.random.default_rng(7)
        trace, eps_next = am.run_round(target, np.zeros(2), 1, 1.0, est, 1, rng)
        assert len(trace) == 1
        assert trace.accepted[0]
        assert eps_next == trace.eps_t[0]

    def test_refreshed_step_is_mean_of_eps_t(self):
        target = am.make_funnel(2, 2.0)
        est = am.PreconditionerEstimate.identity(2)
        rng = np.random.default_rng(8)
        trace, eps_next = am.run_round(target, np.zeros(2), 64, 1.0, est, 1, rng)
        assert eps_next == float(trace.eps_t.mean())

    def test_escape_from_tiny_initial_step(self):
        # The selector keeps doubling away from a far-too-small guess, so
        # the refreshed value climbs toward order-one steps.
        target = am.make_normal_iid(1)
        est = am.PreconditionerEstimate.identity(1)
        rng = np.random.default_rng(9)
        trace, eps_next = am.run_round(
            target, np.zeros(1), 2 ** 10, 2.0 ** -10, est, 1, rng
        )
        assert eps_next > 2.0 ** -10 * 8


class TestRunRounds:
    def test_single_round_matches_run_round(self):
        target = am.make_banana(2, 1.0)
        trace_a, history = am.run_rounds(
            target, np.zeros(2), am.RoundSchedule(1), np.random.default_rng(10)
        )
        est = am.PreconditionerEstimate.identity(2)
        trace_b, eps_next = am.run_round(
            target, np.zeros(2), 2, 1.0, est, 1, np.random.default_rng(10)
        )
        np.testing.assert_array_equal(trace_a.positions, trace_b.positions)
        assert history.rounds[0].eps_init == 1.0
        assert history.rounds[0].eps_init_next == eps_next

    def test_deterministic_replay(self):
        target = am.make_funnel(2, 2.0)
        runs = []
        for _ in range(2):
            trace, history = am.run_rounds(
                target, np.zeros(2), am.RoundSchedule(8), np.random.default_rng(11)
            )
            runs.append((trace, history))
        (t1, h1), (t2, h2) = runs
        np.testing.assert_array_equal(t1.positions, t2.positions)
        np.testing.assert_array_equal(t1.eps_t, t2.eps_t)
        for r1, r2 in zip(h1.rounds, h2.rounds):
            assert r1.eps_init == r2.eps_init
            assert r1.eps_init_next == r2.eps_init_next
            np.testing.assert_array_equal(r1.diag_std, r2.diag_std)
            np.testing.assert_array_equal(r1.diag_std_next, r2.diag_std_next)

    def test_initial_round_uses_unit_settings(self):
        target = am.make_normal_iid(3)
        _, history = am.run_rounds(
            target, np.zeros(3), am.RoundSchedule(4), np.random.default_rng(12)
        )
        first = history.rounds[0]
        assert first.eps_init == 1.0
        np.testing.assert_array_equal(first.diag_std, np.ones(3))
        assert [rec.n_iterations for rec in history.rounds] == [2, 4, 8, 16]

    def test_estimates_flow_between_rounds(self):
        target = am.make_normal_iid(2)
        _, history = am.run_rounds(
            target, np.zeros(2), am.RoundSchedule(6), np.random.default_rng(13)
        )
        for prev, cur in zip(history.rounds, history.rounds[1:]):
            assert cur.eps_init == prev.eps_init_next
            np.testing.assert_array_equal(cur.diag_std, prev.diag_std_next)

    def test_eps_init_stays_positive_and_finite(self):
        target = am.make_normal_iid(64)
        _, history = am.run_rounds(
            target, np.zeros(64), am.RoundSchedule(14), np.random.default_rng(14)
        )
        for rec in history.rounds:
            assert 0.0 < rec.eps_init < math.inf
            assert 0.0 < rec.eps_init_next < math.inf

    def test_degenerate_variance_floored_with_warning(self):
        # The tiny axis of an extreme anisotropic target moves at scales
        # whose sample variance over a 2-iteration round underflows the
        # floor; tuning must keep going rather than fail.
        target = am.make_anisotropic_normal(7)
        with pytest.warns(RuntimeWarning, match="floored"):
            _, history = am.run_rounds(
                target, np.zeros(2), am.RoundSchedule(3), np.random.default_rng(15)
            )
        for rec in history.rounds:
            assert np.all(rec.diag_std_next > 0.0)

    def test_total_leapfrog_accounting(self):
        target = am.make_normal_iid(2)
        trace, history = am.run_rounds(
            target, np.zeros(2), am.RoundSchedule(5), np.random.default_rng(16)
        )
        assert history.rounds[-1].n_leapfrog == trace.n_leapfrog_total
        assert history.n_leapfrog_total == sum(r.n_leapfrog for r in history.rounds)
        assert history.n_leapfrog_total > trace.n_leapfrog_total
