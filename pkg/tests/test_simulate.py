"""Strategy simulation: distributional equivalences, budget bookkeeping,
bound dominance, and bit-level determinism."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slowthink import bounds
from slowthink.errors import RangeError, ResourceLimitError, ValidationError
from slowthink.models import AnswerModel, DecayModel, SelectorModel, WrongModel
from slowthink.simulate import (
    ORM_MAX,
    ORM_VOTE,
    SELF_CONSISTENCY,
    MonteCarloReport,
    ProcessConfig,
    StrategySpec,
    TrialResult,
    lookahead_gamma_sweep,
    lookahead_selection_success,
    lookahead_selection_trial,
    matching_bound,
    monte_carlo,
    run_beam,
    run_bon,
    run_lookahead,
    run_mcts_envelope,
    run_single_path,
    run_trial,
    steps_and_calls,
    verify_bounds,
    wilson_interval,
)

E_M3 = 0.049787068367863944
BON8_NOISELESS = 0.33538905027918684  # 1 - (1 - e^-3)^8

EXP1 = DecayModel.exponential(1.0)
IDEAL = SelectorModel.ideal()


def cfg_exp(L, selector=IDEAL, answer=1, noise=0.0, lam=1.0):
    return ProcessConfig(
        decay=DecayModel.exponential(lam),
        selector=selector,
        answer=AnswerModel(answer),
        L=L,
        score_noise_std=noise,
    )


def cfg_certain(L, selector=IDEAL):
    return ProcessConfig(
        decay=DecayModel.tabulated([1.0] * L), selector=selector, L=L
    )


def overlapping(a: MonteCarloReport, b: MonteCarloReport) -> bool:
    return a.ci_low <= b.ci_high and b.ci_low <= a.ci_high


class TestWilson:
    def test_certain_success_interval(self):
        lo, hi = wilson_interval(100, 100)
        assert lo > 0.96
        assert hi == 1.0

    def test_single_trial_spans(self):
        lo, hi = wilson_interval(0, 1)
        assert lo == 0.0 and hi > 0.5
        lo, hi = wilson_interval(1, 1)
        assert hi == 1.0 and lo < 0.5

    @given(st.integers(1, 100000), st.data())
    @settings(max_examples=200)
    def test_brackets_the_estimate(self, trials, data):
        successes = data.draw(st.integers(0, trials))
        lo, hi = wilson_interval(successes, trials)
        phat = successes / trials
        assert 0.0 <= lo <= phat <= hi <= 1.0

    def test_rejects_bad_counts(self):
        with pytest.raises(ValidationError):
            wilson_interval(5, 4)


class TestSinglePath:
    def test_impossible_step_never_succeeds(self):
        cfg = ProcessConfig(decay=DecayModel.tabulated([0.0]), L=1)
        rng = np.random.default_rng(0)
        assert all(not run_single_path(cfg, rng).success for _ in range(200))

    def test_certain_steps_always_succeed(self):
        cfg = cfg_certain(3)
        rng = np.random.default_rng(0)
        result = run_single_path(cfg, rng)
        assert result.success
        assert result.steps_generated == 3
        assert result.model_calls == 1

    def test_estimate_matches_product_law(self):
        report = monte_carlo(cfg_exp(2), StrategySpec.single_path(), 100_000, 42)
        assert report.ci_low <= E_M3 <= report.ci_high


class TestBon:
    def test_degenerate_matches_single_path(self):
        cfg = cfg_exp(2)
        a = monte_carlo(cfg, StrategySpec.bon(1, ORM_MAX), 20_000, 1)
        b = monte_carlo(cfg, StrategySpec.single_path(), 20_000, 2)
        assert overlapping(a, b)

    def test_certain_self_consistency(self):
        cfg = ProcessConfig(decay=DecayModel.tabulated([1.0]), L=1)
        rng = np.random.default_rng(0)
        for _ in range(50):
            assert run_bon(cfg, 5, SELF_CONSISTENCY, rng).success

    def test_noiseless_max_selection_matches_at_least_one_law(self):
        report = monte_carlo(cfg_exp(2), StrategySpec.bon(8, ORM_MAX), 100_000, 3)
        assert report.ci_low <= BON8_NOISELESS <= report.ci_high

    def test_nondecreasing_in_n_under_noiseless_selection(self):
        cfg = cfg_exp(3)
        reports = [
            monte_carlo(cfg, StrategySpec.bon(n, ORM_MAX), 20_000, 4)
            for n in (1, 2, 4, 8, 16, 32)
        ]
        for a, b in zip(reports, reports[1:]):
            half = (a.ci_high - a.ci_low) / 2 + (b.ci_high - b.ci_low) / 2
            assert b.estimate >= a.estimate - 1.5 * half

    def test_self_consistency_saturates_on_binary_answers(self):
        # one wrong label and per-path success < 0.5: majority voting cannot
        # gain from more samples
        cfg = cfg_exp(2, answer=1)
        reports = [
            monte_carlo(cfg, StrategySpec.bon(n, SELF_CONSISTENCY), 20_000, 5)
            for n in (1, 2, 4, 8, 16)
        ]
        for a, b in zip(reports, reports[1:]):
            half = (a.ci_high - a.ci_low) / 2 + (b.ci_high - b.ci_low) / 2
            assert b.estimate <= a.estimate + 1.5 * half

    def test_self_consistency_grows_on_diverse_answers(self):
        cfg = cfg_exp(2, answer=100)
        first = monte_carlo(cfg, StrategySpec.bon(1, SELF_CONSISTENCY), 20_000, 6)
        last = monte_carlo(cfg, StrategySpec.bon(16, SELF_CONSISTENCY), 20_000, 6)
        assert last.ci_low > first.ci_high

    def test_vote_beats_chance_with_mild_noise(self):
        cfg = cfg_exp(2, answer=100, noise=0.25)
        rep = monte_carlo(cfg, StrategySpec.bon(8, ORM_VOTE), 20_000, 7)
        single = monte_carlo(cfg, StrategySpec.single_path(), 20_000, 8)
        assert rep.ci_low > single.ci_high

    def test_budget_bookkeeping(self):
        cfg = cfg_exp(3)
        rng = np.random.default_rng(0)
        result = run_bon(cfg, 5, ORM_MAX, rng)
        assert result.steps_generated == 15
        assert result.model_calls == 5
        report = monte_carlo(cfg, StrategySpec.bon(5, ORM_MAX), 10, 0)
        assert report.mean_steps == 15.0
        assert report.mean_calls == 5.0


class TestBeam:
    def test_requires_k_at_least_b(self):
        with pytest.raises(ValidationError):
            StrategySpec.beam(1, 2)
        with pytest.raises(ValidationError):
            run_beam(cfg_exp(2), 1, 2, np.random.default_rng(0))

    def test_no_branching_matches_single_path(self):
        cfg = cfg_exp(2)
        a = monte_carlo(cfg, StrategySpec.beam(1, 1), 20_000, 9)
        b = monte_carlo(cfg, StrategySpec.single_path(), 20_000, 10)
        assert overlapping(a, b)

    def test_certain_steps_always_succeed(self):
        cfg = cfg_certain(2)
        rng = np.random.default_rng(0)
        for k, b in ((2, 2), (4, 2), (3, 1)):
            assert run_beam(cfg, k, b, rng).success

    def test_dominated_by_exact_bound(self):
        cfg = cfg_exp(2)
        report = monte_carlo(cfg, StrategySpec.beam(4, 2), 100_000, 11)
        bound = bounds.width_expansion_bound_exact(EXP1, IDEAL, 2, 4, 2)
        assert verify_bounds(report, bound)

    def test_noisy_selector_costs_success(self):
        noisy = SelectorModel.noisy_score(margin=1.0, noise_std=2.0)
        sharp = monte_carlo(cfg_exp(2), StrategySpec.beam(4, 2), 20_000, 12)
        fuzzy = monte_carlo(
            cfg_exp(2, selector=noisy), StrategySpec.beam(4, 2), 20_000, 12
        )
        assert fuzzy.estimate < sharp.estimate

    def test_constant_selector_certain_process(self):
        # all candidates correct: success is the chance every per-layer keep
        # and the final pick all fire
        cfg = cfg_certain(2, selector=SelectorModel.constant(0.5))
        report = monte_carlo(cfg, StrategySpec.beam(2, 2), 50_000, 13)
        lo, hi = wilson_interval(report.successes, report.trials)
        assert lo <= 0.5**3 <= hi

    def test_budget_bookkeeping(self):
        result = run_beam(cfg_exp(3), 4, 2, np.random.default_rng(0))
        assert result.steps_generated == 12
        assert result.model_calls == 12


class TestMctsEnvelope:
    def test_best_case_degenerates_to_single_path(self):
        cfg = cfg_exp(2)
        a = monte_carlo(cfg, StrategySpec.mcts_best(1), 20_000, 14)
        b = monte_carlo(cfg, StrategySpec.single_path(), 20_000, 15)
        assert overlapping(a, b)

    def test_worst_case_certain_tree(self):
        cfg = cfg_certain(1)
        result = run_mcts_envelope(cfg, 3, "worst", np.random.default_rng(0))
        assert result.success
        assert result.steps_generated == 3

    def test_worst_case_dominated_by_bound(self):
        cfg = cfg_exp(2)
        report = monte_carlo(cfg, StrategySpec.mcts_worst(2), 100_000, 16)
        bound = bounds.mcts_worst_bound(EXP1, IDEAL, 2, 2)
        assert verify_bounds(report, bound)

    def test_node_budget_is_enforced(self):
        cfg = cfg_exp(25)
        with pytest.raises(ResourceLimitError):
            run_mcts_envelope(cfg, 2, "worst", np.random.default_rng(0))
        with pytest.raises(ResourceLimitError):
            monte_carlo(cfg, StrategySpec.mcts_worst(2), 10, 0)

    def test_envelope_ordering_more_exploration_never_hurts(self):
        cfg = cfg_exp(3)
        single = monte_carlo(cfg, StrategySpec.single_path(), 50_000, 17)
        best = monte_carlo(cfg, StrategySpec.mcts_best(2), 50_000, 18)
        worst = monte_carlo(cfg, StrategySpec.mcts_worst(2), 50_000, 19)

        def halfwidth(r):
            return (r.ci_high - r.ci_low) / 2

        assert best.estimate >= single.estimate - 3 * (
            halfwidth(best) + halfwidth(single)
        )
        assert worst.estimate >= best.estimate - 3 * (
            halfwidth(worst) + halfwidth(best)
        )
        # with these parameters the ordering is strict
        assert worst.ci_low > single.ci_high

    def test_budget_bookkeeping(self):
        result = run_mcts_envelope(cfg_exp(3), 2, "worst", np.random.default_rng(0))
        assert result.steps_generated == 2 + 4 + 8
        report = monte_carlo(cfg_exp(3), StrategySpec.mcts_worst(2), 10, 0)
        assert report.mean_steps == 14.0


class TestLookahead:
    def test_certain_process_always_succeeds(self):
        cfg = ProcessConfig(decay=DecayModel.tabulated([1.0] * 6), L=2)
        for gamma in (0, 2, 4):
            result = run_lookahead(cfg, 2, gamma, np.random.default_rng(0))
            assert result.success

    def test_zero_rollout_matches_width_one_beam(self):
        # equivalence holds whenever both paths score candidates the same way:
        # mechanistically under a noisy-score selector, or noiselessly under
        # an ideal one
        noisy = SelectorModel.noisy_score(margin=1.0, noise_std=0.5)
        for cfg, seed in ((cfg_exp(2, selector=noisy), 20), (cfg_exp(2), 30)):
            a = monte_carlo(cfg, StrategySpec.lookahead(3, 0), 20_000, seed)
            b = monte_carlo(cfg, StrategySpec.beam(3, 1), 20_000, seed + 1)
            assert overlapping(a, b)

    def test_rollout_steps_counted_and_excludable(self):
        cfg = cfg_exp(2)
        counted = run_lookahead(cfg, 3, 2, np.random.default_rng(0))
        assert counted.steps_generated == 2 * 3 * 3
        excluded = run_lookahead(
            cfg, 3, 2, np.random.default_rng(0), count_rollout_steps=False
        )
        assert excluded.steps_generated == 2 * 3
        spec = StrategySpec.lookahead(3, 2, count_rollout_steps=False)
        assert steps_and_calls(cfg, spec) == (6, 6)

    def test_tabulated_depth_must_cover_rollouts(self):
        cfg = ProcessConfig(decay=DecayModel.tabulated([1.0, 1.0]), L=2)
        with pytest.raises(RangeError):
            run_lookahead(cfg, 2, 1, np.random.default_rng(0))


class TestLookaheadProbe:
    def test_trial_matches_product_law(self):
        wrong = WrongModel(math.e**3 / 2)
        rep = lookahead_selection_success(1.0, wrong, 1, 2, 100_000, 22)
        d = 3.0
        expected = min(math.exp(-d), 1.0) * max(1 - wrong.lambda_delta * math.exp(-d), 0.0)
        assert rep.ci_low <= expected <= rep.ci_high

    def test_sweep_peaks_at_analytic_optimum(self):
        wrong = WrongModel(math.e**3 / 2)
        sweep = lookahead_gamma_sweep(1.0, wrong, 1, range(7), 50_000, 23)
        best_gamma = max(sweep, key=lambda item: item[1].estimate)[0]
        star = bounds.optimal_rollout(wrong, 1)
        assert abs(best_gamma - star) <= 1.0

    def test_too_shallow_evaluation_never_distinguishes(self):
        wrong = WrongModel(math.e**3 / 2)
        rng = np.random.default_rng(0)
        # at depth 1 every wrong candidate still masquerades as plausible
        assert not any(
            lookahead_selection_trial(1.0, wrong, 1, 0, rng) for _ in range(500)
        )


class TestMonteCarloMachinery:
    def test_bit_identical_reports(self):
        cfg = cfg_exp(3, selector=SelectorModel.noisy_score(1.0, 0.5), answer=7, noise=0.3)
        for spec in (
            StrategySpec.single_path(),
            StrategySpec.bon(6, ORM_VOTE),
            StrategySpec.beam(4, 2),
            StrategySpec.mcts_worst(2),
            StrategySpec.lookahead(2, 1),
        ):
            a = monte_carlo(cfg, spec, 12_345, 99)
            b = monte_carlo(cfg, spec, 12_345, 99)
            assert a == b

    def test_block_layout_is_part_of_the_contract(self):
        # per-block streams: results depend on (trials, seed) only
        cfg = cfg_exp(2)
        a = monte_carlo(cfg, StrategySpec.single_path(), 70_000, 7)
        b = monte_carlo(cfg, StrategySpec.single_path(), 70_000, 7)
        assert a.successes == b.successes

    def test_single_trial_interval(self):
        report = monte_carlo(cfg_exp(1), StrategySpec.single_path(), 1, 0)
        assert report.estimate in (0.0, 1.0)
        assert report.ci_low <= report.estimate <= report.ci_high

    def test_certain_config(self):
        report = monte_carlo(cfg_certain(2), StrategySpec.single_path(), 100, 0)
        assert report.estimate == 1.0
        assert report.ci_low > 0.96

    def test_trials_must_be_positive(self):
        with pytest.raises(RangeError):
            monte_carlo(cfg_exp(1), StrategySpec.single_path(), 0, 0)

    def test_scalar_and_vector_paths_agree(self):
        cfg = cfg_exp(2, selector=SelectorModel.noisy_score(1.0, 0.5), answer=5, noise=0.25)
        for spec in (
            StrategySpec.single_path(),
            StrategySpec.bon(4, ORM_MAX),
            StrategySpec.bon(5, SELF_CONSISTENCY),
            StrategySpec.bon(5, ORM_VOTE),
            StrategySpec.beam(4, 2),
            StrategySpec.mcts_best(2),
            StrategySpec.mcts_worst(2),
            StrategySpec.lookahead(2, 1),
        ):
            rng = np.random.default_rng(1234)
            trials = 4000
            scalar_hits = sum(run_trial(cfg, spec, rng).success for _ in range(trials))
            lo_s, hi_s = wilson_interval(scalar_hits, trials)
            vector = monte_carlo(cfg, spec, trials, 4321)
            assert lo_s <= vector.ci_high and vector.ci_low <= hi_s, spec.describe()

    def test_ideal_constant_selectors_agree_with_scalar_beam(self):
        cfg = cfg_exp(2, selector=SelectorModel.constant(0.8))
        rng = np.random.default_rng(77)
        trials = 4000
        scalar_hits = sum(
            run_beam(cfg, 4, 2, rng).success for _ in range(trials)
        )
        lo_s, hi_s = wilson_interval(scalar_hits, trials)
        vector = monte_carlo(cfg, StrategySpec.beam(4, 2), trials, 78)
        assert lo_s <= vector.ci_high and vector.ci_low <= hi_s


class TestVerifyAndMatchingBounds:
    def test_below_bound_passes(self):
        report = MonteCarloReport(
            trials=1000, successes=40, estimate=0.04, ci_low=0.038, ci_high=0.042,
            mean_steps=2.0, mean_calls=1.0, seed=0,
        )
        assert verify_bounds(report, 0.0498)

    def test_interval_above_bound_fails(self):
        report = MonteCarloReport(
            trials=1000, successes=900, estimate=0.9, ci_low=0.89, ci_high=0.91,
            mean_steps=2.0, mean_calls=1.0, seed=0,
        )
        assert not verify_bounds(report, 0.5)

    def test_vacuous_bound_always_passes(self):
        report = MonteCarloReport(
            trials=10, successes=10, estimate=1.0, ci_low=0.72, ci_high=1.0,
            mean_steps=1.0, mean_calls=1.0, seed=0,
        )
        assert verify_bounds(report, 1.31)

    def test_matching_bound_dispatch(self):
        cfg = cfg_exp(2)
        assert matching_bound(cfg, StrategySpec.single_path()) == pytest.approx(
            E_M3, rel=1e-12
        )
        assert matching_bound(cfg, StrategySpec.bon(3, ORM_MAX)) == pytest.approx(
            bounds.bon_bound(EXP1, IDEAL, 2, 3), rel=1e-12
        )
        assert matching_bound(cfg, StrategySpec.lookahead(2, 1)) is None


class TestSpecsAndConfigs:
    def test_strategy_spec_validation(self):
        with pytest.raises(ValidationError):
            StrategySpec.bon(0, ORM_MAX)
        with pytest.raises(ValidationError):
            StrategySpec.bon(2, "plurality")
        with pytest.raises(ValidationError):
            StrategySpec(kind="dfs")
        with pytest.raises(ValidationError):
            StrategySpec.lookahead(2, -1)

    def test_process_config_validation(self):
        with pytest.raises(ValidationError):
            ProcessConfig(decay=EXP1, L=0)
        with pytest.raises(ValidationError):
            ProcessConfig(decay=DecayModel.tabulated([0.5, 0.7]), L=2)
        with pytest.raises(ValidationError):
            ProcessConfig(decay=DecayModel.tabulated([0.5]), L=2)

    def test_round_trip_from_config(self):
        cfg = ProcessConfig.from_config(
            {
                "decay": {"kind": "exponential", "lambda_tau": 0.5},
                "selector": {"kind": "constant", "epsilon": 0.9},
                "answer": {"answer_space_size": 10},
                "L": 3,
                "score_noise_std": 0.2,
            }
        )
        assert cfg.decay.lambda_tau == 0.5
        assert cfg.selector.epsilon == 0.9
        assert cfg.answer.answer_space_size == 10
        spec = StrategySpec.from_config({"kind": "bon", "N": 4, "rule": "orm_vote"})
        assert spec.N == 4 and spec.rule == ORM_VOTE

    def test_trial_result_validation(self):
        with pytest.raises(ValidationError):
            TrialResult(True, 1, 0)
