import math

import numpy as np
import numpy.testing as npt
import pytest

from qpomdp.errors import InvalidSigma, UnattainableEpsilon
from qpomdp.metering import QueryLedger, SpaceSizes
from qpomdp.planner import (
    BudgetAccount,
    LookaheadConfig,
    PacParams,
    SampleBudget,
    derive_budget,
    estimate_next_belief,
    hoeffding,
    pac_bounds,
    plan,
)
from qpomdp.pomdp import Pomdp
from qpomdp.rng import StreamFactory, substream

from oracles import brute_force_q_values, error_sums

EXACT = dict(use_exact_inference=True)
TINY = SampleBudget(1, 1, 1)


def _shifted_rewards(pomdp: Pomdp, offset: float) -> Pomdp:
    return Pomdp(
        state_names=pomdp.state_names,
        action_names=pomdp.action_names,
        observation_names=pomdp.observation_names,
        reward_values=tuple(v + offset for v in pomdp.reward_values),
        transition=pomdp.transition,
        sensor=pomdp.sensor,
        reward_dist=pomdp.reward_dist,
        discount=pomdp.discount,
        initial_belief=pomdp.initial_belief,
    )


class TestExactPlanner:
    def test_tiger_one_step_values(self, tiger, uniform2):
        config = LookaheadConfig(horizon=1, budget=TINY, **EXACT)
        result = plan(tiger, uniform2, config, substream(0))
        npt.assert_allclose(result.q_values, [-1.0, -2.5, -2.5], atol=1e-12)
        assert result.action == tiger.action_names.index("listen")
        assert result.queries == 0

    @pytest.mark.parametrize("horizon", [1, 2, 3])
    def test_matches_brute_force_tiger(self, tiger, uniform2, horizon):
        config = LookaheadConfig(horizon=horizon, budget=TINY, **EXACT)
        result = plan(tiger, uniform2, config, substream(0))
        oracle = brute_force_q_values(tiger, uniform2, horizon)
        npt.assert_allclose(result.q_values, oracle, rtol=0, atol=1e-10)
        assert result.action == int(np.argmax(oracle))

    @pytest.mark.parametrize("horizon", [1, 2, 3])
    def test_matches_brute_force_robot(self, robot, horizon):
        config = LookaheadConfig(horizon=horizon, budget=TINY, **EXACT)
        result = plan(robot, robot.initial_belief, config, substream(0))
        oracle = brute_force_q_values(robot, robot.initial_belief, horizon)
        npt.assert_allclose(result.q_values, oracle, rtol=0, atol=1e-10)
        assert result.action == int(np.argmax(oracle))

    def test_zero_discount_reduces_to_myopic(self, tiger, uniform2):
        from qpomdp.envs import tiger_pomdp

        myopic = tiger_pomdp(discount=0.0)
        for horizon in (1, 2, 3):
            config = LookaheadConfig(horizon=horizon, budget=TINY, **EXACT)
            result = plan(myopic, uniform2, config, substream(0))
            npt.assert_allclose(result.q_values, [-1.0, -2.5, -2.5], atol=1e-12)

    def test_reward_shift_keeps_argmax(self, tiger, robot):
        for pomdp, belief in ((tiger, np.array([0.62, 0.38])),
                              (robot, robot.initial_belief)):
            config = LookaheadConfig(horizon=2, budget=TINY, **EXACT)
            base = plan(pomdp, belief, config, substream(0))
            shifted = plan(_shifted_rewards(pomdp, 7.5), belief, config,
                           substream(0))
            assert base.action == shifted.action


class TestSampledPlanner:
    def test_consistency_with_exact_choice(self, tiger, uniform2):
        exact_cfg = LookaheadConfig(horizon=2, budget=TINY, **EXACT)
        exact_action = plan(tiger, uniform2, exact_cfg, substream(0)).action
        budget = SampleBudget(10_000, 10_000, 10_000)
        config = LookaheadConfig(horizon=2, budget=budget, sampler="classical")
        agreements = sum(
            plan(tiger, uniform2, config, substream(40, run=r)).action
            == exact_action
            for r in range(30)
        )
        assert agreements >= 29  # 95% of 30, rounded up

    def test_query_accounting_identity(self, tiger, uniform2):
        budget = SampleBudget(7, 64, 3)
        config = LookaheadConfig(horizon=2, budget=budget, sampler="classical")
        ledger = QueryLedger()
        plan(tiger, uniform2, config, substream(41), ledger)
        branching = tiger.num_actions * tiger.num_observations
        belief_nodes = (branching ** 2 - 1) // (branching - 1)
        obs_nodes = tiger.num_actions * belief_nodes
        assert ledger.site_queries["reward"] == budget.reward_samples * obs_nodes
        assert (
            ledger.site_queries["observation"]
            == budget.observation_samples * obs_nodes
        )
        # planning performs the non-root belief updates of the tree
        assert ledger.belief_updates == belief_nodes - 1

    def test_stream_factory_reproducible(self, tiger, uniform2):
        budget = SampleBudget(5, 16, 3)
        config = LookaheadConfig(horizon=2, budget=budget, sampler="classical")
        a = plan(tiger, uniform2, config, StreamFactory(3, run=1, prefix="x"))
        b = plan(tiger, uniform2, config, StreamFactory(3, run=1, prefix="x"))
        npt.assert_array_equal(a.q_values, b.q_values)
        assert a.action == b.action


class TestEqualCostConversion:
    def test_coincident_costs_keep_count(self, tiger, uniform2):
        # uniform belief, listening: acceptance one half, no amplification
        config = LookaheadConfig(
            horizon=1, budget=SampleBudget(1, 1, 5), sampler="quantum",
            accounting="expected", equal_cost=True,
        )
        ledger = QueryLedger()
        result = estimate_next_belief(
            tiger, uniform2, 0, 0, config, substream(42), ledger
        )
        assert ledger.site_accepted["belief"] == 5
        npt.assert_allclose(result.queries, 10.0, atol=1e-9)

    def test_amplified_update_buys_extra_samples(self, tiger):
        belief = np.array([1.0, 0.0])  # surprising observation: acceptance 0.15
        config = LookaheadConfig(
            horizon=1, budget=SampleBudget(1, 1, 5), sampler="quantum",
            accounting="expected", equal_cost=True,
        )
        ledger = QueryLedger()
        estimate_next_belief(tiger, belief, 0, 1, config, substream(43), ledger)
        assert ledger.site_accepted["belief"] > 5

    def test_savings_bank_and_spend(self, tiger):
        config = LookaheadConfig(
            horizon=1, budget=SampleBudget(1, 1, 5), sampler="quantum",
            accounting="expected", equal_cost=True,
        )
        account = BudgetAccount()
        ledger = QueryLedger()
        # amplified update banks its integer-division change...
        estimate_next_belief(tiger, np.array([1.0, 0.0]), 0, 1, config,
                             substream(44), ledger, account)
        banked = account.saved
        assert banked > 0
        # ...an ordinary in-tree update leaves the bank alone...
        estimate_next_belief(tiger, np.array([0.5, 0.5]), 0, 0, config,
                             substream(45), ledger, account)
        assert account.saved >= banked
        banked = account.saved
        # ...and the spending update cashes it in
        before = ledger.site_accepted["belief"]
        estimate_next_belief(tiger, np.array([0.5, 0.5]), 0, 0, config,
                             substream(46), ledger, account,
                             spend_savings=True)
        extra = ledger.site_accepted["belief"] - before - 5
        assert extra == int(banked / 2.0)  # coincident cost per sample is 2
        assert account.saved < 2.0

    def test_cumulative_cost_never_exceeds_classical(self, tiger):
        quantum_cfg = LookaheadConfig(
            horizon=1, budget=SampleBudget(1, 1, 5), sampler="quantum",
            accounting="expected", equal_cost=True,
        )
        classical_cfg = LookaheadConfig(
            horizon=1, budget=SampleBudget(1, 1, 5), sampler="classical",
            accounting="expected", equal_cost=True,
        )
        account = BudgetAccount()
        q_ledger, c_ledger = QueryLedger(), QueryLedger()
        beliefs = [np.array([1.0, 0.0]), np.array([0.5, 0.5]),
                   np.array([0.9, 0.1]), np.array([0.2, 0.8])]
        for i, belief in enumerate(beliefs):
            obs = i % 2
            estimate_next_belief(tiger, belief, 0, obs, quantum_cfg,
                                 substream(46, run=i), q_ledger, account)
            estimate_next_belief(tiger, belief, 0, obs, classical_cfg,
                                 substream(46, run=i), c_ledger)
            assert q_ledger.total_queries <= c_ledger.total_queries + 1e-9


class TestHoeffding:
    def test_sigma_two_gives_zero(self):
        assert hoeffding(17, 2.0) == 0.0

    def test_golden_value(self):
        # sqrt(ln 20 / 100), recomputed at 50 digits
        npt.assert_allclose(hoeffding(50, 0.1), 0.17308183826022853, atol=1e-12)

    def test_doubling_samples_shrinks_by_root_two(self):
        npt.assert_allclose(
            hoeffding(100, 0.1) * math.sqrt(2.0), hoeffding(50, 0.1) * 1.0,
            atol=1e-12,
        )

    def test_invalid_sigma(self):
        with pytest.raises(InvalidSigma):
            hoeffding(10, 0.0)
        with pytest.raises(InvalidSigma):
            hoeffding(10, 2.5)


TIGER_SIZES = SpaceSizes(states=2, actions=3, observations=2, rewards=4)


class TestDeriveBudget:
    def test_observation_ratio_at_nine_tenths(self):
        budget = derive_budget(100, TIGER_SIZES, 0.9, 2)
        assert budget.observation_samples == 8100

    def test_tiny_discount_clamps_to_one(self):
        budget = derive_budget(3, TIGER_SIZES, 1e-6, 2)
        assert budget.observation_samples == 1

    def test_belief_count_matches_error_sum_equality(self):
        budget = derive_budget(100, TIGER_SIZES, 0.9, 2)
        assert budget.belief_samples == 11472
        # the unclamped closed form balances the three error sums
        raw_l = 11471.537396121884
        s_n, s_m, s_l = error_sums(100, 8100, raw_l, TIGER_SIZES, 0.9, 2)
        npt.assert_allclose(s_n, s_m, rtol=1e-12)
        npt.assert_allclose(s_n, s_l, rtol=1e-9)

    def test_single_state_degenerates_to_reward_count(self):
        sizes = SpaceSizes(states=1, actions=2, observations=2, rewards=2)
        assert derive_budget(37, sizes, 0.5, 3).belief_samples == 37

    def test_discount_states_product_one_uses_limit(self):
        sizes = SpaceSizes(states=2, actions=2, observations=2, rewards=2)
        budget = derive_budget(10, sizes, 0.5, 3)
        # geometric ratio limit is the horizon itself
        horizon_factor = 2.0
        factor = 0.25 * (2 + 0.5 * horizon_factor * 2) / 1 * (
            2 / (horizon_factor * (1 - 0.5 ** 3)) * 3 - 1
        )
        assert budget.belief_samples == math.ceil(factor ** 2 * 10)


class TestPacBounds:
    def test_minimum_horizon_golden(self):
        params = PacParams(epsilon=0.2, delta=0.1, steps=5, discount=0.9,
                           max_reward=1.0, sizes=TIGER_SIZES, horizon=44)
        assert pac_bounds(params).min_horizon == 44

    def test_golden_bounds(self):
        # frozen after 50-digit recomputation
        params = PacParams(epsilon=20.0, delta=0.1, steps=5, discount=0.9,
                           max_reward=1.0, sizes=TIGER_SIZES, horizon=2)
        bounds = pac_bounds(params)
        npt.assert_allclose(bounds.max_sampling_failure,
                            9.346493195752953e-05, rtol=1e-12)
        npt.assert_allclose(bounds.min_reward_samples,
                            14937.272660248487, rtol=1e-12)

    def test_monotonicity(self):
        base = PacParams(epsilon=20.0, delta=0.1, steps=5, discount=0.9,
                         max_reward=1.0, sizes=TIGER_SIZES, horizon=2)
        wider = PacParams(epsilon=20.0, delta=0.2, steps=5, discount=0.9,
                          max_reward=1.0, sizes=TIGER_SIZES, horizon=2)
        easier = PacParams(epsilon=25.0, delta=0.1, steps=5, discount=0.9,
                           max_reward=1.0, sizes=TIGER_SIZES, horizon=2)
        assert (pac_bounds(wider).max_sampling_failure
                > pac_bounds(base).max_sampling_failure)
        assert (pac_bounds(easier).min_reward_samples
                < pac_bounds(base).min_reward_samples)

    def test_unattainable_epsilon(self):
        params = PacParams(epsilon=-1.0, delta=0.1, steps=5, discount=0.9,
                           max_reward=1.0, sizes=TIGER_SIZES, horizon=2)
        with pytest.raises(UnattainableEpsilon):
            pac_bounds(params)

    def test_short_horizon_reports_infinite_samples(self):
        params = PacParams(epsilon=0.2, delta=0.1, steps=5, discount=0.9,
                           max_reward=1.0, sizes=TIGER_SIZES, horizon=2)
        bounds = pac_bounds(params)
        assert math.isinf(bounds.min_reward_samples)
        assert bounds.min_horizon == 44
