"""Finite-horizon exhaustive lookahead and sample-budget calculators.

The tree alternates action and observation branches down to a fixed
horizon.  Reward nodes estimate the expected reward (``reward_samples``
draws) and the observation distribution (``observation_samples``
draws); each positive-probability observation spawns a belief update
(``belief_samples`` accepted draws) and a subtree.  Values back up with
a max over actions at belief nodes and an observation-weighted sum plus
immediate reward at reward nodes; leaves keep the immediate reward
only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .amplitude import cost_model
from .errors import DegenerateSizes, InvalidSigma, UnattainableEpsilon
from .metering import SITE_BELIEF, QueryLedger, SpaceSizes
from .pomdp import (
    BeliefUpdateResult,
    Pomdp,
    exact_belief_update,
    exact_expected_reward,
    exact_observation_probs,
    sample_node_estimates,
    sampled_belief_update,
)
from .rng import StreamFactory

#: Ledger accounting modes: attempt-level measurement vs deterministic
#: expected-cost accumulation (the benchmark protocols use the latter).
MEASURED = "measured"
EXPECTED = "expected"


@dataclass(frozen=True)
class SampleBudget:
    """Per-node sample counts: rewards, observations, belief updates."""

    reward_samples: int
    observation_samples: int
    belief_samples: int

    def __post_init__(self):
        for name in (
            "reward_samples",
            "observation_samples",
            "belief_samples",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class LookaheadConfig:
    """Planner configuration.

    ``sampler`` chooses the belief-update routine; ``accounting``
    selects measured attempt-level ledgers or deterministic
    expected-cost accrual; ``equal_cost`` converts the classical query
    budget of each belief update into extra accepted samples for the
    amplified sampler (the fixed-cost benchmark protocol).
    ``use_exact_inference`` replaces every estimate with its exact
    oracle and spends no queries.
    """

    horizon: int
    budget: SampleBudget
    sampler: str = "classical"
    use_exact_inference: bool = False
    accounting: str = MEASURED
    equal_cost: bool = False

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.sampler not in ("classical", "quantum"):
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if self.accounting not in (MEASURED, EXPECTED):
            raise ValueError(f"unknown accounting mode {self.accounting!r}")


@dataclass(frozen=True)
class PlanResult:
    """Chosen action with the root action values and the cost of getting them."""

    action: int
    q_values: np.ndarray
    queries: float
    acceptance_probs: list[float] = field(default_factory=list)


@dataclass
class BudgetAccount:
    """Query savings banked during the equal-cost protocol.

    In-tree updates draw the same accepted count as the classical agent
    (so the two trees stay draw-for-draw comparable) but pay the
    amplified sampler's cheaper rate; the whole per-update cost
    advantage accumulates here and is spent where it matters most: the
    agent's own end-of-step filter update, whose belief persists across
    the rest of the episode.  Cumulative spending never exceeds the
    cumulative classical budget.
    """

    saved: float = 0.0


def estimate_next_belief(
    pomdp: Pomdp,
    belief: np.ndarray,
    action: int,
    observation: int,
    config: LookaheadConfig,
    rng: np.random.Generator,
    ledger: QueryLedger,
    account: BudgetAccount | None = None,
    spend_savings: bool = False,
) -> BeliefUpdateResult:
    """One belief update under the configured sampler and accounting.

    Measured mode runs the actual rejection sampler.  Expected mode
    draws the accepted samples directly from the exact posterior (their
    law either way) and charges the cost model's expected queries;
    under ``equal_cost`` the amplified sampler converts the classical
    query budget into accepted samples, banking the remainder into
    ``account`` and cashing the bank in when ``spend_savings`` is set.
    """
    count = config.budget.belief_samples
    if config.accounting == MEASURED:
        return sampled_belief_update(
            pomdp, belief, action, observation, count, config.sampler, rng, ledger
        )
    exact = exact_belief_update(pomdp, belief, action, observation)
    prob = exact.observation_prob
    ledger.record_acceptance_prob(prob)
    per_sample = cost_model(prob, config.sampler)
    if config.equal_cost and config.sampler == "quantum":
        budget_queries = count * cost_model(prob, "classical")
        if account is None:
            # no bank: convert this update's own budget in place
            # (snapped floor: where the cost models coincide the ratio is
            # exactly the classical count up to float dust, never below it)
            count = int(budget_queries / per_sample + 1e-9)
        elif spend_savings:
            budget_queries += account.saved
            count = int(budget_queries / per_sample + 1e-9)
            account.saved = max(budget_queries - count * per_sample, 0.0)
        else:
            # keep the classical count (trees stay draw-for-draw
            # comparable) and bank the cheaper rate's whole surplus
            account.saved += max(budget_queries - count * per_sample, 0.0)
    cost = count * per_sample
    ledger.add(SITE_BELIEF, cost, accepted=count)
    # inverse-CDF draws: under site-keyed streams, paired runs with
    # different counts share the leading draws, so their estimates
    # differ only by the extra samples
    cum = np.cumsum(exact.belief)
    values = np.minimum(
        np.searchsorted(cum, rng.random(count), side="right"), len(cum) - 1
    )
    empirical = np.bincount(values, minlength=pomdp.num_states) / count
    return BeliefUpdateResult(
        belief=empirical, observation_prob=prob, queries=cost
    )


def _node_rng(
    rng: np.random.Generator | StreamFactory, path: str
) -> np.random.Generator:
    if isinstance(rng, StreamFactory):
        return rng.site(path)
    return rng


def _action_value(
    pomdp: Pomdp,
    belief: np.ndarray,
    action: int,
    remaining: int,
    config: LookaheadConfig,
    rng: np.random.Generator | StreamFactory,
    ledger: QueryLedger,
    path: str,
    account: BudgetAccount | None,
) -> float:
    if config.use_exact_inference:
        value = exact_expected_reward(pomdp, belief, action)
        if remaining <= 1:
            return value
        obs_probs = exact_observation_probs(pomdp, belief, action)
    else:
        budget = config.budget
        value, obs_probs = sample_node_estimates(
            pomdp,
            belief,
            action,
            budget.reward_samples,
            budget.observation_samples,
            _node_rng(rng, path),
            ledger,
        )
        if remaining <= 1:
            return value

    for obs, prob in enumerate(obs_probs):
        if prob <= 0.0:
            continue  # zero-weight subtree: never expanded, no queries
        if config.use_exact_inference:
            next_belief = exact_belief_update(pomdp, belief, action, obs).belief
        else:
            next_belief = estimate_next_belief(
                pomdp,
                belief,
                action,
                obs,
                config,
                _node_rng(rng, f"{path}/o{obs}"),
                ledger,
                account,
            ).belief
        subtree = max(
            _action_value(
                pomdp,
                next_belief,
                a,
                remaining - 1,
                config,
                rng,
                ledger,
                f"{path}/o{obs}/a{a}",
                account,
            )
            for a in range(pomdp.num_actions)
        )
        value += pomdp.discount * float(prob) * subtree
    return value


def plan(
    pomdp: Pomdp,
    belief: np.ndarray,
    config: LookaheadConfig,
    rng: np.random.Generator | StreamFactory,
    ledger: QueryLedger | None = None,
    account: BudgetAccount | None = None,
) -> PlanResult:
    """Evaluate the lookahead tree and return the argmax action.

    Ties break toward the lowest action index.  In exact mode the call
    spends zero queries.

    ``rng`` may be a single generator (the tree consumes it in traversal
    order) or a :class:`~qpomdp.rng.StreamFactory`, in which case every
    tree node draws from its own path-keyed substream.  Benchmarks use
    the latter so paired runs of the two samplers share randomness site
    by site.
    """
    if ledger is None:
        ledger = QueryLedger()
    queries_before = ledger.total_queries
    probs_before = len(ledger.acceptance_probs)
    q_values = np.array(
        [
            _action_value(
                pomdp, belief, action, config.horizon, config, rng, ledger,
                f"a{action}", account,
            )
            for action in range(pomdp.num_actions)
        ]
    )
    return PlanResult(
        action=int(np.argmax(q_values)),
        q_values=q_values,
        queries=ledger.total_queries - queries_before,
        acceptance_probs=list(ledger.acceptance_probs[probs_before:]),
    )


# ---------------------------------------------------------------------------
# Sample-budget calculators
# ---------------------------------------------------------------------------

def hoeffding(samples: int, sigma: float) -> float:
    """Concentration width sqrt(log(2/sigma) / (2*samples))."""
    if samples < 1:
        raise ValueError("sample count must be >= 1")
    if not 0.0 < sigma <= 2.0:
        raise InvalidSigma(f"sigma {sigma} outside (0, 2]")
    return math.sqrt(math.log(2.0 / sigma) / (2.0 * samples))


def _snapped_ceil(x: float) -> int:
    """Ceiling that first snaps values within float dust of an integer."""
    nearest = round(x)
    if abs(x - nearest) < 1e-9 * max(1.0, abs(x)):
        return int(nearest)
    return math.ceil(x)


def derive_budget(
    reward_samples: int, sizes: SpaceSizes, discount: float, horizon: int
) -> SampleBudget:
    """Relate the three per-node sample counts so each error term matches.

    Equating the reward, observation, and belief error sums at the
    first step fixes the observation and belief counts as closed-form
    multiples of the reward count.  Results are clamped to at least 1.
    The removable singularities (one-state models; discount*states
    exactly 1) are evaluated as limits.
    """
    if reward_samples < 1:
        raise ValueError("reward sample count must be >= 1")
    if not 0.0 < discount < 1.0:
        raise ValueError("discount must lie in (0, 1)")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if min(sizes.states, sizes.actions, sizes.observations, sizes.rewards) < 1:
        raise DegenerateSizes("all space sizes must be >= 1")

    gamma = discount
    horizon_factor = 1.0 / (1.0 - gamma)
    obs_samples = _snapped_ceil((gamma * horizon_factor) ** 2 * reward_samples)

    states = sizes.states
    if states == 1:
        belief_samples = reward_samples
    else:
        gs = gamma * states
        if abs(gs - 1.0) < 1e-12:
            geometric = float(horizon)
        else:
            geometric = (gs ** horizon - 1.0) / (gs - 1.0)
        factor = (
            0.25
            * (sizes.rewards + gamma * horizon_factor * sizes.observations)
            / (states - 1)
            * (
                states / (horizon_factor * (1.0 - gamma ** horizon)) * geometric
                - 1.0
            )
        )
        belief_samples = _snapped_ceil(factor ** 2 * reward_samples)

    return SampleBudget(
        reward_samples=max(1, reward_samples),
        observation_samples=max(1, obs_samples),
        belief_samples=max(1, belief_samples),
    )


@dataclass(frozen=True)
class PacParams:
    """Inputs of the near-optimality guarantee calculators."""

    epsilon: float
    delta: float
    steps: int
    discount: float
    max_reward: float
    sizes: SpaceSizes
    horizon: int


@dataclass(frozen=True)
class PacBounds:
    """Minimum reward samples, maximum per-sampling failure probability,
    and minimum horizon meeting the requested regret/confidence."""

    min_reward_samples: float
    max_sampling_failure: float
    min_horizon: int


def pac_bounds(params: PacParams) -> PacBounds:
    """Evaluate the sample/confidence/horizon bounds for the lookahead."""
    gamma = params.discount
    if not 0.0 < gamma < 1.0:
        raise ValueError("discount must lie in (0, 1)")
    horizon_factor = 1.0 / (1.0 - gamma)
    tail = 2.0 * horizon_factor * params.max_reward
    if params.epsilon <= 0.0:
        raise UnattainableEpsilon("requested error must be positive")

    # smallest integer horizon with 2*gamma^H * tail-factor below epsilon
    if params.epsilon >= tail:
        min_horizon = 1
    else:
        min_horizon = max(1, math.floor(math.log(params.epsilon / tail, gamma)) + 1)
        while tail * gamma ** min_horizon >= params.epsilon:
            min_horizon += 1

    # residual error of stopping at the requested horizon; when it already
    # exceeds epsilon no sample count helps, reported as an infinite bound
    slack = params.epsilon - tail * gamma ** params.horizon

    branching = params.sizes.actions * params.sizes.observations
    if branching == 1:
        if params.horizon > 1:
            raise DegenerateSizes("action*observation branching of 1 needs horizon 1")
        depth_term = 0.0
    else:
        depth_term = branching * (params.horizon - 1) / (branching - 1) ** 2
    max_failure = (
        params.delta
        * branching ** -params.horizon
        / (2.0 + params.sizes.actions * (params.steps + 4.0 + depth_term))
    )

    if slack <= 0.0:
        min_samples = math.inf
    else:
        reach = 8.0 * horizon_factor + 4.0 * params.sizes.states ** params.steps
        min_samples = (
            0.5
            * math.log(2.0 / max_failure)
            * (params.max_reward / slack * reach) ** 2
        )
    return PacBounds(
        min_reward_samples=min_samples,
        max_sampling_failure=max_failure,
        min_horizon=min_horizon,
    )
