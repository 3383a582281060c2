"""POMDP model type, one-step decision-network slices, and belief updates.

A model is a set of row-normalized tables over finite state, action,
observation, and reward alphabets.  Each (belief, action) pair induces a
five-variable network slice -- current state and action clamped at the
roots, then next state, observation, and reward -- on which exact,
classically sampled, and amplitude-amplified belief updates all run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import amplitude
from .bayesnet import (
    BayesNet,
    Cpt,
    RandomVariable,
    build_net,
    rejection_sample_batch,
    sample_batch,
)
from .errors import CptNotNormalized, ImpossibleObservation, UnknownAction
from .metering import SITE_BELIEF, SITE_OBSERVATION, SITE_REWARD, QueryLedger, SpaceSizes

BELIEF_TOL = 1e-9

# variable indices within a slice network
SLICE_STATE = 0
SLICE_ACTION = 1
SLICE_NEXT_STATE = 2
SLICE_OBSERVATION = 3
SLICE_REWARD = 4


def _check_rows(name: str, table: np.ndarray) -> np.ndarray:
    table = np.asarray(table, dtype=float)
    if np.any(table < 0):
        raise CptNotNormalized(f"{name}: negative probability")
    sums = table.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > BELIEF_TOL):
        raise CptNotNormalized(f"{name}: row sum off by "
                               f"{float(np.abs(sums - 1.0).max()):.3g}")
    return table / sums[..., None]


def validate_belief(belief: np.ndarray, num_states: int) -> np.ndarray:
    belief = np.asarray(belief, dtype=float)
    if belief.shape != (num_states,):
        raise ValueError(f"belief shape {belief.shape} != ({num_states},)")
    return _check_rows("belief", belief)


@dataclass(frozen=True)
class Pomdp:
    """Finite partially observable decision process.

    ``transition[s, a, s']`` is the next-state law, ``sensor[s', a, o]``
    the observation law, and ``reward_dist[s, a, r]`` a distribution
    over the finite reward alphabet ``reward_values``.
    """

    state_names: tuple[str, ...]
    action_names: tuple[str, ...]
    observation_names: tuple[str, ...]
    reward_values: tuple[float, ...]
    transition: np.ndarray
    sensor: np.ndarray
    reward_dist: np.ndarray
    discount: float
    initial_belief: np.ndarray

    def __post_init__(self):
        ns, na, no, nr = (
            len(self.state_names),
            len(self.action_names),
            len(self.observation_names),
            len(self.reward_values),
        )
        shapes = {
            "transition": ((ns, na, ns), self.transition),
            "sensor": ((ns, na, no), self.sensor),
            "reward_dist": ((ns, na, nr), self.reward_dist),
        }
        for name, (expected, table) in shapes.items():
            table = np.asarray(table, dtype=float)
            if table.shape != expected:
                raise ValueError(f"{name} shape {table.shape} != {expected}")
            object.__setattr__(self, name, _check_rows(name, table))
        if not 0.0 <= self.discount < 1.0:
            raise ValueError(f"discount {self.discount} outside [0, 1)")
        object.__setattr__(
            self, "initial_belief", validate_belief(self.initial_belief, ns)
        )

    @property
    def num_states(self) -> int:
        return len(self.state_names)

    @property
    def num_actions(self) -> int:
        return len(self.action_names)

    @property
    def num_observations(self) -> int:
        return len(self.observation_names)

    @property
    def sizes(self) -> SpaceSizes:
        return SpaceSizes(
            states=self.num_states,
            actions=self.num_actions,
            observations=self.num_observations,
            rewards=len(self.reward_values),
        )

    @property
    def expected_reward_table(self) -> np.ndarray:
        """E(r | s, a) derived from the reward distribution."""
        return self.reward_dist @ np.asarray(self.reward_values)

    @property
    def max_abs_reward(self) -> float:
        return float(np.max(np.abs(self.reward_values)))

    def action_index(self, action: int | str) -> int:
        if isinstance(action, str):
            try:
                return self.action_names.index(action)
            except ValueError:
                raise UnknownAction(f"unknown action {action!r}") from None
        if not 0 <= action < self.num_actions:
            raise UnknownAction(f"action index {action} out of range")
        return int(action)

    def observation_index(self, obs: int | str) -> int:
        if isinstance(obs, str):
            return self.observation_names.index(obs)
        if not 0 <= obs < self.num_observations:
            raise ValueError(f"observation index {obs} out of range")
        return int(obs)


@dataclass(frozen=True)
class DdnSlice:
    """One-step network: state and action roots, then next state,
    observation, and reward, wired exactly like the model tables."""

    net: BayesNet
    pomdp: Pomdp = field(repr=False)
    action: int


@dataclass(frozen=True)
class BeliefUpdateResult:
    belief: np.ndarray
    observation_prob: float
    queries: int = 0


def _slice_variables(pomdp: Pomdp) -> tuple[RandomVariable, ...]:
    return (
        RandomVariable("state", pomdp.num_states),
        RandomVariable("action", pomdp.num_actions),
        RandomVariable(
            "next_state", pomdp.num_states, parents=(SLICE_STATE, SLICE_ACTION)
        ),
        RandomVariable(
            "observation",
            pomdp.num_observations,
            parents=(SLICE_NEXT_STATE, SLICE_ACTION),
        ),
        RandomVariable(
            "reward", len(pomdp.reward_values), parents=(SLICE_STATE, SLICE_ACTION)
        ),
    )


def build_slice(pomdp: Pomdp, belief: np.ndarray, action: int | str) -> DdnSlice:
    """Clamp the belief and action at the slice roots; copy the model tables.

    The model tables were row-checked when the process was built and
    the topology is fixed, so the network is assembled directly instead
    of re-validating through :func:`~qpomdp.bayesnet.build_net`.
    """
    a = pomdp.action_index(action)
    belief = validate_belief(belief, pomdp.num_states)
    action_row = np.zeros(pomdp.num_actions)
    action_row[a] = 1.0

    cpts = (
        Cpt(SLICE_STATE, belief),
        Cpt(SLICE_ACTION, action_row),
        Cpt(SLICE_NEXT_STATE, pomdp.transition),
        Cpt(SLICE_OBSERVATION, pomdp.sensor),
        Cpt(SLICE_REWARD, pomdp.reward_dist),
    )
    net = BayesNet(
        variables=_slice_variables(pomdp),
        cpts=cpts,
        topo_order=(0, 1, 2, 3, 4),
    )
    return DdnSlice(net=net, pomdp=pomdp, action=a)


# ---------------------------------------------------------------------------
# Exact inference
# ---------------------------------------------------------------------------

def exact_observation_probs(
    pomdp: Pomdp, belief: np.ndarray, action: int | str
) -> np.ndarray:
    """P(o | belief, action) for every observation."""
    a = pomdp.action_index(action)
    predicted = np.asarray(belief) @ pomdp.transition[:, a, :]
    return predicted @ pomdp.sensor[:, a, :]


def exact_expected_reward(
    pomdp: Pomdp, belief: np.ndarray, action: int | str
) -> float:
    a = pomdp.action_index(action)
    return float(np.asarray(belief) @ pomdp.expected_reward_table[:, a])


def exact_belief_update(
    pomdp: Pomdp, belief: np.ndarray, action: int | str, observation: int | str
) -> BeliefUpdateResult:
    """Posterior over next states given one observation, with its probability.

    The unnormalized posterior weighs the predicted next-state mass by
    the observation likelihood; the normalizer is P(o | belief, action).
    """
    a = pomdp.action_index(action)
    o = pomdp.observation_index(observation)
    predicted = np.asarray(belief) @ pomdp.transition[:, a, :]
    unnormalized = pomdp.sensor[:, a, o] * predicted
    prob = float(unnormalized.sum())
    if prob <= 0.0:
        raise ImpossibleObservation(
            f"observation {pomdp.observation_names[o]!r} has probability zero"
        )
    return BeliefUpdateResult(
        belief=unnormalized / prob, observation_prob=prob, queries=0
    )


# ---------------------------------------------------------------------------
# Sampled inference
# ---------------------------------------------------------------------------

def _frequencies(values: np.ndarray, size: int) -> np.ndarray:
    return np.bincount(values, minlength=size) / len(values)


def sampled_belief_update(
    pomdp: Pomdp,
    belief: np.ndarray,
    action: int | str,
    observation: int | str,
    count: int,
    sampler: str,
    rng: np.random.Generator,
    ledger: QueryLedger | None = None,
) -> BeliefUpdateResult:
    """Belief update by rejection sampling on the slice.

    ``sampler`` picks plain rejection sampling ("classical") or the
    amplitude-amplified routine ("quantum").  The result is the
    empirical next-state frequency over ``count`` accepted samples; the
    exact observation probability is recorded into the ledger's
    acceptance set either way.
    """
    if count < 1:
        raise ValueError("sample count must be >= 1")
    o = pomdp.observation_index(observation)
    exact = exact_belief_update(pomdp, belief, action, o)  # validates prob > 0
    if ledger is None:
        ledger = QueryLedger()
    ledger.record_acceptance_prob(exact.observation_prob)

    ddn = build_slice(pomdp, belief, action)
    evidence = {SLICE_OBSERVATION: o}
    before = ledger.total_queries
    if sampler == "classical":
        draws = rejection_sample_batch(
            ddn.net, evidence, count, rng, ledger, site=SITE_BELIEF
        )
    elif sampler == "quantum":
        draws = amplitude.quantum_rejection_sample_batch(
            ddn.net, evidence, count, rng, ledger, site=SITE_BELIEF
        )
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    return BeliefUpdateResult(
        belief=_frequencies(draws[:, SLICE_NEXT_STATE], pomdp.num_states),
        observation_prob=exact.observation_prob,
        queries=ledger.total_queries - before,
    )


def observation_probabilities(
    pomdp: Pomdp,
    belief: np.ndarray,
    action: int | str,
    samples: int,
    rng: np.random.Generator,
    ledger: QueryLedger | None = None,
) -> np.ndarray:
    """Estimate P(o | belief, action) by direct sampling on the slice.

    No evidence is involved, so nothing is ever rejected: exactly
    ``samples`` queries.
    """
    if samples < 1:
        raise ValueError("sample count must be >= 1")
    ddn = build_slice(pomdp, belief, action)
    draws = sample_batch(ddn.net, samples, rng, ledger, site=SITE_OBSERVATION)
    return _frequencies(draws[:, SLICE_OBSERVATION], pomdp.num_observations)


def expected_reward(
    pomdp: Pomdp,
    belief: np.ndarray,
    action: int | str,
    samples: int,
    rng: np.random.Generator,
    ledger: QueryLedger | None = None,
) -> float:
    """Mean of directly sampled rewards from the slice."""
    if samples < 1:
        raise ValueError("sample count must be >= 1")
    ddn = build_slice(pomdp, belief, action)
    draws = sample_batch(ddn.net, samples, rng, ledger, site=SITE_REWARD)
    values = np.asarray(pomdp.reward_values)
    return float(values[draws[:, SLICE_REWARD]].mean())


def sample_node_estimates(
    pomdp: Pomdp,
    belief: np.ndarray,
    action: int | str,
    reward_samples: int,
    obs_samples: int,
    rng: np.random.Generator,
    ledger: QueryLedger | None = None,
) -> tuple[float, np.ndarray]:
    """Reward mean and observation frequencies from one shared slice.

    Equivalent to calling :func:`expected_reward` then
    :func:`observation_probabilities` (separate draws and ledger
    sites), but builds the slice once; the planner visits both at every
    reward node.
    """
    ddn = build_slice(pomdp, belief, action)
    reward_draws = sample_batch(ddn.net, reward_samples, rng, ledger, site=SITE_REWARD)
    obs_draws = sample_batch(ddn.net, obs_samples, rng, ledger, site=SITE_OBSERVATION)
    values = np.asarray(pomdp.reward_values)
    return (
        float(values[reward_draws[:, SLICE_REWARD]].mean()),
        _frequencies(obs_draws[:, SLICE_OBSERVATION], pomdp.num_observations),
    )
