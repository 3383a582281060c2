"""Query accounting and complexity factors.

One query is one generated sample, or equivalently one application of
the network-encoding operator on the quantum side.  A ledger collects
per-site query counts plus the acceptance probability of every belief
update it witnessed; from those the realized classical/quantum cost
factors and their ratio (the achieved speedup) are derived.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyAcceptanceSet

#: Conventional ledger sites used by the planner and benchmarks.
SITE_REWARD = "reward"
SITE_OBSERVATION = "observation"
SITE_BELIEF = "belief"


@dataclass
class QueryLedger:
    """Mutable per-run accounting of sampling cost.

    ``acceptance_probs`` holds one entry per belief-update invocation:
    the exact probability of the observation evidence used for that
    update.  Those values drive the complexity factors below.

    Counts stay integers under measured accounting; the benchmark's
    deterministic expected-cost protocols may accrue fractional queries.
    """

    total_queries: float = 0
    site_queries: dict[str, float] = field(default_factory=dict)
    site_accepted: dict[str, int] = field(default_factory=dict)
    acceptance_probs: list[float] = field(default_factory=list)

    def add(self, site: str, queries: float, accepted: int = 0) -> None:
        self.total_queries += queries
        self.site_queries[site] = self.site_queries.get(site, 0) + queries
        if accepted:
            self.site_accepted[site] = self.site_accepted.get(site, 0) + int(accepted)

    def record_acceptance_prob(self, prob: float) -> None:
        if not 0.0 < prob <= 1.0:
            raise ValueError(f"acceptance probability {prob} outside (0, 1]")
        self.acceptance_probs.append(float(prob))

    @property
    def total_accepted(self) -> int:
        return sum(self.site_accepted.values())

    @property
    def belief_updates(self) -> int:
        """Number of belief-update invocations recorded."""
        return len(self.acceptance_probs)

    def merge(self, other: "QueryLedger") -> None:
        """Fold ``other`` into this ledger (counter sums, prob concatenation)."""
        self.total_queries += other.total_queries
        for site, q in other.site_queries.items():
            self.site_queries[site] = self.site_queries.get(site, 0) + q
        for site, a in other.site_accepted.items():
            self.site_accepted[site] = self.site_accepted.get(site, 0) + a
        self.acceptance_probs.extend(other.acceptance_probs)


@dataclass(frozen=True)
class SpaceSizes:
    """Cardinalities of the state, action, observation, and reward spaces."""

    states: int
    actions: int
    observations: int
    rewards: int


@dataclass(frozen=True)
class ComplexityReport:
    """Evaluated cost factors for one ledger.

    ``classical_factor`` is the sum of inverse acceptance probabilities,
    ``quantum_factor`` the sum of inverse square roots; their ratio is
    the realized speedup of amplified over plain rejection sampling.
    ``classical_score``/``quantum_score`` plug the factors into the
    lookahead complexity expressions.  They are order-of-growth scores
    for regime comparison, not runtimes.
    """

    classical_factor: float
    quantum_factor: float
    speedup_ratio: float
    total_queries: int
    site_queries: dict[str, int]
    classical_score: float | None = None
    quantum_score: float | None = None


def _lookahead_score(
    factor: float,
    reward_samples: int,
    num_variables: int,
    max_parents: int,
    sizes: SpaceSizes,
    horizon: int,
) -> float:
    branch = (sizes.actions * sizes.observations) ** (horizon - 1)
    update_weight = ((sizes.rewards + sizes.observations) * sizes.states ** (horizon - 1)) ** 2
    return (
        reward_samples
        * num_variables
        * max(max_parents, 1)
        * branch
        * (sizes.actions + update_weight * factor)
    )


def summarize(
    ledger: QueryLedger,
    reward_samples: int | None = None,
    num_variables: int | None = None,
    max_parents: int | None = None,
    sizes: SpaceSizes | None = None,
    horizon: int | None = None,
) -> ComplexityReport:
    """Compute cost factors for a ledger; optionally evaluate the bound scores.

    The optional arguments supply the symbols of the lookahead
    complexity expressions; when all are given, both scores are filled.
    """
    probs = np.asarray(ledger.acceptance_probs, dtype=float)
    if probs.size == 0:
        raise EmptyAcceptanceSet("ledger holds no acceptance probabilities")
    classical_factor = float(np.sum(1.0 / probs))
    quantum_factor = float(np.sum(probs ** -0.5))
    classical_score = quantum_score = None
    if None not in (reward_samples, num_variables, max_parents, sizes, horizon):
        classical_score = _lookahead_score(
            classical_factor, reward_samples, num_variables, max_parents, sizes, horizon
        )
        quantum_score = _lookahead_score(
            quantum_factor, reward_samples, num_variables, max_parents, sizes, horizon
        )
    return ComplexityReport(
        classical_factor=classical_factor,
        quantum_factor=quantum_factor,
        speedup_ratio=classical_factor / quantum_factor,
        total_queries=ledger.total_queries,
        site_queries=dict(ledger.site_queries),
        classical_score=classical_score,
        quantum_score=quantum_score,
    )


def belief_update_dominates(
    report: ComplexityReport, sizes: SpaceSizes, horizon: int, margin: float = 10.0
) -> bool:
    """Whether belief updating dominates the lookahead cost.

    True when 1/quantum_factor is at least ``margin`` times smaller than
    ((rewards + observations) * states^(horizon-1))^2 / actions, the
    regime where the speedup factor applies to the whole algorithm.
    """
    rhs = ((sizes.rewards + sizes.observations) * sizes.states ** (horizon - 1)) ** 2
    return 1.0 / report.quantum_factor <= rhs / sizes.actions / margin
