"""Discrete Bayesian networks with enumeration inference and rejection sampling.

Networks are immutable after construction and safe to share across
threads.  Sampling routines take an explicit generator and (optionally)
a :class:`~qpomdp.metering.QueryLedger`; one generated joint sample
costs one query.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    CptNotNormalized,
    CptShapeMismatch,
    CyclicGraph,
    JointTooLarge,
    RejectionBudgetExceeded,
    ZeroEvidenceProbability,
)
from .metering import QueryLedger

#: Row sums may deviate from 1 by at most this much; smaller deviations
#: are silently renormalized (tolerates text-format rounding).
NORMALIZATION_TOL = 1e-9

#: Default cap on joint enumeration size.
DEFAULT_JOINT_LIMIT = 2 ** 24

#: Default cap on generated samples per rejection-sampling call.
DEFAULT_ATTEMPT_CAP = 10 ** 7

#: A (partial) assignment maps variable index -> value index.
Evidence = Mapping[int, int]


@dataclass(frozen=True)
class RandomVariable:
    """A named discrete variable with an ordered list of parent indices."""

    name: str
    cardinality: int
    parents: tuple[int, ...] = ()

    def __post_init__(self):
        if self.cardinality < 1:
            raise ValueError(f"variable {self.name!r}: cardinality must be >= 1")
        object.__setattr__(self, "parents", tuple(self.parents))


@dataclass(frozen=True)
class Cpt:
    """Dense conditional table for one variable.

    ``table`` has shape ``(*parent_cardinalities, cardinality)``; the
    last axis is a probability vector for each parent assignment.
    """

    variable: int
    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "table", np.asarray(self.table, dtype=float))


@dataclass(frozen=True)
class BayesNet:
    """Validated network: variables, one CPT per variable, cached topo order."""

    variables: tuple[RandomVariable, ...]
    cpts: tuple[Cpt, ...]
    topo_order: tuple[int, ...] = field(compare=False)

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    @property
    def max_parents(self) -> int:
        return max((len(v.parents) for v in self.variables), default=0)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(v.cardinality for v in self.variables)

    @property
    def joint_size(self) -> int:
        size = 1
        for card in self.cardinalities:
            size *= card
        return size


def _topological_order(variables: Sequence[RandomVariable]) -> tuple[int, ...]:
    """Kahn's algorithm over parent edges; raises CyclicGraph on failure.

    Ready nodes are consumed in ascending index order so the result is
    deterministic.
    """
    n = len(variables)
    indegree = [len(v.parents) for v in variables]
    children: list[list[int]] = [[] for _ in range(n)]
    for child, var in enumerate(variables):
        for p in var.parents:
            children[p].append(child)
    ready = sorted(i for i in range(n) if indegree[i] == 0)
    order: list[int] = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        freed = []
        for c in children[node]:
            indegree[c] -= 1
            if indegree[c] == 0:
                freed.append(c)
        if freed:
            ready = sorted(ready + freed)
    if len(order) != n:
        raise CyclicGraph("parent structure contains a directed cycle")
    return tuple(order)


def build_net(variables: Sequence[RandomVariable], cpts: Sequence[Cpt]) -> BayesNet:
    """Validate and assemble a network.

    Checks parent indices, acyclicity, CPT shapes, and row
    normalization (rows off by more than ``NORMALIZATION_TOL`` are
    rejected; smaller deviations are renormalized in place).
    """
    variables = tuple(variables)
    n = len(variables)
    for i, var in enumerate(variables):
        for p in var.parents:
            if not 0 <= p < n:
                raise CptShapeMismatch(
                    f"variable {var.name!r}: parent index {p} out of range"
                )
            if p == i:
                raise CyclicGraph(f"variable {var.name!r} lists itself as parent")

    if len(cpts) != n:
        raise CptShapeMismatch(f"expected {n} CPTs, got {len(cpts)}")
    by_var = {c.variable: c for c in cpts}
    if sorted(by_var) != list(range(n)):
        raise CptShapeMismatch("CPTs must cover each variable exactly once")

    order = _topological_order(variables)

    normalized: list[Cpt] = []
    for i, var in enumerate(variables):
        table = by_var[i].table
        expected = tuple(variables[p].cardinality for p in var.parents) + (
            var.cardinality,
        )
        if table.shape != expected:
            raise CptShapeMismatch(
                f"variable {var.name!r}: CPT shape {table.shape} != {expected}"
            )
        if np.any(table < 0):
            raise CptNotNormalized(f"variable {var.name!r}: negative probability")
        sums = table.sum(axis=-1)
        if np.any(np.abs(sums - 1.0) > NORMALIZATION_TOL):
            worst = float(np.abs(sums - 1.0).max())
            raise CptNotNormalized(
                f"variable {var.name!r}: row sum deviates from 1 by {worst:.3g}"
            )
        normalized.append(Cpt(i, table / sums[..., None]))

    return BayesNet(variables=variables, cpts=tuple(normalized), topo_order=order)


# ---------------------------------------------------------------------------
# Enumeration inference
# ---------------------------------------------------------------------------

def exact_joint(net: BayesNet, limit: int = DEFAULT_JOINT_LIMIT) -> np.ndarray:
    """Full joint distribution as a flat vector in C order over assignments.

    Entry for assignment x is the product of CPT rows; the brute-force
    oracle behind every other inference routine here.
    """
    if net.joint_size > limit:
        raise JointTooLarge(f"joint size {net.joint_size} exceeds limit {limit}")
    cards = net.cardinalities
    joint = np.ones(cards)
    for i, var in enumerate(net.variables):
        table = net.cpts[i].table
        axes = (*var.parents, i)
        # permute CPT axes into ascending global order, pad with singleton axes
        perm = np.argsort(axes)
        shape = [1] * net.num_variables
        for ax, size in zip(axes, table.shape):
            shape[ax] = size
        joint = joint * np.transpose(table, perm).reshape(shape)
    return joint.reshape(-1)


def _evidence_slicer(net: BayesNet, evidence: Evidence) -> tuple:
    index: list[object] = [slice(None)] * net.num_variables
    for var, value in evidence.items():
        if not 0 <= value < net.variables[var].cardinality:
            raise ValueError(
                f"evidence value {value} out of range for variable "
                f"{net.variables[var].name!r}"
            )
        index[var] = value
    return tuple(index)


def evidence_probability(
    net: BayesNet, evidence: Evidence, limit: int = DEFAULT_JOINT_LIMIT
) -> float:
    """P(evidence) by enumeration."""
    joint = exact_joint(net, limit).reshape(net.cardinalities)
    return float(joint[_evidence_slicer(net, evidence)].sum())


def exact_conditional(
    net: BayesNet,
    query_vars: Sequence[int],
    evidence: Evidence,
    limit: int = DEFAULT_JOINT_LIMIT,
) -> tuple[np.ndarray, float]:
    """Posterior over the query variables plus the evidence probability.

    The returned vector enumerates joint values of ``query_vars`` in C
    order (their given order).  Raises ZeroEvidenceProbability when the
    evidence has no support.
    """
    query_vars = list(query_vars)
    overlap = set(query_vars) & set(evidence)
    if overlap:
        raise ValueError(f"query variables {sorted(overlap)} are fixed by evidence")
    joint = exact_joint(net, limit).reshape(net.cardinalities)
    sub = joint[_evidence_slicer(net, evidence)]
    prob_e = float(sub.sum())
    if prob_e <= 0.0:
        raise ZeroEvidenceProbability("evidence has probability zero")
    # axes of `sub` correspond to non-evidence variables in index order
    remaining = [i for i in range(net.num_variables) if i not in evidence]
    keep = [remaining.index(q) for q in query_vars]
    drop = tuple(ax for ax in range(len(remaining)) if ax not in keep)
    marginal = sub.sum(axis=drop) if drop else sub
    # order the kept axes as the caller listed them
    current = [ax for ax in range(len(remaining)) if ax in keep]
    marginal = np.transpose(marginal, [current.index(ax) for ax in keep])
    return marginal.reshape(-1) / prob_e, prob_e


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def _pick(row: np.ndarray, u: float) -> int:
    cum = np.cumsum(row)
    return min(int(np.searchsorted(cum, u, side="right")), len(row) - 1)


def direct_sample(
    net: BayesNet, rng: np.random.Generator, ledger: QueryLedger | None = None,
    site: str = "direct",
) -> np.ndarray:
    """One joint sample, drawn variable by variable in topological order.

    Costs exactly one query when a ledger is supplied.
    """
    values = np.zeros(net.num_variables, dtype=np.int64)
    for i in net.topo_order:
        row = net.cpts[i].table[tuple(values[p] for p in net.variables[i].parents)]
        values[i] = _pick(row, rng.random())
    if ledger is not None:
        ledger.add(site, 1, accepted=1)
    return values


def sample_batch(
    net: BayesNet,
    size: int,
    rng: np.random.Generator,
    ledger: QueryLedger | None = None,
    site: str = "direct",
) -> np.ndarray:
    """Vectorized direct sampling; returns an array of shape (size, N).

    Costs ``size`` queries.  Consumes the generator differently from
    repeated :func:`direct_sample` calls (one uniform block per
    variable), so fix one code path per experiment.
    """
    values = np.zeros((size, net.num_variables), dtype=np.int64)
    for i in net.topo_order:
        table = net.cpts[i].table
        parents = net.variables[i].parents
        if parents:
            rows = table[tuple(values[:, p] for p in parents)]
        else:
            rows = np.broadcast_to(table, (size, table.shape[-1]))
        cum = np.cumsum(rows, axis=1)
        u = rng.random(size)
        values[:, i] = np.minimum(
            (cum < u[:, None]).sum(axis=1), table.shape[-1] - 1
        )
    if ledger is not None:
        ledger.add(site, size, accepted=size)
    return values


def matches_evidence(samples: np.ndarray, evidence: Evidence) -> np.ndarray:
    """Boolean mask of rows consistent with the evidence."""
    if samples.ndim == 1:
        samples = samples[None, :]
    mask = np.ones(samples.shape[0], dtype=bool)
    for var, value in evidence.items():
        mask &= samples[:, var] == value
    return mask


def rejection_sample(
    net: BayesNet,
    evidence: Evidence,
    rng: np.random.Generator,
    ledger: QueryLedger | None = None,
    site: str = "rejection",
    max_attempts: int = DEFAULT_ATTEMPT_CAP,
) -> np.ndarray:
    """Direct-sample until the draw matches the evidence; return it.

    Every generated sample (accepted or rejected) costs one query.
    """
    for _ in range(max_attempts):
        values = np.zeros(net.num_variables, dtype=np.int64)
        for i in net.topo_order:
            row = net.cpts[i].table[
                tuple(values[p] for p in net.variables[i].parents)
            ]
            values[i] = _pick(row, rng.random())
        if ledger is not None:
            ledger.add(site, 1)
        if bool(matches_evidence(values, evidence)[0]):
            if ledger is not None:
                ledger.site_accepted[site] = ledger.site_accepted.get(site, 0) + 1
            return values
    raise RejectionBudgetExceeded(
        f"no accepted sample within {max_attempts} attempts"
    )


def rejection_sample_batch(
    net: BayesNet,
    evidence: Evidence,
    count: int,
    rng: np.random.Generator,
    ledger: QueryLedger | None = None,
    site: str = "rejection",
    max_attempts: int = DEFAULT_ATTEMPT_CAP,
) -> np.ndarray:
    """Vectorized rejection sampling: ``count`` accepted samples, shape (count, N).

    Generated-sample accounting matches the scalar variant; the cap
    applies to the total generated for the whole call.
    """
    accepted: list[np.ndarray] = []
    have = 0
    generated = 0
    chunk = max(64, 2 * count)
    while have < count:
        if generated >= max_attempts:
            raise RejectionBudgetExceeded(
                f"only {have}/{count} accepted within {max_attempts} attempts"
            )
        chunk = min(chunk, max_attempts - generated)
        draws = sample_batch(net, chunk, rng)
        mask = matches_evidence(draws, evidence)
        hits = np.nonzero(mask)[0]
        if have + hits.size >= count:
            # charge only through the draw that completes the request, so
            # the ledger matches sequential draw-until-accepted semantics
            last = int(hits[count - have - 1])
            generated += last + 1
            if ledger is not None:
                ledger.add(site, last + 1)
            accepted.append(draws[hits[: count - have]])
            have = count
            break
        generated += chunk
        if ledger is not None:
            ledger.add(site, chunk)
        if hits.size:
            accepted.append(draws[hits])
            have += hits.size
        # grow the chunk toward the observed acceptance rate
        rate = max(have / generated, 1.0 / chunk)
        chunk = max(64, int((count - have) / rate * 1.25) + 1)
    result = np.concatenate(accepted, axis=0)
    if ledger is not None:
        ledger.site_accepted[site] = ledger.site_accepted.get(site, 0) + count
    return result
