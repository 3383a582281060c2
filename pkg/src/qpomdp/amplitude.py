"""Amplitude-level simulation of network encoding and amplitude amplification.

States are real vectors over the joint assignment space of a
:class:`~qpomdp.bayesnet.BayesNet` (mixed-radix index, C order), not
tensor-product qubit space; this handles non-binary variables directly
and the binary gate plan provides the circuit-level cross-check.

The closed-form cost model lives here too: it lets the benchmark
harness reproduce amplified-sampling query counts without touching
amplitude vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bayesnet import (
    BayesNet,
    DEFAULT_ATTEMPT_CAP,
    DEFAULT_JOINT_LIMIT,
    Evidence,
    evidence_probability,
    exact_joint,
)
from .errors import (
    DimensionMismatch,
    InvalidProbability,
    JointTooLarge,
    NonBinaryVariable,
    NotNormalized,
    RejectionBudgetExceeded,
    ZeroEvidenceProbability,
)
from .metering import QueryLedger


@dataclass(frozen=True)
class AmplitudeState:
    """Real amplitude vector over joint assignments of a network."""

    amplitudes: np.ndarray
    cardinalities: tuple[int, ...]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return self.amplitudes ** 2


def encode(net: BayesNet, limit: int = DEFAULT_JOINT_LIMIT) -> AmplitudeState:
    """Simulate the encoding operator applied to the all-zeros state.

    The amplitude at assignment x is the product over variables of
    sqrt(P(x_i | parents)), so squared amplitudes reproduce the joint.
    """
    return AmplitudeState(
        amplitudes=np.sqrt(exact_joint(net, limit)),
        cardinalities=net.cardinalities,
    )


def evidence_mask(cardinalities: tuple[int, ...], evidence: Evidence) -> np.ndarray:
    """Boolean mask over the flat joint index of assignments matching evidence."""
    mask = np.zeros(cardinalities, dtype=bool)
    index: list[object] = [slice(None)] * len(cardinalities)
    for var, value in evidence.items():
        index[var] = value
    mask[tuple(index)] = True
    return mask.reshape(-1)


def dump_amplitudes(state: AmplitudeState, path: str) -> None:
    """Debug dump: one CSV row per basis state (index, assignment, amplitude)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("index,assignment,amplitude\n")
        for flat, amp in enumerate(state.amplitudes):
            values = np.unravel_index(flat, state.cardinalities)
            assignment = " ".join(str(int(v)) for v in values)
            fh.write(f"{flat},{assignment},{format(float(amp), '.17g')}\n")


def rotation_angle(p0: float, p1: float) -> float:
    """Rotation angle realizing a binary CPT row (p0, p1).

    Returns 2*arctan(sqrt(p1/p0)); pi when p0 is zero.
    """
    if p0 < 0 or p1 < 0 or abs(p0 + p1 - 1.0) > 1e-9:
        raise NotNormalized(f"({p0}, {p1}) is not a probability pair")
    if p0 == 0.0:
        return math.pi
    return 2.0 * math.atan(math.sqrt(p1 / p0))


@dataclass(frozen=True)
class GateRecord:
    """One controlled rotation: target variable, controlling parent values, angle."""

    target: int
    parent_values: tuple[int, ...]
    angle: float


@dataclass(frozen=True)
class BinaryGatePlan:
    """Ordered rotation sequence encoding an all-binary network."""

    gates: tuple[GateRecord, ...]


def encode_binary_gates(
    net: BayesNet, limit: int = DEFAULT_JOINT_LIMIT
) -> tuple[BinaryGatePlan, AmplitudeState]:
    """Build the controlled-rotation sequence and apply it to the zero state.

    One rotation per CPT row, controlled on each parent assignment;
    the resulting state must agree with :func:`encode` entrywise.
    """
    for var in net.variables:
        if var.cardinality != 2:
            raise NonBinaryVariable(
                f"variable {var.name!r} has cardinality {var.cardinality}"
            )
    if net.joint_size > limit:
        raise JointTooLarge(f"joint size {net.joint_size} exceeds limit {limit}")

    n = net.num_variables
    state = np.zeros(net.cardinalities)
    state[(0,) * n] = 1.0

    gates: list[GateRecord] = []
    for i in net.topo_order:
        var = net.variables[i]
        table = net.cpts[i].table
        parent_cards = tuple(net.variables[p].cardinality for p in var.parents)
        for parent_values in np.ndindex(*parent_cards) if parent_cards else [()]:
            angle = rotation_angle(*table[parent_values])
            gates.append(GateRecord(i, tuple(int(v) for v in parent_values), angle))
            # apply RY(angle) to axis i on the slice where parents match
            index: list[object] = [slice(None)] * n
            for p, v in zip(var.parents, parent_values):
                index[p] = v
            lo = tuple(index[:i] + [0] + index[i + 1:])
            hi = tuple(index[:i] + [1] + index[i + 1:])
            c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
            a0, a1 = state[lo].copy(), state[hi].copy()
            state[lo] = c * a0 - s * a1
            state[hi] = s * a0 + c * a1
    return BinaryGatePlan(tuple(gates)), AmplitudeState(
        amplitudes=state.reshape(-1), cardinalities=net.cardinalities
    )


def phase_flip(state: AmplitudeState, evidence: Evidence) -> AmplitudeState:
    """Negate the amplitudes of evidence-matching assignments."""
    mask = evidence_mask(state.cardinalities, evidence)
    flipped = state.amplitudes.copy()
    flipped[mask] = -flipped[mask]
    return AmplitudeState(flipped, state.cardinalities)


def grover_iterate(
    state: AmplitudeState, encoded_ref: AmplitudeState, evidence: Evidence
) -> AmplitudeState:
    """One amplification step: evidence phase flip, then reflection about the
    encoded state (which is what conjugating the zero-state reflection by the
    encoding operator amounts to at amplitude level)."""
    if state.amplitudes.shape != encoded_ref.amplitudes.shape:
        raise DimensionMismatch(
            f"state dim {state.amplitudes.shape} != reference "
            f"{encoded_ref.amplitudes.shape}"
        )
    flipped = phase_flip(state, evidence).amplitudes
    ref = encoded_ref.amplitudes
    reflected = 2.0 * float(ref @ flipped) * ref - flipped
    return AmplitudeState(reflected, state.cardinalities)


@dataclass(frozen=True)
class AmplificationPlan:
    """Chosen amplification depth for a given acceptance probability.

    ``cost_per_attempt`` counts encoding-operator applications: one for
    preparation plus two per iteration (the amplification operator uses
    the encoder twice).
    """

    accept_prob: float
    angle: float
    iterations: int
    boosted_prob: float
    cost_per_attempt: int

    @property
    def expected_cost(self) -> float:
        """Expected queries per accepted sample."""
        return self.cost_per_attempt / self.boosted_prob


def boosted_probability(accept_prob: float, iterations: int) -> float:
    """Success probability after the given number of amplification steps."""
    angle = math.asin(math.sqrt(accept_prob))
    return math.sin((2 * iterations + 1) * angle) ** 2


def plan_amplification(accept_prob: float) -> AmplificationPlan:
    """Pick the iteration count minimizing expected queries per accepted sample.

    Candidates run from 0 to ceil(pi / (4*angle)); ties break toward
    fewer iterations, so probabilities at or above one half stay at
    zero iterations and coincide with plain rejection sampling.
    """
    if not 0.0 < accept_prob <= 1.0:
        raise InvalidProbability(f"acceptance probability {accept_prob} not in (0, 1]")
    angle = math.asin(math.sqrt(accept_prob))
    max_iters = math.ceil(math.pi / (4.0 * angle))
    best: tuple[float, int, float] | None = None
    for k in range(max_iters + 1):
        p_k = boosted_probability(accept_prob, k)
        cost = math.inf if p_k == 0.0 else (1 + 2 * k) / p_k
        if best is None or cost < best[0]:
            best = (cost, k, p_k)
    _, k, p_k = best
    return AmplificationPlan(
        accept_prob=accept_prob,
        angle=angle,
        iterations=k,
        boosted_prob=p_k,
        cost_per_attempt=1 + 2 * k,
    )


def cost_model(accept_prob: float, mode: str) -> float:
    """Expected queries per accepted sample for either sampling routine."""
    if not 0.0 < accept_prob <= 1.0:
        raise InvalidProbability(f"acceptance probability {accept_prob} not in (0, 1]")
    if mode == "classical":
        return 1.0 / accept_prob
    if mode == "quantum":
        return plan_amplification(accept_prob).expected_cost
    raise ValueError(f"unknown mode {mode!r}")


def amplified_distribution(
    net: BayesNet, evidence: Evidence, limit: int = DEFAULT_JOINT_LIMIT
) -> tuple[np.ndarray, AmplificationPlan]:
    """Measurement distribution of the amplified state, plus the plan used.

    The acceptance probability is computed exactly by enumeration
    before choosing the iteration count.
    """
    prob_e = evidence_probability(net, evidence, limit)
    if prob_e <= 0.0:
        raise ZeroEvidenceProbability("evidence has probability zero")
    plan = plan_amplification(prob_e)
    ref = encode(net, limit)
    state = ref
    for _ in range(plan.iterations):
        state = grover_iterate(state, ref, evidence)
    return state.probabilities(), plan


def quantum_rejection_sample_batch(
    net: BayesNet,
    evidence: Evidence,
    count: int,
    rng: np.random.Generator,
    ledger: QueryLedger | None = None,
    site: str = "rejection",
    max_attempts: int = DEFAULT_ATTEMPT_CAP,
    limit: int = DEFAULT_JOINT_LIMIT,
) -> np.ndarray:
    """Amplified rejection sampling: ``count`` accepted assignments, shape (count, N).

    Each attempt measures the amplified state and costs
    ``cost_per_attempt`` queries; mismatching draws are rejected.
    Accepted draws follow the exact conditional, whatever the depth.
    """
    probs, plan = amplified_distribution(net, evidence, limit)
    cum = np.cumsum(probs)
    cum /= cum[-1]
    mask = evidence_mask(net.cardinalities, evidence)

    rows: list[np.ndarray] = []
    have = 0
    attempts = 0
    chunk = max(16, int(count / max(plan.boosted_prob, 1e-12)) + 1)
    while have < count:
        if attempts >= max_attempts:
            raise RejectionBudgetExceeded(
                f"only {have}/{count} accepted within {attempts} attempts"
            )
        chunk = min(chunk, max_attempts - attempts)
        draws = np.minimum(
            np.searchsorted(cum, rng.random(chunk), side="right"), len(cum) - 1
        )
        good = np.nonzero(mask[draws])[0]
        if have + good.size >= count:
            last = int(good[count - have - 1])
            attempts += last + 1
            if ledger is not None:
                ledger.add(site, (last + 1) * plan.cost_per_attempt)
            rows.append(draws[good[: count - have]])
            have = count
            break
        attempts += chunk
        if ledger is not None:
            ledger.add(site, chunk * plan.cost_per_attempt)
        if good.size:
            rows.append(draws[good])
            have += good.size
        chunk = max(16, int((count - have) / max(plan.boosted_prob, 1e-12)) + 1)
    if ledger is not None:
        ledger.site_accepted[site] = ledger.site_accepted.get(site, 0) + count
    flat = np.concatenate(rows)
    return np.stack(np.unravel_index(flat, net.cardinalities), axis=1).astype(np.int64)


def quantum_rejection_sample(
    net: BayesNet,
    evidence: Evidence,
    rng: np.random.Generator,
    ledger: QueryLedger | None = None,
    site: str = "rejection",
    max_attempts: int = DEFAULT_ATTEMPT_CAP,
    limit: int = DEFAULT_JOINT_LIMIT,
) -> np.ndarray:
    """Single accepted assignment from the amplified sampler."""
    return quantum_rejection_sample_batch(
        net, evidence, 1, rng, ledger, site, max_attempts, limit
    )[0]
