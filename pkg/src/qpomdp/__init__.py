"""Hybrid quantum-classical planning benchmarks for partially observable
decision processes: Bayesian-network sampling, amplitude-amplified
inference, finite-horizon lookahead, and the benchmark harness."""

from .bayesnet import (
    BayesNet,
    Cpt,
    RandomVariable,
    build_net,
    direct_sample,
    exact_conditional,
    exact_joint,
    rejection_sample,
)
from .amplitude import (
    AmplificationPlan,
    AmplitudeState,
    cost_model,
    encode,
    encode_binary_gates,
    grover_iterate,
    phase_flip,
    plan_amplification,
    quantum_rejection_sample,
    rotation_angle,
)
from .metering import ComplexityReport, QueryLedger, SpaceSizes, summarize
from .pomdp import (
    BeliefUpdateResult,
    DdnSlice,
    Pomdp,
    build_slice,
    exact_belief_update,
    expected_reward,
    observation_probabilities,
    sampled_belief_update,
)

__version__ = "0.1.0"
