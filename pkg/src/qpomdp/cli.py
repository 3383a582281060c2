"""Command-line harness.

Subcommands map one-to-one onto the benchmark experiments plus the
bound calculators and the amplitude-level validation suite::

    qpomdp sweep-pe        --out results [--accepted 1000] [--seed 0]
    qpomdp reward          --env tiger --out results [flags]
    qpomdp cost            --env tiger --out results [flags]
    qpomdp cost-vs-reward  --env tiger --out results [flags]
    qpomdp pac             --env tiger --epsilon 20 --delta 0.1 [flags]
    qpomdp validate        [--env tiger|robot|both]

Environments: ``tiger``, ``robot``, or ``file:<path>`` in the model
text format.  Every experiment writes schema-tagged CSVs plus a JSON
metadata sidecar into ``--out``; identical (config, seed) reruns are
byte-identical.
"""

from __future__ import annotations

import argparse
import itertools
import sys

import numpy as np

from . import __version__
from .amplitude import (
    boosted_probability,
    encode,
    encode_binary_gates,
    evidence_mask,
    grover_iterate,
)
from .bayesnet import Cpt, RandomVariable, build_net
from .bench import (
    DEFAULT_REWARD_SAMPLES,
    DEFAULT_SAMPLE_SET,
    ExperimentConfig,
    default_accept_grid,
    drive_cost,
    drive_cost_vs_reward,
    drive_reward,
    drive_sweep,
    resolve_env,
)
from .envs import DEFAULT_DISCOUNT
from .planner import PacParams, derive_budget, pac_bounds
from .pomdp import (
    SLICE_NEXT_STATE,
    SLICE_OBSERVATION,
    build_slice,
    exact_belief_update,
    exact_observation_probs,
)


def _add_experiment_flags(parser: argparse.ArgumentParser, samples_default: str):
    parser.add_argument("--env", default="tiger",
                        help="tiger, robot, or file:<path>")
    parser.add_argument("--algo", default="both",
                        choices=["classical", "quantum", "both"],
                        help="restrict output to one algorithm")
    parser.add_argument("--horizon", type=int, default=2)
    parser.add_argument("--steps", type=int, default=50)
    parser.add_argument("--runs", type=int, default=100)
    parser.add_argument("--samples", default=samples_default,
                        help="comma-separated classical belief-sample counts")
    parser.add_argument("--reward-samples", type=int,
                        default=DEFAULT_REWARD_SAMPLES)
    parser.add_argument("--obs-samples", type=int, default=None,
                        help="observation samples per node "
                             "(default: same as --reward-samples)")
    parser.add_argument("--gamma", type=float, default=DEFAULT_DISCOUNT)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="qpomdp-out")
    parser.add_argument("--bins", type=int, default=12)
    parser.add_argument("--workers", type=int, default=2)


def _experiment_config(args) -> ExperimentConfig:
    samples = tuple(int(s) for s in str(args.samples).split(",") if s)
    algos = (
        ("classical", "quantum") if args.algo == "both" else (args.algo,)
    )
    return ExperimentConfig(
        env=args.env,
        horizon=args.horizon,
        steps=args.steps,
        runs=args.runs,
        samples=samples,
        reward_samples=args.reward_samples,
        observation_samples=(
            args.obs_samples if args.obs_samples is not None else args.reward_samples
        ),
        discount=args.gamma,
        seed=args.seed,
        bins=args.bins,
        workers=args.workers,
        algos=algos,
    )


def _cmd_sweep(args) -> int:
    grid = None
    if args.grid:
        grid = [float(p) for p in args.grid.split(",")]
    path = drive_sweep(args.out, grid, args.accepted, args.seed)
    print(f"wrote {path}")
    return 0


def _cmd_reward(args) -> int:
    runs_path, summary_path = drive_reward(args.out, _experiment_config(args))
    print(f"wrote {runs_path}")
    print(f"wrote {summary_path}")
    return 0


def _cmd_cost(args) -> int:
    runs_path, summary_path = drive_cost(args.out, _experiment_config(args))
    print(f"wrote {runs_path}")
    print(f"wrote {summary_path}")
    return 0


def _cmd_cvr(args) -> int:
    points_path, binned_path = drive_cost_vs_reward(args.out, _experiment_config(args))
    print(f"wrote {points_path}")
    print(f"wrote {binned_path}")
    return 0


def _cmd_pac(args) -> int:
    pomdp = resolve_env(args.env, args.gamma)
    params = PacParams(
        epsilon=args.epsilon,
        delta=args.delta,
        steps=args.steps,
        discount=args.gamma,
        max_reward=(
            args.rmax if args.rmax is not None else pomdp.max_abs_reward
        ),
        sizes=pomdp.sizes,
        horizon=args.horizon,
    )
    bounds = pac_bounds(params)
    print(f"min_horizon          {bounds.min_horizon}")
    print(f"max_sampling_failure {bounds.max_sampling_failure:.17g}")
    print(f"min_reward_samples   {bounds.min_reward_samples:.17g}")
    if args.budget_from is not None:
        budget = derive_budget(args.budget_from, pomdp.sizes, args.gamma,
                               args.horizon)
        print(f"budget               reward={budget.reward_samples} "
              f"observation={budget.observation_samples} "
              f"belief={budget.belief_samples}")
    return 0


def _belief_grid(num_states: int) -> list[np.ndarray]:
    """Deterministic belief set: uniform, point masses, and tilted mixes."""
    beliefs = [np.full(num_states, 1.0 / num_states)]
    for s in range(num_states):
        point = np.zeros(num_states)
        point[s] = 1.0
        beliefs.append(point)
        tilted = np.full(num_states, 0.1 / max(num_states - 1, 1))
        tilted[s] = 0.9
        beliefs.append(tilted / tilted.sum())
    return beliefs


def _validate_env(name: str, discount: float, tol: float = 1e-10) -> list[str]:
    """Amplitude-level equivalence checks for one environment."""
    failures = []
    pomdp = resolve_env(name, discount)
    for belief, action, obs in itertools.product(
        _belief_grid(pomdp.num_states),
        range(pomdp.num_actions),
        range(pomdp.num_observations),
    ):
        obs_prob = float(exact_observation_probs(pomdp, belief, action)[obs])
        if obs_prob <= 0.0:
            continue
        ddn = build_slice(pomdp, belief, action)
        posterior = exact_belief_update(pomdp, belief, action, obs).belief
        evidence = {SLICE_OBSERVATION: obs}
        mask = evidence_mask(ddn.net.cardinalities, evidence)
        ref = encode(ddn.net)
        state = ref
        for depth in range(4):
            probs = state.probabilities()
            good = probs[mask]
            # marginal over the next state within the evidence subspace
            keep = np.stack(
                np.unravel_index(np.nonzero(mask)[0], ddn.net.cardinalities),
                axis=1,
            )[:, SLICE_NEXT_STATE]
            marginal = np.zeros(pomdp.num_states)
            np.add.at(marginal, keep, good)
            marginal /= marginal.sum()
            err = float(np.abs(marginal - posterior).max())
            mass_err = abs(
                float(good.sum()) - boosted_probability(obs_prob, depth)
            )
            if err > tol or mass_err > tol:
                failures.append(
                    f"{name}: belief={np.round(belief, 3)} action={action} "
                    f"obs={obs} depth={depth} err={err:.2e} mass={mass_err:.2e}"
                )
            state = grover_iterate(state, ref, evidence)
    return failures


def _cmd_validate(args) -> int:
    envs = ["tiger", "robot"] if args.env == "both" else [args.env]
    status = 0
    for name in envs:
        failures = _validate_env(name, args.gamma)
        label = f"belief-update equivalence [{name}]"
        if failures:
            status = 1
            print(f"FAIL {label}: {len(failures)} mismatches")
            for line in failures[:5]:
                print(f"     {line}")
        else:
            print(f"PASS {label}")

    # gate-level cross-check on the worked three-variable binary network
    net = build_net(
        [
            RandomVariable("rain", 2),
            RandomVariable("sprinkler", 2, parents=(0,)),
            RandomVariable("wet", 2, parents=(0, 1)),
        ],
        [
            Cpt(0, [0.9, 0.1]),
            Cpt(1, [[0.6, 0.4], [0.99, 0.01]]),
            Cpt(2, [[[0.6, 0.4], [0.1, 0.9]], [[0.01, 0.99], [0.01, 0.99]]]),
        ],
    )
    _, gate_state = encode_binary_gates(net)
    gap = float(np.abs(gate_state.amplitudes - encode(net).amplitudes).max())
    if gap <= 1e-10:
        print("PASS gate/amplitude agreement")
    else:
        status = 1
        print(f"FAIL gate/amplitude agreement: {gap:.2e}")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpomdp",
        description="Benchmarks comparing plain and amplitude-amplified "
                    "rejection sampling in lookahead planning.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-pe", help="cost per accepted sample over an "
                                        "acceptance-probability grid")
    p.add_argument("--grid", default="",
                   help="comma-separated probabilities "
                        "(default: 2^-1 .. 2^-10)")
    p.add_argument("--accepted", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="qpomdp-out")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("reward", help="equal-cost cumulative reward runs")
    _add_experiment_flags(p, ",".join(str(s) for s in DEFAULT_SAMPLE_SET))
    p.set_defaults(func=_cmd_reward)

    p = sub.add_parser("cost", help="equal-performance cumulative cost runs")
    _add_experiment_flags(p, "1")
    p.set_defaults(func=_cmd_cost)

    p = sub.add_parser("cost-vs-reward", help="final reward vs total queries")
    _add_experiment_flags(p, "50")
    p.set_defaults(func=_cmd_cvr)

    p = sub.add_parser("pac", help="sample/confidence/horizon bound calculators")
    p.add_argument("--env", default="tiger")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--horizon", type=int, default=2)
    p.add_argument("--gamma", type=float, default=DEFAULT_DISCOUNT)
    p.add_argument("--rmax", type=float, default=None,
                   help="max |reward| (default: from the environment)")
    p.add_argument("--budget-from", type=int, default=None,
                   help="also derive the sample budget from this reward count")
    p.set_defaults(func=_cmd_pac)

    p = sub.add_parser("validate", help="amplitude-level equivalence suite")
    p.add_argument("--env", default="both", choices=["tiger", "robot", "both"])
    p.add_argument("--gamma", type=float, default=DEFAULT_DISCOUNT)
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
