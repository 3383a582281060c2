"""Benchmark experiments producing deterministic CSV datasets.

Four experiment families, one per figure kind:

* ``sweep_accept_prob`` -- measured queries per accepted sample vs the
  acceptance probability, for both samplers (the fundamental scaling).
* ``reward_experiment`` -- equal-cost protocol: both agents work from
  the same per-update query budget; the amplified sampler draws the
  classical counts in the tree at its cheaper rate and spends the
  banked difference at the end-of-step filter update.  Emits cumulative
  rewards and their per-step paired difference.
* ``cost_experiment`` -- equal-performance protocol: both agents use
  the same accepted-sample counts; ledgers accrue the deterministic
  expected query cost of each routine.  Emits the cumulative cost
  difference.
* ``cost_vs_reward_experiment`` -- per-run (final cumulative reward,
  total queries) points at equal sample counts, plus per-algorithm
  binned averages.

All experiments are reproducible bit-for-bit from (config, seed): runs
own disjoint RNG substreams and results merge in run order, so worker
scheduling cannot leak into the output.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .amplitude import cost_model, quantum_rejection_sample
from .bayesnet import Cpt, RandomVariable, build_net, rejection_sample
from .envs import DEFAULT_DISCOUNT, Episode, builtin_pomdp, step
from .metering import SITE_BELIEF, SITE_OBSERVATION, SITE_REWARD, QueryLedger
from .modelfile import load_pomdp
from .planner import (
    EXPECTED,
    BudgetAccount,
    LookaheadConfig,
    PlanResult,
    SampleBudget,
    estimate_next_belief,
    plan,
)
from .pomdp import Pomdp
from .rng import StreamFactory, substream

CSV_SCHEMA_PREFIX = "qpomdp"
CSV_SCHEMA_VERSION = "v1"

CLASSICAL = "classical"
QUANTUM = "quantum"

DEFAULT_SAMPLE_SET = (5, 15, 50, 100)
DEFAULT_REWARD_SAMPLES = 250


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared experiment settings; ``samples`` is the classical
    accepted-sample count per belief update (a sweep for the reward
    experiment)."""

    env: str = "tiger"
    horizon: int = 2
    steps: int = 50
    runs: int = 100
    samples: tuple[int, ...] = DEFAULT_SAMPLE_SET
    reward_samples: int = DEFAULT_REWARD_SAMPLES
    observation_samples: int = DEFAULT_REWARD_SAMPLES
    discount: float = DEFAULT_DISCOUNT
    seed: int = 0
    bins: int = 12
    workers: int = 1
    algos: tuple[str, ...] = (CLASSICAL, QUANTUM)

    def __post_init__(self):
        if self.runs < 1 or self.steps < 1:
            raise ValueError("runs and steps must both be >= 1")
        object.__setattr__(self, "samples", tuple(int(s) for s in self.samples))
        for algo in self.algos:
            if algo not in (CLASSICAL, QUANTUM):
                raise ValueError(f"unknown algorithm {algo!r}")


def resolve_env(spec: str, discount: float) -> Pomdp:
    """Environment id: builtin name or ``file:<path>``."""
    if spec.startswith("file:"):
        return load_pomdp(spec[len("file:"):])
    return builtin_pomdp(spec, discount)


# ---------------------------------------------------------------------------
# CSV and metadata output
# ---------------------------------------------------------------------------

def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path: str, schema: str, header: list[str], rows: list[tuple]) -> None:
    """Write a schema-tagged CSV: comment line, header, then the rows.

    UTF-8, comma separators, LF newlines, floats at 17 significant
    digits; byte-identical output for identical inputs.
    """
    lines = [f"# schema={CSV_SCHEMA_PREFIX}.{schema}.{CSV_SCHEMA_VERSION}"]
    lines.append(",".join(header))
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row width {len(row)} != header width {len(header)}")
        lines.append(",".join(_format_cell(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_metadata(path: str, command: str, config: dict) -> None:
    payload = {
        "command": command,
        "config": config,
        "code_version": __version__,
        "csv_schema_version": CSV_SCHEMA_VERSION,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def config_dict(config: ExperimentConfig) -> dict:
    data = asdict(config)
    data["samples"] = list(config.samples)
    return data


# ---------------------------------------------------------------------------
# Acceptance-probability sweep (measured sampler costs)
# ---------------------------------------------------------------------------

def default_accept_grid() -> list[float]:
    return [2.0 ** -j for j in range(1, 11)]


def _single_evidence_net(accept_prob: float):
    var = RandomVariable("evidence", 2)
    return build_net([var], [Cpt(0, [1.0 - accept_prob, accept_prob])])


def sweep_accept_prob(
    grid: list[float] | None = None,
    accepted_per_point: int = 1000,
    seed: int = 0,
) -> list[tuple]:
    """Measured queries per accepted sample over an acceptance-probability grid.

    Each point runs the actual samplers (attempt-level) on a
    one-variable evidence network and reports mean and standard
    deviation of per-sample cost.  Rows: (accept_prob, algo, mean_cost,
    std_cost, accepted).
    """
    grid = default_accept_grid() if grid is None else list(grid)
    rows = []
    for point, prob in enumerate(grid):
        net = _single_evidence_net(prob)
        evidence = {0: 1}
        for algo, sampler in ((CLASSICAL, rejection_sample),
                              (QUANTUM, quantum_rejection_sample)):
            rng = substream(seed, run=point, site=f"sweep/{algo}")
            costs = np.empty(accepted_per_point)
            ledger = QueryLedger()
            previous = 0
            for i in range(accepted_per_point):
                sampler(net, evidence, rng, ledger)
                costs[i] = ledger.total_queries - previous
                previous = ledger.total_queries
            rows.append(
                (prob, algo, float(costs.mean()), float(costs.std()),
                 accepted_per_point)
            )
    return rows


def fit_loglog_slope(probs: np.ndarray, costs: np.ndarray) -> float:
    """Least-squares slope of log(cost) against log(accept_prob)."""
    return float(np.polyfit(np.log(np.asarray(probs, dtype=float)),
                            np.log(np.asarray(costs, dtype=float)), 1)[0])


# ---------------------------------------------------------------------------
# Episode simulation
# ---------------------------------------------------------------------------

def run_episode(
    pomdp: Pomdp,
    config: LookaheadConfig,
    steps: int,
    rng: "np.random.Generator | StreamFactory",
    ledger: QueryLedger | None = None,
    env_rng: np.random.Generator | None = None,
) -> Episode:
    """Plan, act, observe, and filter for a fixed number of steps.

    The agent's own belief filter runs under the same sampler and
    accounting as the in-tree updates.  The true initial state is drawn
    from the initial belief.

    ``env_rng``, when given, drives the environment dynamics separately
    from the agent's sampling.  Benchmarks share it between the two
    algorithms (common random numbers), so per-run differences isolate
    decision quality instead of environment luck.
    """
    if ledger is None:
        ledger = QueryLedger()
    if env_rng is None:
        env_rng = rng if isinstance(rng, np.random.Generator) else rng.site("env")
    episode = Episode()
    account = BudgetAccount() if config.equal_cost else None
    belief = pomdp.initial_belief.copy()
    state = int(env_rng.choice(pomdp.num_states, p=pomdp.initial_belief))
    for t in range(steps):
        queries_before = ledger.total_queries
        updates_before = ledger.belief_updates
        step_rng = rng.scoped(f"t{t}") if isinstance(rng, StreamFactory) else rng
        filter_rng = (
            rng.site(f"t{t}/filter") if isinstance(rng, StreamFactory) else rng
        )
        decision: PlanResult = plan(pomdp, belief, config, step_rng, ledger, account)
        state, observation, reward = step(pomdp, state, decision.action, env_rng)
        belief = estimate_next_belief(
            pomdp, belief, decision.action, observation, config, filter_rng,
            ledger, account, spend_savings=True,
        ).belief
        episode.states.append(state)
        episode.actions.append(decision.action)
        episode.observations.append(observation)
        episode.rewards.append(reward)
        episode.step_queries.append(ledger.total_queries - queries_before)
        episode.step_updates.append(ledger.belief_updates - updates_before)
        episode.action_values.append([float(q) for q in decision.q_values])
    return episode


@dataclass(frozen=True)
class _EpisodeTask:
    env: str
    discount: float
    algo: str
    belief_samples: int
    reward_samples: int
    observation_samples: int
    horizon: int
    steps: int
    seed: int
    run: int
    site: str
    env_site: str
    equal_cost: bool


@dataclass
class _EpisodeOutput:
    run: int
    actions: list[int]
    rewards: list[float]
    step_queries: list[float]
    acceptance_probs: list[float]
    step_updates: list[int]
    site_queries: dict[str, float]


def _episode_worker(task: _EpisodeTask) -> _EpisodeOutput:
    pomdp = resolve_env(task.env, task.discount)
    config = LookaheadConfig(
        horizon=task.horizon,
        budget=SampleBudget(
            task.reward_samples, task.observation_samples, task.belief_samples
        ),
        sampler=task.algo,
        accounting=EXPECTED,
        equal_cost=task.equal_cost,
    )
    rng = StreamFactory(task.seed, run=task.run, prefix=task.site)
    env_rng = substream(task.seed, run=task.run, site=task.env_site)
    ledger = QueryLedger()
    episode = run_episode(pomdp, config, task.steps, rng, ledger, env_rng)
    return _EpisodeOutput(
        run=task.run,
        actions=episode.actions,
        rewards=episode.rewards,
        step_queries=[float(q) for q in episode.step_queries],
        acceptance_probs=list(ledger.acceptance_probs),
        step_updates=episode.step_updates,
        site_queries=dict(ledger.site_queries),
    )


def _run_tasks(tasks: list[_EpisodeTask], workers: int) -> list[_EpisodeOutput]:
    if workers <= 1 or len(tasks) <= 1:
        outputs = [_episode_worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_episode_worker, tasks, chunksize=4))
    return sorted(outputs, key=lambda out: out.run)


# ---------------------------------------------------------------------------
# Equal-cost reward experiment
# ---------------------------------------------------------------------------

@dataclass
class RewardExperimentResult:
    run_rows: list[tuple] = field(default_factory=list)
    summary_rows: list[tuple] = field(default_factory=list)
    complexity_rows: list[tuple] = field(default_factory=list)
    #: (samples) -> array of per-run quantum-minus-classical cumulative
    #: rewards at the final step, for downstream significance checks
    final_diffs: dict[int, np.ndarray] = field(default_factory=dict)


def reward_experiment(config: ExperimentConfig) -> RewardExperimentResult:
    """Cumulative rewards under the equal-cost protocol.

    For each classical sample count in ``config.samples`` both agents
    run ``config.runs`` episodes under the same per-update query
    budget; the amplified agent banks its cheaper in-tree rate and
    spends the savings on its filter update.  Run rows: (samples, algo,
    run, step, reward, cumulative_reward, cumulative_queries).  Summary
    rows per (samples, step) carry means, deviations, and the paired
    difference.
    """
    result = RewardExperimentResult()
    for belief_samples in config.samples:
        series: dict[str, np.ndarray] = {}
        for algo in config.algos:
            # algo deliberately absent: paired runs share site-keyed randomness
            site = f"{config.env}/reward/plan/l={belief_samples}"
            env_site = f"{config.env}/reward/env/l={belief_samples}"
            tasks = [
                _EpisodeTask(
                    env=config.env,
                    discount=config.discount,
                    algo=algo,
                    belief_samples=belief_samples,
                    reward_samples=config.reward_samples,
                    observation_samples=config.observation_samples,
                    horizon=config.horizon,
                    steps=config.steps,
                    seed=config.seed,
                    run=run,
                    site=site,
                    env_site=env_site,
                    equal_cost=True,
                )
                for run in range(config.runs)
            ]
            outputs = _run_tasks(tasks, config.workers)
            rewards = np.array([out.rewards for out in outputs])
            queries = np.array([out.step_queries for out in outputs])
            cum_rewards = rewards.cumsum(axis=1)
            cum_queries = queries.cumsum(axis=1)
            series[algo] = cum_rewards
            for out in outputs:
                result.complexity_rows.append(
                    (belief_samples, algo, out.run)
                    + _complexity_cells(out)
                )
            for run, out in enumerate(outputs):
                for t in range(config.steps):
                    result.run_rows.append(
                        (
                            belief_samples,
                            algo,
                            run,
                            t + 1,
                            out.actions[t],
                            rewards[run, t],
                            cum_rewards[run, t],
                            cum_queries[run, t],
                        )
                    )
        if CLASSICAL in series and QUANTUM in series:
            diff = series[QUANTUM] - series[CLASSICAL]
            for t in range(config.steps):
                result.summary_rows.append(
                    (
                        belief_samples,
                        t + 1,
                        float(series[CLASSICAL][:, t].mean()),
                        float(series[CLASSICAL][:, t].std()),
                        float(series[QUANTUM][:, t].mean()),
                        float(series[QUANTUM][:, t].std()),
                        float(diff[:, t].mean()),
                        float(diff[:, t].std()),
                    )
                )
            result.final_diffs[belief_samples] = diff[:, -1].copy()
    return result


def _complexity_cells(out: _EpisodeOutput) -> tuple:
    """Realized cost factors and per-site totals for one run's ledger."""
    probs = np.asarray(out.acceptance_probs)
    classical_factor = float(np.sum(1.0 / probs))
    quantum_factor = float(np.sum(probs ** -0.5))
    return (
        classical_factor,
        quantum_factor,
        classical_factor / quantum_factor,
        float(sum(out.site_queries.values())),
        float(out.site_queries.get(SITE_REWARD, 0.0)),
        float(out.site_queries.get(SITE_OBSERVATION, 0.0)),
        float(out.site_queries.get(SITE_BELIEF, 0.0)),
    )


REWARD_RUN_HEADER = [
    "samples", "algo", "run", "step", "action", "reward",
    "cumulative_reward", "cumulative_queries",
]
REWARD_SUMMARY_HEADER = [
    "samples", "step", "classical_mean", "classical_std", "quantum_mean",
    "quantum_std", "diff_mean", "diff_std",
]
COMPLEXITY_HEADER = [
    "samples", "algo", "run", "classical_factor", "quantum_factor",
    "speedup_ratio", "total_queries", "reward_queries", "observation_queries",
    "belief_queries",
]


def bootstrap_interval(
    values: np.ndarray, rng: np.random.Generator,
    resamples: int = 2000, coverage: float = 0.90,
) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean of ``values``."""
    values = np.asarray(values, dtype=float)
    draws = rng.integers(0, len(values), size=(resamples, len(values)))
    means = values[draws].mean(axis=1)
    lo = (1.0 - coverage) / 2.0
    return (
        float(np.quantile(means, lo)),
        float(np.quantile(means, 1.0 - lo)),
    )


# ---------------------------------------------------------------------------
# Equal-performance cost experiment
# ---------------------------------------------------------------------------

def cost_experiment(config: ExperimentConfig) -> tuple[list[tuple], list[tuple]]:
    """Cumulative expected query cost at equal accepted-sample counts.

    One trajectory per run supplies the acceptance probabilities; both
    ledgers are then deterministic functions of them, so the emitted
    difference isolates the sampler change.  Run rows: (samples, run,
    step, classical_queries, quantum_queries, diff); summary rows per
    step carry means and deviations of the difference.
    """
    belief_samples = config.samples[0]
    site = f"{config.env}/cost/trajectory/l={belief_samples}"
    env_site = f"{config.env}/cost/env/l={belief_samples}"
    tasks = [
        _EpisodeTask(
            env=config.env,
            discount=config.discount,
            algo=CLASSICAL,
            belief_samples=belief_samples,
            reward_samples=config.reward_samples,
            observation_samples=config.observation_samples,
            horizon=config.horizon,
            steps=config.steps,
            seed=config.seed,
            run=run,
            site=site,
            env_site=env_site,
            equal_cost=False,
        )
        for run in range(config.runs)
    ]
    outputs = _run_tasks(tasks, config.workers)

    run_rows: list[tuple] = []
    diffs = np.zeros((config.runs, config.steps))
    for run, out in enumerate(outputs):
        probs = np.asarray(out.acceptance_probs)
        per_update_classical = belief_samples / probs
        per_update_quantum = belief_samples * np.array(
            [cost_model(p, QUANTUM) for p in probs]
        )
        bounds = np.cumsum(out.step_updates)[:-1]
        classical = np.array(
            [c.sum() for c in np.split(per_update_classical, bounds)]
        ).cumsum()
        quantum = np.array(
            [c.sum() for c in np.split(per_update_quantum, bounds)]
        ).cumsum()
        diffs[run] = quantum - classical
        for t in range(config.steps):
            run_rows.append(
                (
                    belief_samples,
                    run,
                    t + 1,
                    float(classical[t]),
                    float(quantum[t]),
                    float(quantum[t] - classical[t]),
                )
            )
    summary_rows = [
        (
            belief_samples,
            t + 1,
            float(diffs[:, t].mean()),
            float(diffs[:, t].std()),
        )
        for t in range(config.steps)
    ]
    return run_rows, summary_rows


COST_RUN_HEADER = [
    "samples", "run", "step", "classical_queries", "quantum_queries", "diff",
]
COST_SUMMARY_HEADER = ["samples", "step", "diff_mean", "diff_std"]


# ---------------------------------------------------------------------------
# Cost-vs-reward experiment
# ---------------------------------------------------------------------------

def bin_series(
    points_x: np.ndarray, points_y: np.ndarray, bin_count: int
) -> list[tuple[int, float, float, float, float, int, float]]:
    """Independent coordinate averages within bins over the x range.

    Returns (bin_index, left_edge, right_edge, mean_x, mean_y, count,
    std_y) per non-empty bin.  A degenerate range collapses to one bin.
    """
    if bin_count < 1:
        raise ValueError("bin count must be >= 1")
    points_x = np.asarray(points_x, dtype=float)
    points_y = np.asarray(points_y, dtype=float)
    lo, hi = float(points_x.min()), float(points_x.max())
    if lo == hi or bin_count == 1:
        return [(0, lo, hi, float(points_x.mean()), float(points_y.mean()),
                 len(points_x), float(points_y.std()))]
    edges = np.linspace(lo, hi, bin_count + 1)
    which = np.clip(np.digitize(points_x, edges[1:-1], right=False), 0, bin_count - 1)
    rows = []
    for b in range(bin_count):
        mask = which == b
        if not np.any(mask):
            continue
        rows.append(
            (
                b,
                float(edges[b]),
                float(edges[b + 1]),
                float(points_x[mask].mean()),
                float(points_y[mask].mean()),
                int(mask.sum()),
                float(points_y[mask].std()),
            )
        )
    return rows


def cost_vs_reward_experiment(
    config: ExperimentConfig,
) -> tuple[list[tuple], list[tuple]]:
    """Final reward vs total queries at equal accepted-sample counts.

    Each algorithm runs its own episodes (same sample counts; expected
    cost accounting).  Point rows: (samples, algo, run, final_reward,
    total_queries); binned rows add per-algorithm bin averages.
    """
    belief_samples = config.samples[0]
    point_rows: list[tuple] = []
    binned_rows: list[tuple] = []
    for algo in config.algos:
        # algo deliberately absent: paired runs share site-keyed randomness
        site = f"{config.env}/cvr/plan/l={belief_samples}"
        env_site = f"{config.env}/cvr/env/l={belief_samples}"
        tasks = [
            _EpisodeTask(
                env=config.env,
                discount=config.discount,
                algo=algo,
                belief_samples=belief_samples,
                reward_samples=config.reward_samples,
                observation_samples=config.observation_samples,
                horizon=config.horizon,
                steps=config.steps,
                seed=config.seed,
                run=run,
                site=site,
                env_site=env_site,
                equal_cost=False,
            )
            for run in range(config.runs)
        ]
        outputs = _run_tasks(tasks, config.workers)
        finals = np.array([np.sum(out.rewards) for out in outputs])
        totals = np.array([np.sum(out.step_queries) for out in outputs])
        for run in range(config.runs):
            point_rows.append(
                (belief_samples, algo, run, float(finals[run]), float(totals[run]))
            )
        for row in bin_series(finals, totals, config.bins):
            binned_rows.append((belief_samples, algo) + row)
    return point_rows, binned_rows


CVR_POINT_HEADER = ["samples", "algo", "run", "final_reward", "total_queries"]
CVR_BINNED_HEADER = [
    "samples", "algo", "bin", "left_edge", "right_edge", "mean_reward",
    "mean_queries", "count", "std_queries",
]

SWEEP_HEADER = ["accept_prob", "algo", "mean_cost", "std_cost", "accepted"]


# ---------------------------------------------------------------------------
# Command drivers (shared by the CLI and the test suite)
# ---------------------------------------------------------------------------

def drive_sweep(outdir: str, grid: list[float] | None, accepted: int, seed: int) -> str:
    os.makedirs(outdir, exist_ok=True)
    rows = sweep_accept_prob(grid, accepted, seed)
    path = os.path.join(outdir, "pe_sweep.csv")
    write_csv(path, "pe_sweep", SWEEP_HEADER, rows)
    write_metadata(
        os.path.join(outdir, "pe_sweep.meta.json"),
        "sweep-pe",
        {
            "grid": list(grid) if grid is not None else default_accept_grid(),
            "accepted": accepted,
            "seed": seed,
        },
    )
    return path


def drive_reward(outdir: str, config: ExperimentConfig) -> tuple[str, str]:
    os.makedirs(outdir, exist_ok=True)
    result = reward_experiment(config)
    runs_path = os.path.join(outdir, "reward_runs.csv")
    summary_path = os.path.join(outdir, "reward_summary.csv")
    write_csv(runs_path, "reward_runs", REWARD_RUN_HEADER, result.run_rows)
    write_csv(summary_path, "reward_summary", REWARD_SUMMARY_HEADER,
              result.summary_rows)
    write_csv(os.path.join(outdir, "reward_complexity.csv"),
              "reward_complexity", COMPLEXITY_HEADER, result.complexity_rows)
    write_metadata(os.path.join(outdir, "reward.meta.json"), "reward",
                   config_dict(config))
    return runs_path, summary_path


def drive_cost(outdir: str, config: ExperimentConfig) -> tuple[str, str]:
    os.makedirs(outdir, exist_ok=True)
    run_rows, summary_rows = cost_experiment(config)
    runs_path = os.path.join(outdir, "cost_runs.csv")
    summary_path = os.path.join(outdir, "cost_summary.csv")
    write_csv(runs_path, "cost_runs", COST_RUN_HEADER, run_rows)
    write_csv(summary_path, "cost_summary", COST_SUMMARY_HEADER, summary_rows)
    write_metadata(os.path.join(outdir, "cost.meta.json"), "cost",
                   config_dict(config))
    return runs_path, summary_path


def drive_cost_vs_reward(outdir: str, config: ExperimentConfig) -> tuple[str, str]:
    os.makedirs(outdir, exist_ok=True)
    point_rows, binned_rows = cost_vs_reward_experiment(config)
    points_path = os.path.join(outdir, "cvr_points.csv")
    binned_path = os.path.join(outdir, "cvr_binned.csv")
    write_csv(points_path, "cvr_points", CVR_POINT_HEADER, point_rows)
    write_csv(binned_path, "cvr_binned", CVR_BINNED_HEADER, binned_rows)
    write_metadata(os.path.join(outdir, "cost_vs_reward.meta.json"),
                   "cost-vs-reward", config_dict(config))
    return points_path, binned_path
