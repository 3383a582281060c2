"""Built-in benchmark environments and the ground-truth simulator.

Both the agent-side model and the environment step draw from one data
source (the same :class:`~qpomdp.pomdp.Pomdp` tables), so they cannot
diverge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pomdp import Pomdp

TIGER = "tiger"
ROBOT = "robot"

DEFAULT_DISCOUNT = 0.9


def tiger_pomdp(discount: float = DEFAULT_DISCOUNT) -> Pomdp:
    """Two doors, one tiger: listen (noisy, cost 1) or open a door.

    Opening pays +5 for treasure or -10 for the tiger and reassigns the
    tiger uniformly; listening reports the correct side 85% of the time
    and leaves the state alone.
    """
    rewards = (-10.0, -1.0, 0.0, 5.0)
    idx = {r: i for i, r in enumerate(rewards)}

    transition = np.zeros((2, 3, 2))
    transition[:, 0, :] = np.eye(2)      # listen: state unchanged
    transition[:, 1, :] = 0.5            # open-left: reassigned uniformly
    transition[:, 2, :] = 0.5            # open-right

    sensor = np.zeros((2, 3, 2))
    sensor[0, 0] = (0.85, 0.15)          # hear correctly with prob 0.85
    sensor[1, 0] = (0.15, 0.85)
    sensor[:, 1, :] = 0.5                # opening is uninformative
    sensor[:, 2, :] = 0.5

    reward_dist = np.zeros((2, 3, 4))
    reward_dist[:, 0, idx[-1.0]] = 1.0   # listening always costs 1
    reward_dist[0, 1, idx[-10.0]] = 1.0  # tiger behind the opened door
    reward_dist[1, 1, idx[5.0]] = 1.0
    reward_dist[0, 2, idx[5.0]] = 1.0
    reward_dist[1, 2, idx[-10.0]] = 1.0

    return Pomdp(
        state_names=("tiger-left", "tiger-right"),
        action_names=("listen", "open-left", "open-right"),
        observation_names=("hear-left", "hear-right"),
        reward_values=rewards,
        transition=transition,
        sensor=sensor,
        reward_dist=reward_dist,
        discount=discount,
        initial_belief=np.array([0.5, 0.5]),
    )


#: Room a successful-pull reset returns the robot to.
ROBOT_START_ROOM = 0
#: Room holding the treasure; adjacent (clockwise) to the reset room so a
#: two-step lookahead can see a lever payoff after one move.
ROBOT_TREASURE_ROOM = 1


def robot_pomdp(discount: float = DEFAULT_DISCOUNT) -> Pomdp:
    """Four rooms in a ring; one holds a treasure reachable by lever pulls.

    Moving costs 1.  In the treasure room, the safer lever pays +10
    with probability 0.7 (else -5), the riskier one with 0.9
    (else -20); either pull teleports the robot back to the reset room.
    Pulls elsewhere do nothing.  The room sensor errs 10% of the time.

    The robot knows the layout but not which room it occupies at the
    start (uniform initial belief): with deterministic movement, the
    noisy room sensor is its only way to localize, which is what makes
    the task partially observable at all.
    """
    n_rooms = 4
    rewards = (-20.0, -5.0, -1.0, 0.0, 10.0)
    idx = {r: i for i, r in enumerate(rewards)}

    transition = np.zeros((n_rooms, 4, n_rooms))
    for room in range(n_rooms):
        transition[room, 0, (room + 1) % n_rooms] = 1.0    # clockwise
        transition[room, 1, (room - 1) % n_rooms] = 1.0    # counterclockwise
        for lever in (2, 3):
            if room == ROBOT_TREASURE_ROOM:
                transition[room, lever, ROBOT_START_ROOM] = 1.0
            else:
                transition[room, lever, room] = 1.0        # pull has no effect

    sensor = np.zeros((n_rooms, 4, 2))
    for room in range(n_rooms):
        in_it = 0.9 if room == ROBOT_TREASURE_ROOM else 0.1
        sensor[room, :, 0] = in_it
        sensor[room, :, 1] = 1.0 - in_it

    reward_dist = np.zeros((n_rooms, 4, len(rewards)))
    reward_dist[:, 0, idx[-1.0]] = 1.0
    reward_dist[:, 1, idx[-1.0]] = 1.0
    for room in range(n_rooms):
        if room == ROBOT_TREASURE_ROOM:
            reward_dist[room, 2, idx[10.0]] = 0.7
            reward_dist[room, 2, idx[-5.0]] = 0.3
            reward_dist[room, 3, idx[10.0]] = 0.9
            reward_dist[room, 3, idx[-20.0]] = 0.1
        else:
            reward_dist[room, 2, idx[0.0]] = 1.0
            reward_dist[room, 3, idx[0.0]] = 1.0

    belief = np.full(n_rooms, 1.0 / n_rooms)

    return Pomdp(
        state_names=tuple(f"room-{i}" for i in range(n_rooms)),
        action_names=("clockwise", "counterclockwise", "lever-a", "lever-b"),
        observation_names=("in-treasure-room", "not-in-treasure-room"),
        reward_values=rewards,
        transition=transition,
        sensor=sensor,
        reward_dist=reward_dist,
        discount=discount,
        initial_belief=belief,
    )


def builtin_pomdp(name: str, discount: float = DEFAULT_DISCOUNT) -> Pomdp:
    if name == TIGER:
        return tiger_pomdp(discount)
    if name == ROBOT:
        return robot_pomdp(discount)
    raise ValueError(f"unknown builtin environment {name!r}")


def _draw(row: np.ndarray, rng: np.random.Generator) -> int:
    cum = np.cumsum(row)
    return min(int(np.searchsorted(cum, rng.random(), side="right")), len(row) - 1)


def step(
    pomdp: Pomdp, state: int, action: int | str, rng: np.random.Generator
) -> tuple[int, int, float]:
    """Advance the true environment one step.

    Samples the next state, then the observation given (next state,
    action), then the reward given (state, action), all from the same
    tables the agent plans with.  Returns (next_state, observation,
    reward value).
    """
    a = pomdp.action_index(action)
    next_state = _draw(pomdp.transition[state, a], rng)
    observation = _draw(pomdp.sensor[next_state, a], rng)
    reward = pomdp.reward_values[_draw(pomdp.reward_dist[state, a], rng)]
    return next_state, observation, float(reward)


@dataclass
class Episode:
    """Trajectory record for one run: everything a plot or test needs."""

    states: list[int] = field(default_factory=list)
    actions: list[int] = field(default_factory=list)
    observations: list[int] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    step_queries: list[float] = field(default_factory=list)
    step_updates: list[int] = field(default_factory=list)
    action_values: list[list[float]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.actions)

    @property
    def cumulative_rewards(self) -> np.ndarray:
        return np.cumsum(self.rewards)

    @property
    def cumulative_queries(self) -> np.ndarray:
        return np.cumsum(self.step_queries)
