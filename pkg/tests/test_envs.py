import collections

import numpy as np
import numpy.testing as npt

from qpomdp.envs import (
    ROBOT_START_ROOM,
    ROBOT_TREASURE_ROOM,
    step,
)
from qpomdp.planner import hoeffding
from qpomdp.rng import substream


class TestTigerModel:
    def test_sensor_accuracy(self, tiger):
        listen = tiger.action_names.index("listen")
        npt.assert_allclose(tiger.sensor[0, listen], [0.85, 0.15])
        npt.assert_allclose(tiger.sensor[1, listen], [0.15, 0.85])

    def test_listening_is_noninvasive(self, tiger):
        listen = tiger.action_names.index("listen")
        npt.assert_allclose(tiger.transition[:, listen, :], np.eye(2))

    def test_opening_reassigns_uniformly(self, tiger):
        for action in ("open-left", "open-right"):
            a = tiger.action_names.index(action)
            npt.assert_allclose(tiger.transition[:, a, :], 0.5)

    def test_uniform_prior(self, tiger):
        npt.assert_allclose(tiger.initial_belief, [0.5, 0.5])


class TestRobotModel:
    def test_lever_expected_rewards(self, robot):
        table = robot.expected_reward_table
        treasure = ROBOT_TREASURE_ROOM
        npt.assert_allclose(table[treasure, 2], 0.7 * 10 + 0.3 * (-5.0))
        npt.assert_allclose(table[treasure, 3], 0.9 * 10 + 0.1 * (-20.0))

    def test_movement_is_deterministic_cyclic(self, robot):
        for room in range(4):
            npt.assert_allclose(
                robot.transition[room, 0, (room + 1) % 4], 1.0
            )
            npt.assert_allclose(
                robot.transition[room, 1, (room - 1) % 4], 1.0
            )

    def test_levers_outside_treasure_room_do_nothing(self, robot):
        for room in range(4):
            if room == ROBOT_TREASURE_ROOM:
                continue
            for lever in (2, 3):
                npt.assert_allclose(robot.transition[room, lever, room], 1.0)
                npt.assert_allclose(
                    robot.expected_reward_table[room, lever], 0.0
                )

    def test_lever_in_treasure_room_resets(self, robot):
        for lever in (2, 3):
            npt.assert_allclose(
                robot.transition[ROBOT_TREASURE_ROOM, lever, ROBOT_START_ROOM],
                1.0,
            )

    def test_sensor_error_rate(self, robot):
        npt.assert_allclose(robot.sensor[ROBOT_TREASURE_ROOM, 0], [0.9, 0.1])
        npt.assert_allclose(robot.sensor[0, 0], [0.1, 0.9])

    def test_initial_position_unknown(self, robot):
        npt.assert_allclose(robot.initial_belief, np.full(4, 0.25))


class TestStep:
    def test_open_on_tiger_pays_penalty(self, tiger):
        rng = substream(50)
        a = tiger.action_names.index("open-left")
        rewards = set()
        states = set()
        for _ in range(64):
            next_state, _, reward = step(tiger, 0, a, rng)
            rewards.add(reward)
            states.add(next_state)
        assert rewards == {-10.0}
        assert states == {0, 1}  # reassigned uniformly

    def test_robot_move_costs_one(self, robot):
        rng = substream(51)
        for _ in range(16):
            next_state, _, reward = step(robot, 2, "clockwise", rng)
            assert reward == -1.0
            assert next_state == 3

    def test_observation_frequencies_match_sensor(self, tiger):
        rng = substream(52)
        listen = tiger.action_names.index("listen")
        counts = collections.Counter(
            step(tiger, 0, listen, rng)[1] for _ in range(10_000)
        )
        assert abs(counts[0] / 10_000 - 0.85) < 0.02

    def test_reward_means_within_hoeffding(self, robot):
        rng = substream(53)
        samples = 10_000
        draws = np.array(
            [step(robot, ROBOT_TREASURE_ROOM, "lever-b", rng)[2]
             for _ in range(samples)]
        )
        bound = hoeffding(samples, 0.001) * (
            max(robot.reward_values) - min(robot.reward_values)
        )
        assert abs(draws.mean() - 7.0) < bound
