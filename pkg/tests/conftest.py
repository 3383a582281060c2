import numpy as np
import pytest

from qpomdp.bayesnet import Cpt, RandomVariable, build_net
from qpomdp.envs import robot_pomdp, tiger_pomdp


@pytest.fixture
def sprinkler_net():
    """Three binary variables: rain -> sprinkler, rain/sprinkler -> wet grass."""
    variables = [
        RandomVariable("rain", 2),
        RandomVariable("sprinkler", 2, parents=(0,)),
        RandomVariable("wet", 2, parents=(0, 1)),
    ]
    cpts = [
        Cpt(0, [0.9, 0.1]),
        Cpt(1, [[0.6, 0.4], [0.99, 0.01]]),
        Cpt(2, [[[0.6, 0.4], [0.1, 0.9]], [[0.01, 0.99], [0.01, 0.99]]]),
    ]
    return build_net(variables, cpts)


@pytest.fixture
def constant_net():
    return build_net([RandomVariable("only", 1)], [Cpt(0, [1.0])])


@pytest.fixture
def tiger():
    return tiger_pomdp()


@pytest.fixture
def robot():
    return robot_pomdp()


@pytest.fixture
def uniform2():
    return np.array([0.5, 0.5])
