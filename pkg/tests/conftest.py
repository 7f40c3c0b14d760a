import numpy as np
import pytest

from fbgshape.config import build_setup, parse_config_text

NOISE_FREE = """
[noise]
sigma_kappa = 0
sigma_tau = 0
seed = 0
"""

TASK2_EVENTS = """
[disturbances]
event1 = 4.0 7.0 28 40 0.03333333333333333
event2 = 12.0 14.0 30 36 0.012
"""

TASK3_BEND = """
[trajectory]
bend1 = 0 0.0125 30
"""


def make_setup(extra: str = "", seed: int | None = None):
    return build_setup(parse_config_text(extra), seed_override=seed)


@pytest.fixture
def default_setup():
    return make_setup("[noise]\nseed = 42\n")


@pytest.fixture
def noise_free_setup():
    return make_setup(NOISE_FREE)


@pytest.fixture
def rng():
    return np.random.default_rng(20240815)
