import pytest

from qpmspdc.dispersion import ppln_e
from qpmspdc.qpm import InteractionConfig


@pytest.fixture(scope="session")
def model():
    return ppln_e()


@pytest.fixture
def counter_cfg():
    return InteractionConfig.build(dirs="counter", period_um=6.8, orders=(-1, 1))


@pytest.fixture
def co_cfg():
    return InteractionConfig.build(dirs="co", period_um=6.8, orders=(-1, 1))
