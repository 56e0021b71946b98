import pytest

from g2scale.config import conf
from g2scale.g2core import standard_structure
from g2scale.klog import klogger


@pytest.fixture
def fresh_config():
    conf.reset()
    yield conf
    conf.reset()
    klogger.set_level(conf.log_level)


@pytest.fixture(scope="session")
def G():
    return standard_structure("exact")


@pytest.fixture(scope="session")
def G_float():
    return standard_structure("float")
