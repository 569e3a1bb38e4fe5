import pytest

from msou.config import Config
from msou.services.syntax import parse_formula, parse_tree, parse_valuation


@pytest.fixture
def config():
    return Config()


@pytest.fixture
def small_config():
    """Unary trees only, which keeps exhaustive runs short."""
    return Config(alphabet=("a", "b"), r_max=1)


@pytest.fixture
def f():
    return parse_formula


@pytest.fixture
def t():
    return parse_tree


@pytest.fixture
def v():
    return parse_valuation
