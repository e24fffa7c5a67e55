import pytest

from helpers import make_e1, make_e2, make_infeasible_everywhere


@pytest.fixture
def e1():
    return make_e1()


@pytest.fixture
def e2():
    return make_e2()


@pytest.fixture
def infeasible2():
    return make_infeasible_everywhere(2)
