import pytest

from netdecouple.fixtures import fork_graph, funnel_graph


@pytest.fixture
def fork():
    return fork_graph()


@pytest.fixture
def funnel():
    return funnel_graph()
