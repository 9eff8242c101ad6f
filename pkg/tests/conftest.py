import pytest

from linksentinel import Scenario, cycle_digraph, simulate, star_digraph

X0_RAMP = (1.0, 2.0, 3.0, 4.0, 5.0)


@pytest.fixture(scope="session")
def five_cycle():
    return cycle_digraph(5)


@pytest.fixture(scope="session")
def star5():
    return star_digraph(5)


@pytest.fixture(scope="session")
def cycle_failure_trace(five_cycle):
    """The reference experiment: ramp start, first edge removed at t=5."""
    scenario = Scenario(
        graph=five_cycle, x0=X0_RAMP, t_f=5.0, failed_edge=(1, 2), dt=1e-2
    )
    return simulate(scenario)


@pytest.fixture(scope="session")
def healthy_cycle_trace(five_cycle):
    scenario = Scenario(graph=five_cycle, x0=X0_RAMP, t_end=10.0, dt=1e-2)
    return simulate(scenario)
