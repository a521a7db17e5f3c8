import pytest

from photonroute import NetworkSpec, build_hex_network, parse_node_id


@pytest.fixture(scope="session")
def net1():
    return build_hex_network(NetworkSpec(1))


@pytest.fixture(scope="session")
def net3():
    return build_hex_network(NetworkSpec(3))


@pytest.fixture(scope="session")
def net5():
    return build_hex_network(NetworkSpec(5))


@pytest.fixture(scope="session")
def nid():
    def resolve(graph, name):
        return graph.resolve(parse_node_id(name))
    return resolve


# the acceptance module fills this; the summary prints one line per criterion
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
