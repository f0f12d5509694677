import numpy as np
import pytest

from curvgraph import graph_distance, standard_chain


@pytest.fixture(scope="session")
def two_point():
    return standard_chain("two_point")


@pytest.fixture(scope="session")
def hc2():
    return standard_chain("hypercube", 2)


@pytest.fixture(scope="session")
def hc3():
    return standard_chain("hypercube", 3)


@pytest.fixture(scope="session")
def cycle6():
    return standard_chain("cycle", 6)


@pytest.fixture(scope="session")
def complete4():
    return standard_chain("complete", 4)


@pytest.fixture(scope="session")
def dg_two_point(two_point):
    return graph_distance(two_point)


@pytest.fixture(scope="session")
def dg_hc2(hc2):
    return graph_distance(hc2)


@pytest.fixture(scope="session")
def dg_hc3(hc3):
    return graph_distance(hc3)


def random_reversible_chain(n: int, seed: int):
    """Metropolis chain on a random connected graph with a random target."""
    from curvgraph import build_chain

    rng = np.random.default_rng(seed)
    # random spanning tree plus extra edges keeps the support connected
    edges = {(i, i + 1) for i in range(n - 1)}
    for _ in range(n):
        i, j = rng.integers(0, n, size=2)
        if i != j:
            edges.add((min(i, j), max(i, j)))
    target = rng.dirichlet(np.ones(n) * 2.0)
    base = 1.0 / (2.0 * n)
    entries = []
    hold = np.ones(n)
    for i, j in sorted(edges):
        rate_ij = base * min(1.0, target[j] / target[i])
        rate_ji = base * min(1.0, target[i] / target[j])
        entries.append((i, j, rate_ij))
        entries.append((j, i, rate_ji))
        hold[i] -= rate_ij
        hold[j] -= rate_ji
    for i in range(n):
        entries.append((i, i, hold[i]))
    labels = [str(i) for i in range(n)]
    return build_chain(labels, entries)


@pytest.fixture(scope="session")
def random_chains():
    return [random_reversible_chain(n, seed) for n, seed in [(5, 1), (7, 2), (6, 3)]]
