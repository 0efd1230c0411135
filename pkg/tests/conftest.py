import numpy as np
import pytest

from loravg import FunctionOnSpace, MetricMeasureSpace


def random_space(rng, max_atoms=40) -> MetricMeasureSpace:
    """A space from a random generator: lattice, weighted line, metric
    cloud or connected weighted graph."""
    kind = rng.integers(4)
    if kind == 0:
        return MetricMeasureSpace.lattice(int(rng.integers(3, max_atoms)))
    if kind == 1:
        n = int(rng.integers(3, max_atoms))
        coords = np.sort(rng.uniform(0, 10, n))[:, None]
        return MetricMeasureSpace.from_cloud(coords, metric="l1",
                                             weights=rng.uniform(0.2, 3.0, n))
    if kind == 2:
        n = int(rng.integers(2, max_atoms))
        dim = int(rng.integers(1, 4))
        metric = ["euclidean", "l1", "linf"][int(rng.integers(3))]
        return MetricMeasureSpace.from_cloud(rng.uniform(-5, 5, (n, dim)),
                                             metric=metric,
                                             weights=rng.uniform(0.2, 3.0, n))
    n = int(rng.integers(3, max_atoms))
    edges = [(i, i + 1, float(rng.uniform(0.5, 2.0))) for i in range(n - 1)]
    extra = int(rng.integers(0, n // 2 + 1))
    for _ in range(extra):
        u, v = rng.integers(0, n, 2)
        if u != v:
            edges.append((int(u), int(v), float(rng.uniform(0.5, 4.0))))
    return MetricMeasureSpace.from_graph(n, edges, weights=rng.uniform(0.2, 3.0, n))


def random_function(rng, space, allow_zero=False) -> FunctionOnSpace:
    """Signed values, some exact zeros, occasional ties to exercise level merging."""
    values = rng.standard_normal(space.natoms)
    values[rng.uniform(size=space.natoms) < 0.2] = 0.0
    if rng.uniform() < 0.4:
        values = np.round(values, 1)
    if not allow_zero and not np.any(values != 0):
        values[int(rng.integers(space.natoms))] = float(rng.uniform(0.5, 2.0))
    return FunctionOnSpace(space, values)


def random_radius(rng, space) -> float:
    """A radius making balls neither trivial nor the whole space (usually)."""
    positive = space.dist[space.dist > 0]
    if positive.size == 0:
        return 1.0
    return float(np.quantile(positive, rng.uniform(0.1, 0.5)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240809)
