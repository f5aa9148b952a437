import random

import pytest

from hybridmp.graph import Graph


class CountingRandom(random.Random):
    def __init__(self, seed):
        super().__init__(seed)
        self.calls = 0

    def random(self):
        self.calls += 1
        return super().random()


DECIMAL_PROBS = (0.1, 0.2, 0.25, 0.5, 0.75, 0.9, 1.0)


def random_graph(rng, n, max_edges, probs=DECIMAL_PROBS, min_edges=1):
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    rng.shuffle(pairs)
    m = rng.randint(min(min_edges, len(pairs)), min(max_edges, len(pairs)))
    return Graph(n, [(u, v, rng.choice(probs)) for u, v in pairs[:m]])


def random_instance(rng, n, max_edges, max_seeds=2):
    """Graph plus a non-empty misinformation seed set."""
    g = random_graph(rng, n, max_edges)
    S_r = sorted(rng.sample(range(n), rng.randint(1, max_seeds)))
    return g, S_r


@pytest.fixture
def chain():
    # r=0 -> a=1 -> b=2, all edges certain
    return Graph(3, [(0, 1, 1.0), (1, 2, 1.0)])


@pytest.fixture
def single_edge():
    return Graph(2, [(0, 1, 0.5)])


@pytest.fixture
def rng():
    return random.Random(12345)
