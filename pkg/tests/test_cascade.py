import random

import pytest

from hybridmp.cascade import (
    EdgeState,
    FixedRealization,
    Realization,
    edge_state,
    is_protected,
    monte_carlo_f_star,
    monte_carlo_f_star_many,
    prevented_count,
    simulate_competing,
)
from hybridmp.errors import DomainError
from hybridmp.graph import Graph

from conftest import CountingRandom, random_instance


def test_certain_edge_is_live(rng):
    g = Graph(2, [(0, 1, 1.0)])
    for _ in range(100):
        assert edge_state(Realization(g.prob, rng), 0) is EdgeState.LIVE


def test_decided_edge_is_memoized():
    g = Graph(2, [(0, 1, 0.5)])
    r = Realization(g.prob, random.Random(7))
    assert r.peek(0) is EdgeState.UNDETERMINED
    first = edge_state(r, 0)
    state = r.rng.getstate()
    for _ in range(5):
        assert edge_state(r, 0) is first
    assert r.rng.getstate() == state
    assert r.decided_count == 1


def test_live_frequency():
    g = Graph(2, [(0, 1, 0.3)])
    rng = random.Random(2024)
    trials = 100_000
    live = sum(Realization(g.prob, rng).is_live(0) for _ in range(trials))
    assert abs(live / trials - 0.3) <= 0.01


def test_realization_draws_at_most_once_per_edge():
    rng = random.Random(3)
    for _ in range(200):
        g, S_r = random_instance(rng, 6, 14)
        counter = CountingRandom(rng.random())
        real = Realization(g.prob, counter)
        S = [rng.randrange(g.n)]
        simulate_competing(g, S_r, S, real)
        for v in range(g.n):
            is_protected(real, g, S_r, S, v)
        prevented_count(g, real, S_r, S)
        assert counter.calls == real.decided_count <= g.m


def test_protected_on_chain(chain):
    full = FixedRealization([True, True])
    assert is_protected(full, chain, [0], [1], 2)
    assert not is_protected(full, chain, [0], [1], 0)


def test_tie_goes_to_misinformation():
    # r=0 -> a=2 -> v=4 and s=1 -> b=3 -> v=4
    g = Graph(5, [(0, 2, 1.0), (2, 4, 1.0), (1, 3, 1.0), (3, 4, 1.0)])
    full = FixedRealization([True] * 4)
    assert not is_protected(full, g, [0], [1], 4)
    assert is_protected(full, g, [0], [1], 3)


def test_unreachable_node_is_protected():
    g = Graph(3, [(0, 1, 1.0)])
    assert is_protected(FixedRealization([True]), g, [0], [], 2)
    assert not is_protected(FixedRealization([True]), g, [0], [], 1)
    assert is_protected(FixedRealization([False]), g, [0], [], 1)


def test_competing_shared_seed():
    g = Graph(2, [(0, 1, 1.0)])
    assert simulate_competing(g, [0], [0], FixedRealization([True])) == {0, 1}


def test_competing_positive_blocks(chain):
    assert simulate_competing(chain, [0], [1], FixedRealization([True, True])) == {0}


def test_competing_matches_distance_criterion():
    rng = random.Random(99)
    for _ in range(500):
        g, S_r = random_instance(rng, 8, 20, max_seeds=2)
        S = rng.sample(range(g.n), rng.randint(0, 3))
        real = Realization(g.prob, rng)
        misinformed = simulate_competing(g, S_r, S, real)
        for v in range(g.n):
            assert (v not in misinformed) == is_protected(real, g, S_r, S, v)


def test_prevented_count_matches_criterion():
    rng = random.Random(5)
    for _ in range(300):
        g, S_r = random_instance(rng, 7, 16)
        S = rng.sample(range(g.n), rng.randint(0, 3))
        real = FixedRealization([rng.random() < g.prob[e] for e in range(g.m)])
        expected = sum(
            1 for v in range(g.n)
            if is_protected(real, g, S_r, S, v) and not is_protected(real, g, S_r, [], v)
        )
        assert prevented_count(g, real, S_r, S) == expected


def test_monte_carlo_single_edge(single_edge):
    mean, se = monte_carlo_f_star(single_edge, [0], [1], 20_000, seed=1)
    assert abs(mean - 0.5) <= 3 * se


def test_monte_carlo_empty_seed_set(single_edge):
    assert monte_carlo_f_star(single_edge, [0], [], 1000, seed=1) == (0.0, 0.0)


def test_monte_carlo_deterministic_chain(chain):
    assert monte_carlo_f_star(chain, [0], [1], 100, seed=1) == (2.0, 0.0)


def test_monte_carlo_rejects_zero_sims(chain):
    with pytest.raises(DomainError):
        monte_carlo_f_star(chain, [0], [1], 0, seed=1)


def test_monte_carlo_reproducible_and_worker_independent():
    rng = random.Random(1)
    g, S_r = random_instance(rng, 8, 20)
    a = monte_carlo_f_star(g, S_r, [1, 2], 300, seed=4)
    b = monte_carlo_f_star(g, S_r, [1, 2], 300, seed=4, workers=2)
    assert a == b


def test_monte_carlo_batch_matches_single_runs():
    rng = random.Random(9)
    g, S_r = random_instance(rng, 8, 20)
    sets = [[], [1], [2, 3], [3, 2], [5]]
    batch = monte_carlo_f_star_many(g, S_r, sets, 200, seed=2)
    assert batch == [monte_carlo_f_star(g, S_r, S, 200, seed=2) for S in sets]
    assert batch == monte_carlo_f_star_many(g, S_r, sets, 200, seed=2, workers=2)
