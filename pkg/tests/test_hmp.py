import math
import random

import numpy as np
import pytest

from hybridmp.errors import DegenerateInstanceError, DomainError
from hybridmp.graph import Graph
from hybridmp.hmp import (
    ONE_MINUS_INV_E,
    choose_SL,
    compute_l1_l2,
    estimate_lower_bound,
    eps11_for,
    framework,
    guarantee_residual,
    hmp,
    log_binomial,
    provably_zero,
    solve_epsilons,
    stopping_threshold,
)
from hybridmp.oracle import exact_opt

from conftest import random_instance


def test_l1_l2_examples():
    l1, l2 = compute_l1_l2(10, 1, math.e, 0.0, 1.0, 1.0)
    assert l1 == pytest.approx(10 * (math.log(10) + 1) * 3, rel=1e-12)
    assert round(l1, 3) == 99.078
    assert l2 == pytest.approx(20.0, rel=1e-12)


def test_l1_l2_linear_in_n():
    a = compute_l1_l2(50, 3, 10, 0.2, 0.1, 0.05)
    # ln C(n, k) also depends on n, so compare against the formula's other factor
    b = compute_l1_l2(100, 3, 10, 0.2, 0.1, 0.05)
    assert b[1] == pytest.approx(2 * a[1])
    ratio = (log_binomial(100, 3) + math.log(10)) / (log_binomial(50, 3) + math.log(10))
    assert b[0] == pytest.approx(2 * a[0] * ratio)


def test_l1_l2_rejects_zero():
    with pytest.raises(DomainError):
        compute_l1_l2(10, 1, 10, 0.1, 0.0, 0.1)


def test_log_binomial_large():
    assert log_binomial(10**6, 10) == pytest.approx(
        sum(math.log(10**6 - i) - math.log(i + 1) for i in range(10)), rel=1e-10
    )


def _grid_best(n, k, N, eps, points=10**6):
    hi = eps / (ONE_MINUS_INV_E * (1 + eps))
    e12 = np.linspace(hi / points, hi * (1 - 1 / points), points)
    e11 = eps / (1 + eps) - ONE_MINUS_INV_E * e12
    l1 = n * (log_binomial(n, k) + math.log(N)) * (2 + e11 * (1 + eps)) / e11**2
    l2 = 2 * n * math.log(N) / e12**2
    return np.maximum(l1, l2).min()


@pytest.mark.parametrize("n,k,N,eps", [(100, 5, 100, 0.3), (10**4, 10, 10**4, 0.1),
                                       (6, 1, 10, 0.5), (5000, 10, 10, 0.6)])
def test_solver_beats_grid_scan(n, k, N, eps):
    eps11, eps12 = solve_epsilons(n, k, N, eps)
    l1, l2 = compute_l1_l2(n, k, N, eps, eps11, eps12)
    assert abs(l1 - l2) <= 1e-3 * max(l1, l2)
    assert max(l1, l2) <= _grid_best(n, k, N, eps) * (1 + 1e-9)


def test_epsilons_shrink_with_epsilon():
    pairs = [solve_epsilons(1000, 10, 1000, eps) for eps in (0.5, 0.3, 0.1)]
    assert pairs[0][0] > pairs[1][0] > pairs[2][0]
    assert pairs[0][1] > pairs[1][1] > pairs[2][1]


def test_solver_fuzz_invariants():
    rng = random.Random(0)
    for _ in range(500):
        n = rng.randint(2, 10**6)
        k = rng.randint(1, min(n, 50))
        N = rng.uniform(1.01, 10**6)
        eps = rng.uniform(1e-4, ONE_MINUS_INV_E - 1e-4)
        e11, e12 = solve_epsilons(n, k, N, eps)
        assert 0 < e11 < 1 and 0 < e12 < 1
        assert abs(guarantee_residual(eps, e11, e12)) < 1e-9


@pytest.mark.parametrize("eps", [0.0, -0.1, ONE_MINUS_INV_E, 0.9])
def test_solver_rejects_epsilon(eps):
    with pytest.raises(DomainError):
        solve_epsilons(10, 1, 10, eps)


def test_eps11_for_satisfies_constraint():
    assert guarantee_residual(0.2, eps11_for(0.2, 0.05), 0.05) == pytest.approx(0, abs=1e-15)


def test_choose_SL_ranking():
    # r=0 -> a=1, b=2, c=3; a has more out-edges than b
    g = Graph(6, [(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 4, 1), (1, 5, 1), (2, 4, 1)])
    assert choose_SL(g, [0], 2) == [1, 2]


def test_choose_SL_padding():
    g = Graph(4, [(1, 2, 1), (1, 3, 1), (2, 3, 1)])
    assert choose_SL(g, [0], 1) == [1]
    g2 = Graph(4, [(0, 1, 1), (1, 0, 1), (2, 3, 1), (2, 1, 1)])
    assert choose_SL(g2, [0, 1], 1) == [2]
    with pytest.raises(DomainError):
        choose_SL(g2, [0, 1], 3)


def test_stopping_threshold_value():
    assert stopping_threshold(0.4, 10) == pytest.approx(
        1 + 4 * (math.e - 2) * 1.4 * math.log(20) / 0.16
    )


def test_lower_bound_deterministic_chain(chain):
    for seed in range(10):
        eps0 = 0.3
        lb = estimate_lower_bound(chain, [0], [1], eps0, 10, seed)
        assert 2 * (1 - eps0) <= lb.value <= 2 * (1 + eps0)
        assert lb.samples == math.ceil(stopping_threshold(eps0, 10) * 3 / 2)


def test_lower_bound_degenerate():
    g = Graph(3, [(1, 2, 0.5)])
    assert provably_zero(g, [0], [1])
    with pytest.raises(DegenerateInstanceError):
        estimate_lower_bound(g, [0], [1], 0.5, 10, seed=0)
    # node 2 only ever ties with the misinformation at node 1: zero, but not structurally
    tie = Graph(3, [(0, 1, 0.5), (2, 1, 0.5)])
    assert not provably_zero(tie, [0], [2])
    with pytest.raises(DegenerateInstanceError):
        estimate_lower_bound(tie, [0], [2], 0.5, 10, seed=0, max_samples=2000)


def test_lower_bound_worker_independent():
    g = Graph(4, [(0, 1, 0.5), (1, 2, 0.5), (0, 3, 0.25), (3, 2, 0.75)])
    a = estimate_lower_bound(g, [0], [1], 0.2, 10, seed=3)
    b = estimate_lower_bound(g, [0], [1], 0.2, 10, seed=3, workers=2)
    assert a == b


def test_framework_examples(chain):
    assert framework(chain, [0], 1, 1, seed=0).seeds == [1]
    with pytest.raises(DomainError):
        framework(chain, [0], 1, 0, seed=0)
    rng = random.Random(5)
    g, S_r = random_instance(rng, 8, 20)
    assert framework(g, S_r, 2, 500, seed=4).seeds == framework(g, S_r, 2, 500, seed=4).seeds


def test_hmp_determinism_and_sample_count():
    g = Graph(6, [(0, 1, 0.5), (0, 2, 0.4), (1, 3, 0.6), (2, 3, 0.5),
                  (3, 4, 0.7), (2, 5, 0.3), (5, 4, 0.5), (4, 1, 0.2)])
    a = hmp(g, [0], 2, 0.3, 10, seed=7)
    b = hmp(g, [0], 2, 0.3, 10, seed=7)
    assert a.seeds == b.seeds and a.params == b.params
    p = a.params
    assert p.l >= max(p.l1, p.l2) / p.opt_lower
    assert p.epsilon0 == pytest.approx(0.3**2 + 0.6)
    c = hmp(g, [0], 2, 0.3, 10, seed=7, workers=2)
    assert c.seeds == a.seeds and c.params == a.params


def test_hmp_saturation_reaches_optimum():
    # deterministic tree: the two children of the seed save everything
    g = Graph(5, [(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 4, 1)])
    res = hmp(g, [0], 2, 0.3, 10, seed=1)
    assert res.seeds == [1, 2]
    assert res.run.gains[0] + res.run.gains[1] == res.run.total_sets
    assert exact_opt(g, [0], 2) == ([1, 2], 4)


def test_hmp_argument_checks(chain):
    with pytest.raises(DomainError):
        hmp(chain, [0], 1, 0.9, 10, seed=0)
    with pytest.raises(DomainError):
        hmp(chain, [0], 1, 0.3, 3, seed=0)


def test_hmp_fallback_on_degenerate_instance():
    g = Graph(3, [(1, 2, 0.5)])
    with pytest.raises(DegenerateInstanceError):
        hmp(g, [0], 1, 0.3, 10, seed=0, max_lower_bound_samples=500)
    res = hmp(g, [0], 1, 0.3, 10, seed=0, max_lower_bound_samples=500, fallback=True)
    assert res.params.heuristic_fallback
    assert res.params.opt_lower == 1.0
