"""The full pipeline: lower bound, sample count, sampling and greedy selection.

Given an accuracy ``epsilon`` and a confidence parameter ``N`` the returned
seed set satisfies f*(S) >= (1 - 1/e - epsilon) * OPT with probability at
least 1 - 3/N.  The number of R-samples is ``max(l1, l2) / OPT_L`` where
``OPT_L`` is a stopping-rule estimate of f* for a heuristic seed set ``S_L``.
"""

import math
import time
from dataclasses import dataclass, field

from . import rng as rngmod
from .coverage import SampleStore, greedy, x
from .errors import DegenerateInstanceError, DomainError
from .graph import top_by_out_degree
from .sampler import generate_rsamples, hybrid_sample

ONE_MINUS_INV_E = 1.0 - 1.0 / math.e
DEFAULT_SAMPLE_CAP = 10**8


def log_binomial(n, k):
    """ln C(n, k) via log-gamma."""
    if not 0 <= k <= n:
        raise DomainError(f"C({n}, {k}) is undefined")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def compute_l1_l2(n, k, N, epsilon, eps11, eps12):
    """Sample-size numerators controlling the greedy set and the optimum."""
    if eps11 <= 0 or eps12 <= 0:
        raise DomainError("eps11 and eps12 must be positive")
    l1 = n * (log_binomial(n, k) + math.log(N)) * (2 + eps11 * (1 + epsilon)) / eps11**2
    l2 = 2 * n * math.log(N) / eps12**2
    return l1, l2


def _check_epsilon(epsilon):
    if not 0 < epsilon < ONE_MINUS_INV_E:
        raise DomainError(
            f"epsilon={epsilon} must lie in (0, 1-1/e) = (0, {ONE_MINUS_INV_E:.6f})"
        )


def eps11_for(epsilon, eps12):
    """The eps11 that makes the combined guarantee exactly 1 - 1/e - epsilon."""
    return epsilon / (1 + epsilon) - ONE_MINUS_INV_E * eps12


def solve_epsilons(n, k, N, epsilon, rel_tol=1e-12):
    """Split ``epsilon`` into (eps11, eps12) minimizing max(l1, l2).

    l1 grows and l2 shrinks as eps12 grows, so the optimum is their crossing,
    located by bisection over the feasible eps12 interval.
    """
    _check_epsilon(epsilon)
    if N <= 1:
        raise DomainError("N must exceed 1")
    lo, hi = 0.0, epsilon / (ONE_MINUS_INV_E * (1 + epsilon))

    def gap(e12):
        l1, l2 = compute_l1_l2(n, k, N, epsilon, eps11_for(epsilon, e12), e12)
        return l1 - l2

    width = hi
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * width:
            break
    eps12 = 0.5 * (lo + hi)
    return eps11_for(epsilon, eps12), eps12


def guarantee_residual(epsilon, eps11, eps12):
    """Left side minus right side of the linear constraint tying eps11, eps12."""
    lhs = (1 - eps12 * (1 + epsilon)) * ONE_MINUS_INV_E - eps11 * (1 + epsilon)
    return lhs - (ONE_MINUS_INV_E - epsilon)


def choose_SL(graph, S_r, k):
    """Heuristic k-set for the lower bound: the best-connected out-neighbors of S_r.

    Out-neighbors are ranked by out-degree (smaller id on ties); when there are
    fewer than k of them the rest comes from the highest out-degree non-seeds.
    """
    seeds = set(S_r)
    if graph.n - len(seeds) < k:
        raise DomainError(f"need {k} non-seed nodes, graph has {graph.n - len(seeds)}")
    neigh = {v for u in seeds for v, _ in graph.out_adj[u]} - seeds
    chosen = sorted(neigh, key=lambda v: (-len(graph.out_adj[v]), v))[:k]
    if len(chosen) < k:
        chosen += top_by_out_degree(graph, k - len(chosen), exclude=seeds | set(chosen))
    return chosen


def stopping_threshold(epsilon0, N):
    """Accumulated-mass threshold of the stopping rule with failure prob. 1/N."""
    return 1 + 4 * (math.e - 2) * (1 + epsilon0) * math.log(2 * N) / epsilon0**2


@dataclass
class LowerBound:
    value: float
    samples: int
    threshold: float


def _reachable(graph, sources):
    seen = set(sources)
    stack = list(seen)
    while stack:
        u = stack.pop()
        for v, _ in graph.out_adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def provably_zero(graph, S_r, S):
    """True when f*(S) = 0 because ``S`` reaches no node the misinformation can reach."""
    seeds = set(S_r)
    threatened = _reachable(graph, seeds) - seeds
    return not threatened or threatened.isdisjoint(_reachable(graph, set(S) - seeds))


def _x_one(context, rng):
    graph, seeds, target = context
    return x(hybrid_sample(graph, seeds, rng), target)


def estimate_lower_bound(graph, S_r, S_L, epsilon0, N, seed, workers=1,
                         max_samples=DEFAULT_SAMPLE_CAP):
    """Stopping-rule estimate of f*(S_L) within a factor (1 +/- epsilon0).

    Draws R-samples until the normalized coverage ``sum x_i / n`` reaches the
    threshold, then returns ``n * threshold / T`` for ``T`` samples used.
    """
    if not 0 < epsilon0 <= 1:
        raise DomainError(f"epsilon0={epsilon0} must lie in (0, 1]")
    if N <= 1:
        raise DomainError("N must exceed 1")
    n = graph.n
    if provably_zero(graph, S_r, S_L):
        raise DegenerateInstanceError(
            "the heuristic seed set cannot reach any node the misinformation reaches"
        )
    threshold = stopping_threshold(epsilon0, N)
    target = threshold * n  # in un-normalized coverage units
    context = (graph, frozenset(S_r), frozenset(S_L))
    chunk = rngmod.BLOCK * 8 * max(1, workers)
    total = 0
    start = 0
    while start < max_samples:
        stop = min(max_samples, start + chunk)
        values = rngmod.run_indexed(_x_one, context, seed, rngmod.LOWER_BOUND, start, stop, workers)
        for i, v in enumerate(values):
            total += v
            if total >= target:
                used = start + i + 1
                return LowerBound(n * threshold / used, used, threshold)
        start = stop
        chunk = min(chunk * 2, 1 << 16)
    raise DegenerateInstanceError(
        f"lower-bound estimation used {max_samples} samples without converging; "
        "the positive cascade cannot measurably prevent this misinformation"
    )


@dataclass
class FrameworkRun:
    seeds: list
    gains: list
    l: int
    total_sets: int
    edges_examined: int
    edges_decided: int
    sampling_seconds: float
    greedy_seconds: float


def framework(graph, S_r, k, l, seed, workers=1):
    """Generate ``l`` R-samples and run greedy coverage on them."""
    if l < 1:
        raise DomainError("the number of samples l must be at least 1")
    t0 = time.perf_counter()
    samples = generate_rsamples(graph, S_r, 0, l, seed, rngmod.FRAMEWORK, workers)
    t1 = time.perf_counter()
    store = SampleStore.from_rsamples(graph.n, samples)
    result = greedy(store, k)
    t2 = time.perf_counter()
    return FrameworkRun(
        seeds=result.seeds,
        gains=result.gains,
        l=l,
        total_sets=store.total_sets,
        edges_examined=sum(s.edges_examined for s in samples),
        edges_decided=sum(s.edges_decided for s in samples),
        sampling_seconds=t1 - t0,
        greedy_seconds=t2 - t1,
    )


@dataclass
class HmpParams:
    epsilon: float
    N: float
    k: int
    n: int
    epsilon0: float
    eps11: float
    eps12: float
    l1: float
    l2: float
    opt_lower: float
    l: int
    heuristic_fallback: bool = False


@dataclass
class HmpResult:
    seeds: list
    params: HmpParams
    S_L: list
    lower_bound_samples: int
    run: FrameworkRun
    timings: dict = field(default_factory=dict)


def hmp(graph, S_r, k, epsilon, N, seed, workers=1, S_L=None,
        max_lower_bound_samples=DEFAULT_SAMPLE_CAP, fallback=False):
    """Select ``k`` positive seeds with the (1 - 1/e - epsilon) guarantee.

    With ``fallback=True`` a degenerate lower-bound phase is replaced by
    ``OPT_L = k``; the guarantee then no longer holds and the result is flagged.
    """
    _check_epsilon(epsilon)
    if N <= 3:
        raise DomainError(f"N={N} must exceed 3")
    if not S_r:
        raise DomainError("the misinformation seed set must be non-empty")
    if k < 1:
        raise DomainError("k must be at least 1")
    n = graph.n
    epsilon0 = min(epsilon**2 + 2 * epsilon, 1.0)
    timings = {}

    t0 = time.perf_counter()
    if S_L is None:
        S_L = choose_SL(graph, S_r, k)
    heuristic = False
    try:
        lb = estimate_lower_bound(graph, S_r, S_L, epsilon0, N, seed, workers,
                                  max_lower_bound_samples)
        opt_lower, lb_samples = lb.value, lb.samples
    except DegenerateInstanceError:
        if not fallback:
            raise
        opt_lower, lb_samples, heuristic = float(k), max_lower_bound_samples, True
    t1 = time.perf_counter()
    timings["lower_bound"] = t1 - t0

    eps11, eps12 = solve_epsilons(n, k, N, epsilon)
    l1, l2 = compute_l1_l2(n, k, N, epsilon, eps11, eps12)
    l = max(1, math.ceil(max(l1, l2) / opt_lower))
    timings["parameters"] = time.perf_counter() - t1

    run = framework(graph, S_r, k, l, seed, workers)
    timings["sampling"] = run.sampling_seconds
    timings["greedy"] = run.greedy_seconds

    params = HmpParams(
        epsilon=epsilon, N=N, k=k, n=n, epsilon0=epsilon0, eps11=eps11, eps12=eps12,
        l1=l1, l2=l2, opt_lower=opt_lower, l=l, heuristic_fallback=heuristic,
    )
    return HmpResult(run.seeds, params, list(S_L), lb_samples, run, timings)


def format_manifest(graph, S_r, result, seed, timings=True):
    """Key-value text describing a run, node ids in the graph's original labels."""
    p = result.params
    lab = graph.labels

    def ids(nodes):
        return " ".join(str(lab[u]) for u in nodes)

    lines = [
        f"graph_hash={graph.content_hash()}",
        f"nodes={graph.n}",
        f"edges={graph.m}",
        f"misinfo_seeds={ids(S_r)}",
        f"k={p.k}",
        f"epsilon={p.epsilon!r}",
        f"N={p.N!r}",
        f"seed={seed}",
        f"epsilon0={p.epsilon0!r}",
        f"eps11={p.eps11!r}",
        f"eps12={p.eps12!r}",
        f"l1={p.l1!r}",
        f"l2={p.l2!r}",
        f"S_L={ids(result.S_L)}",
        f"lower_bound_samples={result.lower_bound_samples}",
        f"OPT_L={p.opt_lower!r}",
        f"heuristic_fallback={str(p.heuristic_fallback).lower()}",
        f"l={p.l}",
        f"total_sets={result.run.total_sets}",
        f"edges_examined={result.run.edges_examined}",
        f"edges_decided={result.run.edges_decided}",
        f"greedy_gains={' '.join(map(str, result.run.gains))}",
        f"positive_seeds={ids(result.seeds)}",
    ]
    if timings:
        for phase in ("lower_bound", "parameters", "sampling", "greedy"):
            lines.append(f"time_{phase}_seconds={result.timings.get(phase, 0.0):.3f}")
    return "\n".join(lines) + "\n"
