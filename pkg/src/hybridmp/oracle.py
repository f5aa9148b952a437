"""Exact answers on tiny instances by enumerating every full realization.

Edge probabilities are read as exact decimals (``0.1`` means 1/10), so every
realization has a rational probability and all expectations come out as exact
fractions.  Enumeration is exponential in the number of edges.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .cascade import FixedRealization, live_distances, prevented_count
from .coverage import x
from .errors import OracleSizeError
from .sampler import hybrid_sample

MAX_EDGES = 24
MAX_EDGES_OPT = 20
MAX_SUBSETS = 10**5


@dataclass
class ExactResult:
    value: Fraction
    trace: list = None  # (mask, probability, contribution) per realization

    def __float__(self):
        return float(self.value)


def edge_fractions(graph):
    return [Fraction(repr(p)) for p in graph.prob]


def _check_size(graph, limit):
    if graph.m > limit:
        raise OracleSizeError(f"{graph.m} edges exceed the enumeration limit of {limit}")


def realizations(graph):
    """Yield ``(mask, weight, live)`` for all full realizations of nonzero probability.

    ``weight / denominator(graph)`` is the realization's probability; bit ``e``
    of ``mask`` is set when edge ``e`` is live.
    """
    fr = edge_fractions(graph)
    m = graph.m
    # certain edges are live in every realization of positive probability
    free = [e for e in range(m) if fr[e] != 1]
    base = sum(1 << e for e in range(m) if fr[e] == 1)
    for sub in range(1 << len(free)):
        w = 1
        mask = base
        for j, e in enumerate(free):
            f = fr[e]
            if sub >> j & 1:
                w *= f.numerator
                mask |= 1 << e
            else:
                w *= f.denominator - f.numerator
        yield mask, w, [bool(mask >> e & 1) for e in range(m)]


def denominator(graph):
    den = 1
    for f in edge_fractions(graph):
        den *= f.denominator
    return den


def total_probability(graph):
    """Sum of all realization probabilities; exactly 1 by construction."""
    _check_size(graph, MAX_EDGES)
    return Fraction(sum(w for _, w, _ in realizations(graph)), denominator(graph))


def exact_f_star_many(graph, S_r, seed_sets):
    """Exact f*(S) for each ``S`` in ``seed_sets``, sharing one enumeration."""
    _check_size(graph, MAX_EDGES)
    seed_sets = [list(S) for S in seed_sets]
    S_r = list(S_r)
    sums = [0] * len(seed_sets)
    for _, w, live in realizations(graph):
        g = FixedRealization(live)
        dist_r = live_distances(graph, g, S_r) if S_r else {}
        for j, S in enumerate(seed_sets):
            c = prevented_count(graph, g, S_r, S, dist_r)
            if c:
                sums[j] += w * c
    den = denominator(graph)
    return [Fraction(s, den) for s in sums]


def exact_f_star(graph, S_r, S, trace=False):
    """Exact f*(S) = sum over realizations of Pr[g] * (nodes saved in g)."""
    _check_size(graph, MAX_EDGES)
    if not trace:
        return ExactResult(exact_f_star_many(graph, S_r, [S])[0])
    den = denominator(graph)
    total = 0
    rows = []
    for mask, w, live in realizations(graph):
        c = prevented_count(graph, FixedRealization(live), list(S_r), list(S))
        total += w * c
        rows.append((mask, Fraction(w, den), c))
    return ExactResult(Fraction(total, den), rows)


def exact_expected_x_many(graph, S_r, seed_sets):
    """Exact E[x(P, S)] for each ``S``, running hybrid sampling on every realization."""
    _check_size(graph, MAX_EDGES)
    seed_sets = [set(S) for S in seed_sets]
    sums = [0] * len(seed_sets)
    if not S_r:
        return [Fraction(0)] * len(seed_sets)
    for _, w, live in realizations(graph):
        rs = hybrid_sample(graph, S_r, realization=FixedRealization(live))
        for j, S in enumerate(seed_sets):
            c = x(rs, S)
            if c:
                sums[j] += w * c
    den = denominator(graph)
    return [Fraction(s, den) for s in sums]


def exact_expected_x(graph, S_r, S, trace=False):
    """Exact expectation of the hybrid-sampling estimator for ``S``."""
    _check_size(graph, MAX_EDGES)
    if not trace:
        return ExactResult(exact_expected_x_many(graph, S_r, [S])[0])
    den = denominator(graph)
    S = set(S)
    total = 0
    rows = []
    for mask, w, live in realizations(graph):
        if not S_r:
            rows.append((mask, Fraction(w, den), 0))
            continue
        c = x(hybrid_sample(graph, S_r, realization=FixedRealization(live)), S)
        total += w * c
        rows.append((mask, Fraction(w, den), c))
    return ExactResult(Fraction(total, den), rows)


def exact_opt(graph, S_r, k):
    """Best k-subset of nodes by exact f*; lexicographically first on ties."""
    if k == 0:
        return [], Fraction(0)
    _check_size(graph, MAX_EDGES_OPT)
    if comb(graph.n, k) > MAX_SUBSETS:
        raise OracleSizeError(f"C({graph.n}, {k}) subsets exceed the limit of {MAX_SUBSETS}")
    candidates = [list(c) for c in combinations(range(graph.n), k)]
    values = exact_f_star_many(graph, S_r, candidates)
    best = 0
    for j in range(1, len(candidates)):
        if values[j] > values[best]:
            best = j
    return candidates[best], values[best]
