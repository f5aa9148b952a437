"""Realizations of the IC model and evaluation of the prevention objective.

A realization fixes, for every edge, whether it is live.  ``Realization``
decides edges lazily, drawing one uniform number the first time an edge is
looked at and remembering the outcome, so any traversal order sees a
consistent world and no edge is ever sampled twice.

Under a realization, node ``v`` is saved by positive seeds ``S`` exactly when
the hop distance from ``S`` to ``v`` over live edges is strictly smaller than
the distance from the misinformation seeds ``S_r`` (ties go to the
misinformation).  ``prevented_count`` counts the nodes that are reachable from
``S_r`` yet saved; its expectation is f*(S) = f(S) - f(empty).
"""

import enum
import math

from . import rng as rngmod
from .errors import DomainError


class EdgeState(enum.Enum):
    UNDETERMINED = 0
    LIVE = 1
    BLOCKED = 2


class Realization:
    """Lazily sampled edge states for one draw of the IC model."""

    __slots__ = ("prob", "rng", "decided")

    def __init__(self, prob, rng):
        self.prob = prob
        self.rng = rng
        self.decided = {}

    def is_live(self, e):
        s = self.decided.get(e)
        if s is None:
            s = self.rng.random() <= self.prob[e]
            self.decided[e] = s
        return s

    def peek(self, e):
        s = self.decided.get(e)
        if s is None:
            return EdgeState.UNDETERMINED
        return EdgeState.LIVE if s else EdgeState.BLOCKED

    @property
    def decided_count(self):
        return len(self.decided)

    def is_full(self):
        return len(self.decided) == len(self.prob)


class FixedRealization:
    """A full realization given up front, e.g. as a bitmask over edge ids."""

    __slots__ = ("live",)

    def __init__(self, live):
        self.live = live

    @classmethod
    def from_mask(cls, mask, m):
        return cls([bool(mask >> e & 1) for e in range(m)])

    def is_live(self, e):
        return self.live[e]

    def peek(self, e):
        return EdgeState.LIVE if self.live[e] else EdgeState.BLOCKED

    @property
    def decided_count(self):
        return len(self.live)

    def is_full(self):
        return True


def edge_state(realization, edge_id):
    """State of an edge, deciding it now if it is still undetermined."""
    return EdgeState.LIVE if realization.is_live(edge_id) else EdgeState.BLOCKED


def live_distances(graph, realization, sources, limit=None):
    """Hop distances from ``sources`` over live edges, as ``{node: dist}``.

    Only edges leading to not-yet-reached nodes are looked at.  With ``limit``
    the search stops expanding at that depth.
    """
    out_adj = graph.out_adj
    dist = {s: 0 for s in sources}
    frontier = list(dist)
    d = 0
    if type(realization) is Realization:
        # hot path of every simulation: the lazy edge draw is inlined
        decided = realization.decided
        prob = realization.prob
        draw = realization.rng.random
        while frontier and (limit is None or d < limit):
            d += 1
            nxt = []
            for u in frontier:
                for v, e in out_adj[u]:
                    if v in dist:
                        continue
                    live = decided.get(e)
                    if live is None:
                        live = decided[e] = draw() <= prob[e]
                    if live:
                        dist[v] = d
                        nxt.append(v)
            frontier = nxt
        return dist
    is_live = realization.is_live
    while frontier and (limit is None or d < limit):
        d += 1
        nxt = []
        for u in frontier:
            for v, e in out_adj[u]:
                if v not in dist and is_live(e):
                    dist[v] = d
                    nxt.append(v)
        frontier = nxt
    return dist


def is_protected(realization, graph, S_r, S, v):
    """True if ``v`` ends up not misinformed under ``realization``.

    That is the case when no live path leads from ``S_r`` to ``v``, or when
    ``S`` is strictly closer to ``v`` than ``S_r`` is.
    """
    d_r = live_distances(graph, realization, S_r).get(v)
    if d_r is None:
        return True
    d_s = live_distances(graph, realization, S).get(v)
    return d_s is not None and d_s < d_r


def prevented_count(graph, realization, S_r, S, dist_r=None):
    """Nodes reachable from ``S_r`` that ``S`` reaches strictly first.

    ``dist_r`` may carry precomputed distances from ``S_r`` on the same
    realization, for callers that score many seed sets on one world.
    """
    if not S or not S_r:
        return 0
    if dist_r is None:
        dist_r = live_distances(graph, realization, S_r)
    reach = max(dist_r.values())
    if reach == 0:
        return 0
    dist_s = live_distances(graph, realization, S, limit=reach - 1)
    count = 0
    for v, d in dist_s.items():
        d_r = dist_r.get(v)
        if d_r is not None and d < d_r:
            count += 1
    return count


def simulate_competing(graph, S_r, S, realization):
    """Round-by-round diffusion of both cascades; returns the misinformed nodes.

    A node claimed by both cascades in the same round, or seeded by both,
    becomes misinformed.
    """
    out_adj = graph.out_adj
    is_live = realization.is_live
    misinformed = set(S_r)
    positive = set(S) - misinformed
    frontier_r = sorted(misinformed)
    frontier_p = sorted(positive)
    while frontier_r or frontier_p:
        new_r = set()
        new_p = set()
        for u in frontier_r:
            for v, e in out_adj[u]:
                if v not in misinformed and v not in positive and is_live(e):
                    new_r.add(v)
        for u in frontier_p:
            for v, e in out_adj[u]:
                if v not in misinformed and v not in positive and is_live(e):
                    new_p.add(v)
        new_p -= new_r
        misinformed |= new_r
        positive |= new_p
        frontier_r = sorted(new_r)
        frontier_p = sorted(new_p)
    return misinformed


def _prevented_many(context, rng):
    """Prevented counts of several seed sets on one realization.

    The misinformation's distances are computed once.  Each seed set then
    continues from the same snapshot of the realization and the rng, so its
    count is exactly what a run with that set alone would produce.
    """
    graph, S_r, seed_sets = context
    realization = Realization(graph.prob, rng)
    dist_r = live_distances(graph, realization, S_r)
    if len(seed_sets) == 1:
        return [prevented_count(graph, realization, S_r, seed_sets[0], dist_r)]
    decided = realization.decided
    state = rng.getstate()
    out = []
    for S in seed_sets:
        rng.setstate(state)
        branch = Realization(graph.prob, rng)
        branch.decided = dict(decided)
        out.append(prevented_count(graph, branch, S_r, S, dist_r))
    return out


def _mean_stderr(values):
    n = len(values)
    mean = math.fsum(values) / n
    if n == 1:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2 for x in values) / (n - 1)
    return mean, math.sqrt(var / n)


def monte_carlo_f_star_many(graph, S_r, seed_sets, num_sims, seed, workers=1):
    """Estimate f*(S) for every ``S`` in ``seed_sets`` on shared simulations.

    Returns a list of ``(mean, standard_error)``.  The result for each set is
    identical to :func:`monte_carlo_f_star` on that set alone.
    """
    if num_sims < 1:
        raise DomainError("num_sims must be at least 1")
    seed_sets = [list(S) for S in seed_sets]
    active = [S for S in seed_sets if S]
    if not active:
        return [(0.0, 0.0) for _ in seed_sets]
    rows = rngmod.run_indexed(
        _prevented_many, (graph, list(S_r), active), seed, rngmod.EVALUATION,
        0, num_sims, workers, block=1,
    )
    stats = iter([_mean_stderr([row[j] for row in rows]) for j in range(len(active))])
    return [next(stats) if S else (0.0, 0.0) for S in seed_sets]


def monte_carlo_f_star(graph, S_r, S, num_sims, seed, workers=1):
    """Estimate f*(S) by simulation; returns ``(mean, standard_error)``.

    Each simulation draws one lazy realization and counts the prevented nodes
    on it, so f(S) and f(empty) are differenced on common random numbers.
    Simulation ``i`` has its own random stream derived from ``seed`` and ``i``.
    """
    return monte_carlo_f_star_many(graph, S_r, [S], num_sims, seed, workers)[0]
