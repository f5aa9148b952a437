"""Coverage estimator over a sample store and greedy max-coverage selection."""

import heapq
from dataclasses import dataclass
from itertools import combinations

from .errors import DomainError


def x(rsample, S):
    """Number of protector sets in one R-sample that intersect ``S``."""
    S = S if isinstance(S, (set, frozenset)) else set(S)
    if not S:
        return 0
    sets = rsample.sets if hasattr(rsample, "sets") else rsample
    return sum(1 for p in sets if not S.isdisjoint(p))


class SampleStore:
    """Flattened protector sets with a node -> set-id inverted index.

    ``l`` is the number of samples the sets came from; ``owner[i]`` is the
    sample index of flat set ``i``.  Treat a built store as read-only.
    """

    def __init__(self, n, sets, owner, l):
        self.n = n
        self.sets = sets
        self.owner = owner
        self.l = l
        index = [[] for _ in range(n)]
        for i, p in enumerate(sets):
            for u in p:
                index[u].append(i)
        self.index = index

    @classmethod
    def from_rsamples(cls, n, rsamples):
        sets, owner = [], []
        for j, rs in enumerate(rsamples):
            for p in rs.sets:
                sets.append(p)
                owner.append(j)
        return cls(n, sets, owner, len(rsamples))

    @classmethod
    def from_sets(cls, n, sets):
        """One sample per set, as produced by uniform reverse sampling."""
        sets = [tuple(p) for p in sets]
        return cls(n, sets, list(range(len(sets))), len(sets))

    @property
    def total_sets(self):
        return len(self.sets)

    def covered_count(self, S):
        covered = set()
        for u in set(S):
            covered.update(self.index[u])
        return len(covered)


def x_bar(store, S):
    """Mean over the store's samples of the number of sets hit by ``S``."""
    if store.l < 1:
        raise DomainError("the sample store is empty")
    return store.covered_count(S) / store.l


@dataclass
class GreedyResult:
    seeds: list
    gains: list  # marginal number of newly covered sets, per pick

    @property
    def covered(self):
        return sum(self.gains)

    @property
    def padded(self):
        """Number of trailing picks that covered nothing new."""
        return sum(1 for g in self.gains if g == 0)


def greedy(store, k):
    """Pick ``k`` nodes covering as many stored sets as possible.

    Each round takes the node with the most not-yet-covered sets, smallest id
    on ties.  Once nothing is left to cover the remaining picks are the
    smallest unused ids, reported with gain 0.  Total work is linear in the
    store size plus ``k * n``.
    """
    n = store.n
    if k < 1:
        raise DomainError("k must be at least 1")
    if k > n:
        raise DomainError(f"k={k} exceeds the number of nodes {n}")
    sets, index = store.sets, store.index
    gain = [len(ids) for ids in index]
    covered = bytearray(len(sets))
    chosen = bytearray(n)
    seeds, gains = [], []
    for _ in range(k):
        best, best_gain = -1, -1
        for u in range(n):
            g = gain[u]
            if g > best_gain and not chosen[u]:
                best, best_gain = u, g
        chosen[best] = 1
        seeds.append(best)
        gains.append(best_gain)
        for i in index[best]:
            if not covered[i]:
                covered[i] = 1
                for w in sets[i]:
                    gain[w] -= 1
    return GreedyResult(seeds, gains)


def celf_greedy(store, k):
    """Lazy-evaluation variant of :func:`greedy` with the same output."""
    n = store.n
    if k < 1:
        raise DomainError("k must be at least 1")
    if k > n:
        raise DomainError(f"k={k} exceeds the number of nodes {n}")
    index = store.index
    covered = bytearray(store.total_sets)
    heap = [(-len(index[u]), u, 0) for u in range(n)]
    heapq.heapify(heap)
    seeds, gains = [], []
    for rnd in range(k):
        while True:
            neg, u, stamp = heapq.heappop(heap)
            if stamp == rnd:
                break
            g = sum(1 for i in index[u] if not covered[i])
            heapq.heappush(heap, (-g, u, rnd))
        seeds.append(u)
        gains.append(-neg)
        for i in index[u]:
            covered[i] = 1
    return GreedyResult(seeds, gains)


def exhaustive_best(store, k):
    """Best coverage over all ``k``-subsets (for verification on tiny stores)."""
    best = None
    for combo in combinations(range(store.n), k):
        c = store.covered_count(combo)
        if best is None or c > best[1]:
            best = (list(combo), c)
    return best
