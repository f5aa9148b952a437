"""Hybrid sampling of protector sets, plus the uniform reverse baseline.

One R-sample is built in two phases on a single lazily drawn realization:

1. forward: spread the misinformation from ``S_r`` and record the set
   ``V_r`` of nodes it reaches;
2. reverse: for every reached node ``v`` run a level-by-level reverse BFS over
   live edges and collect the nodes strictly closer to ``v`` than any
   misinformation seed.  That set is exactly the set of single nodes whose
   selection as a positive seed would save ``v``.

For any positive seed set ``S`` the number of collected sets that ``S`` hits is
an unbiased estimate of f*(S).
"""

from dataclasses import dataclass, field

from . import rng as rngmod
from .cascade import Realization
from .errors import DomainError, InvariantError


@dataclass
class RSample:
    """Protector sets from one hybrid-sampling run.

    ``sets[i]`` is the tuple of nodes that can protect ``sources[i]``, in BFS
    order starting with the source itself.
    """

    sets: list = field(default_factory=list)
    sources: list = field(default_factory=list)
    edges_decided: int = 0
    edges_examined: int = 0

    def __len__(self):
        return len(self.sets)


@dataclass
class UniformSample:
    """Result of one uniform reverse sample.

    ``threatened`` is False when the reverse search ran out without meeting a
    misinformation seed, i.e. the root cannot be misinformed in this world.
    """

    root: int
    nodes: tuple
    threatened: bool

    @property
    def empty(self):
        return not self.nodes


def _forward(graph, seeds, realization):
    out_adj = graph.out_adj
    is_live = realization.is_live
    reached = set(seeds)
    frontier = sorted(reached)
    examined = 0
    while frontier:
        nxt = []
        for u in frontier:
            for v, e in out_adj[u]:
                examined += 1
                if v not in reached and is_live(e):
                    reached.add(v)
                    nxt.append(v)
        frontier = nxt
    return reached, examined


def forward_sample(graph, S_r, rng=None, realization=None):
    """Simulate the misinformation alone; returns ``(V_r, realization)``.

    The realization holds exactly the edges examined by the simulation.
    """
    if not S_r:
        raise DomainError("the misinformation seed set must be non-empty")
    if realization is None:
        realization = Realization(graph.prob, rng)
    reached, _ = _forward(graph, S_r, realization)
    return reached, realization


def _reverse(in_adj, is_live, seeds, v):
    """Reverse BFS from ``v``; returns ``(P, hit_seed, edges_examined)``.

    Stops as soon as a frontier contains a seed; that frontier is not added.
    """
    frontier = [v]
    collected = []
    inside = set()
    examined = 0
    while True:
        for u in frontier:
            if u in seeds:
                return collected, True, examined
        collected.extend(frontier)
        inside.update(frontier)
        nxt = []
        queued = set()
        for w in frontier:
            for u, e in in_adj[w]:
                examined += 1
                if u in inside:
                    continue
                if is_live(e) and u not in queued:
                    queued.add(u)
                    nxt.append(u)
        if not nxt:
            return collected, False, examined
        frontier = nxt


def reverse_sample_from(graph, realization, S_r, v):
    """Nodes strictly closer to ``v`` than ``S_r`` under ``realization``.

    Returns ``(P, realization)``; the realization is updated in place.  ``v``
    must be reachable from ``S_r`` in the realization, as is the case for every
    node returned by :func:`forward_sample` on the same realization.
    """
    seeds = S_r if isinstance(S_r, (set, frozenset)) else set(S_r)
    nodes, hit, _ = _reverse(graph.in_adj, realization.is_live, seeds, v)
    if not hit:
        raise InvariantError(f"reverse search from node {v} never met a misinformation seed")
    return set(nodes), realization


def hybrid_sample(graph, S_r, rng=None, realization=None, skip_seeds=True):
    """Draw one R-sample.

    Pass either ``rng`` (a ``random.Random``) or a prepared ``realization``.
    Reached nodes are processed in ascending id order.  Misinformation seeds
    always yield an empty protector set and are skipped unless ``skip_seeds``
    is False, in which case an empty set is recorded for each of them.
    """
    if not S_r:
        raise DomainError("the misinformation seed set must be non-empty")
    if realization is None:
        realization = Realization(graph.prob, rng)
    seeds = frozenset(S_r)
    reached, examined = _forward(graph, seeds, realization)
    in_adj = graph.in_adj
    is_live = realization.is_live
    sample = RSample()
    for v in sorted(reached):
        if v in seeds:
            if not skip_seeds:
                sample.sets.append(())
                sample.sources.append(v)
            continue
        nodes, hit, cost = _reverse(in_adj, is_live, seeds, v)
        if not hit:
            raise InvariantError(
                f"reverse search from reached node {v} never met a misinformation seed"
            )
        examined += cost
        sample.sets.append(tuple(nodes))
        sample.sources.append(v)
    sample.edges_decided = realization.decided_count
    sample.edges_examined = examined
    return sample


def uniform_reverse_sample(graph, S_r, rng):
    """Baseline sample: reverse BFS from a node chosen uniformly at random."""
    if graph.n < 1:
        raise DomainError("cannot sample from an empty graph")
    seeds = S_r if isinstance(S_r, (set, frozenset)) else frozenset(S_r)
    root = rng.randrange(graph.n)
    realization = Realization(graph.prob, rng)
    nodes, hit, _ = _reverse(graph.in_adj, realization.is_live, seeds, root)
    if not hit:
        return UniformSample(root, (), False)
    return UniformSample(root, tuple(nodes), True)


def _hybrid_one(context, rng):
    graph, seeds = context
    return hybrid_sample(graph, seeds, rng)


def _uniform_one(context, rng):
    graph, seeds = context
    return uniform_reverse_sample(graph, seeds, rng)


def generate_rsamples(graph, S_r, start, stop, seed, stream=rngmod.FRAMEWORK, workers=1):
    """R-samples with indices [start, stop) of the given random stream."""
    return rngmod.run_indexed(
        _hybrid_one, (graph, frozenset(S_r)), seed, stream, start, stop, workers
    )


def generate_uniform(graph, S_r, start, stop, seed, stream=rngmod.UNIFORM, workers=1):
    """Uniform reverse samples with indices [start, stop)."""
    return rngmod.run_indexed(
        _uniform_one, (graph, frozenset(S_r)), seed, stream, start, stop, workers
    )


def write_rsamples(fh, rsamples, graph_hash, seed):
    """Dump R-samples as text.

    A ``#`` header records the graph hash, the seed and the sample count.  Each
    protector set is one line of space-separated node ids (``-`` for an empty
    set) and every R-sample is terminated by a blank line.
    """
    fh.write(f"# graph_hash={graph_hash}\n")
    fh.write(f"# seed={seed}\n")
    fh.write(f"# samples={len(rsamples)}\n")
    for rs in rsamples:
        for p in rs.sets:
            fh.write(" ".join(map(str, p)) if p else "-")
            fh.write("\n")
        fh.write("\n")


def read_rsamples(fh):
    """Inverse of :func:`write_rsamples`; returns ``(header, rsamples)``."""
    header = {}
    samples = []
    current = []
    for line in fh:
        line = line.rstrip("\n")
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key.strip()] = value.strip()
            continue
        if not line.strip():
            samples.append(RSample(sets=current))
            current = []
        elif line.strip() == "-":
            current.append(())
        else:
            current.append(tuple(int(t) for t in line.split()))
    if current:
        samples.append(RSample(sets=current))
    expected = header.get("samples")
    if expected is not None and int(expected) != len(samples):
        raise DomainError(f"dump header announces {expected} samples but {len(samples)} were read")
    return header, samples
