"""Directed graphs with per-edge propagation probabilities.

Nodes are dense integers ``0..n-1``.  Graphs loaded from edge-list files keep
the original ids in ``labels`` so results can be reported in the caller's
numbering.  A ``Graph`` is treated as immutable once built; the probability
assignment helpers return new graphs.
"""

import hashlib
import heapq
import io

from .errors import DomainError, EdgeListParseError


class Graph:
    """Directed graph with forward and reverse adjacency lists.

    ``out_adj[u]`` holds ``(v, edge_id)`` pairs and ``in_adj[v]`` holds
    ``(u, edge_id)`` pairs, both in edge-id order.  ``prob[edge_id]`` is the
    propagation probability of that edge.
    """

    __slots__ = ("n", "m", "src", "dst", "prob", "out_adj", "in_adj", "labels", "_index")

    def __init__(self, n, edges, labels=None):
        self.n = int(n)
        src, dst, prob = [], [], []
        for u, v, p in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DomainError(f"edge ({u}, {v}) has an endpoint outside 0..{self.n - 1}")
            p = float(p)
            if not 0.0 < p <= 1.0:
                raise DomainError(f"probability {p} of edge ({u}, {v}) is outside (0, 1]")
            src.append(u)
            dst.append(v)
            prob.append(p)
        self.m = len(src)
        self.src = src
        self.dst = dst
        self.prob = prob
        self.out_adj = [[] for _ in range(self.n)]
        self.in_adj = [[] for _ in range(self.n)]
        for e in range(self.m):
            self.out_adj[src[e]].append((dst[e], e))
            self.in_adj[dst[e]].append((src[e], e))
        if labels is None:
            labels = list(range(self.n))
        elif len(labels) != self.n:
            raise DomainError("labels must have one entry per node")
        self.labels = list(labels)
        self._index = None

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.src == other.src
            and self.dst == other.dst
            and self.prob == other.prob
            and self.labels == other.labels
        )

    def edges(self):
        """Iterate ``(u, v, p)`` in edge-id order."""
        return zip(self.src, self.dst, self.prob)

    def out_degree(self, u):
        return len(self.out_adj[u])

    def in_degree(self, v):
        return len(self.in_adj[v])

    def with_probabilities(self, prob):
        return Graph(self.n, zip(self.src, self.dst, prob), self.labels)

    def index_of(self, label):
        """Dense id of an original node label."""
        if self._index is None:
            self._index = {lab: i for i, lab in enumerate(self.labels)}
        try:
            return self._index[label]
        except KeyError:
            raise DomainError(f"node {label!r} is not in the graph") from None

    def label_of(self, i):
        return self.labels[i]

    def to_edge_list(self):
        """Serialize as ``u v p`` lines using original labels, in edge-id order."""
        out = io.StringIO()
        for u, v, p in self.edges():
            out.write(f"{self.labels[u]} {self.labels[v]} {p:.17g}\n")
        return out.getvalue()

    def content_hash(self):
        """Short hex digest identifying node count, edges and probabilities."""
        h = hashlib.sha256(f"n={self.n}\n".encode())
        h.update(self.to_edge_list().encode())
        return h.hexdigest()[:16]


def parse_probability_mode(mode):
    """Normalize a probability mode.

    Accepts ``"file"``, ``"wc"`` (weighted cascade), ``"uniform:P"`` or a bare
    number ``P``.  Returns ``("file", None)``, ``("wc", None)`` or
    ``("uniform", p)``.
    """
    if isinstance(mode, (int, float)):
        p = float(mode)
    else:
        text = str(mode).strip().lower()
        if text == "file":
            return "file", None
        if text in ("wc", "weighted-cascade", "weighted_cascade"):
            return "wc", None
        if text.startswith("uniform:"):
            text = text[len("uniform:"):]
        try:
            p = float(text)
        except ValueError:
            raise DomainError(
                f"unknown probability mode {mode!r}; expected uniform:P, wc or file"
            ) from None
    if not 0.0 < p <= 1.0:
        raise DomainError(f"uniform probability {p} is outside (0, 1]")
    return "uniform", p


def load_edge_list(stream, probability_mode="file"):
    """Read a whitespace-separated edge list.

    Each non-comment line is ``u v`` or ``u v p``.  A probability on the line
    wins over ``probability_mode``; edges without one get the mode's value
    (``"file"`` mode requires every line to carry one).  Duplicate ``(u, v)``
    pairs keep the first occurrence and self-loops are dropped.  Node ids are
    renumbered densely in order of first appearance.
    """
    kind, uniform_p = parse_probability_mode(probability_mode)
    if isinstance(stream, str):
        stream = io.StringIO(stream)

    index = {}
    labels = []
    raw = []  # (u, v, p or None)
    seen = set()
    for lineno, line in enumerate(stream, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) not in (2, 3):
            raise EdgeListParseError(lineno, text, "expected 'u v' or 'u v p'")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(lineno, text, "node ids must be integers") from None
        p = None
        if len(parts) == 3:
            try:
                p = float(parts[2])
            except ValueError:
                raise EdgeListParseError(lineno, text, "probability is not a number") from None
            if not 0.0 < p <= 1.0:
                raise DomainError(f"line {lineno}: probability {p} is outside (0, 1]")
        elif kind == "file":
            raise EdgeListParseError(lineno, text, "missing probability in file mode")
        if a == b:
            continue
        for lab in (a, b):
            if lab not in index:
                index[lab] = len(labels)
                labels.append(lab)
        u, v = index[a], index[b]
        if (u, v) in seen:
            continue
        seen.add((u, v))
        raw.append((u, v, p))

    n = len(labels)
    if kind == "wc":
        indeg = [0] * n
        for _, v, _ in raw:
            indeg[v] += 1
        edges = [(u, v, p if p is not None else 1.0 / indeg[v]) for u, v, p in raw]
    else:
        edges = [(u, v, p if p is not None else uniform_p) for u, v, p in raw]
    return Graph(n, edges, labels)


def read_edge_list(path, probability_mode="file"):
    with open(path) as fh:
        return load_edge_list(fh, probability_mode)


def assign_uniform(graph, p):
    """Copy of ``graph`` with every edge probability set to ``p``."""
    p = float(p)
    if not 0.0 < p <= 1.0:
        raise DomainError(f"uniform probability {p} is outside (0, 1]")
    return graph.with_probabilities([p] * graph.m)


def assign_weighted_cascade(graph):
    """Copy of ``graph`` where edge ``(u, v)`` has probability 1/in_degree(v)."""
    return graph.with_probabilities([1.0 / len(graph.in_adj[v]) for v in graph.dst])


def from_networkx(nx_graph):
    """Build a Graph from a networkx (Di)Graph.

    Undirected graphs are symmetrized.  Edge attribute ``p`` is used as the
    probability when present, otherwise 1.0 (assign a model afterwards).
    """
    nodes = list(nx_graph.nodes())
    index = {lab: i for i, lab in enumerate(nodes)}
    directed = nx_graph.is_directed()
    edges = []
    seen = set()
    for a, b, data in nx_graph.edges(data=True):
        pairs = [(a, b)] if directed else [(a, b), (b, a)]
        for x, y in pairs:
            u, v = index[x], index[y]
            if u == v or (u, v) in seen:
                continue
            seen.add((u, v))
            edges.append((u, v, data.get("p", 1.0)))
    return Graph(len(nodes), edges, nodes)


def ic_spread(graph, seeds, rng):
    """Number of nodes reached by one independent-cascade run from ``seeds``."""
    out_adj, prob = graph.out_adj, graph.prob
    random = rng.random
    active = set(seeds)
    frontier = list(active)
    while frontier:
        nxt = []
        for u in frontier:
            for v, e in out_adj[u]:
                if v not in active and random() <= prob[e]:
                    active.add(v)
                    nxt.append(v)
        frontier = nxt
    return len(active)


def top_by_out_degree(graph, count, exclude=()):
    """``count`` nodes of largest out-degree, smaller id first on ties."""
    exclude = set(exclude)
    candidates = (u for u in range(graph.n) if u not in exclude)
    return heapq.nsmallest(count, candidates, key=lambda u: (-len(graph.out_adj[u]), u))


def select_misinfo_seeds(graph, count, influence_sims, rng, candidate_factor=10):
    """Pick ``count`` misinformation seeds of highest individual influence.

    Only the ``candidate_factor * count`` nodes of largest out-degree are
    simulated; each gets ``influence_sims`` single-cascade runs and the nodes
    with the largest total spread win (smaller id on ties).
    """
    if count < 0 or count > graph.n:
        raise DomainError(f"cannot pick {count} seeds from {graph.n} nodes")
    if influence_sims < 1:
        raise DomainError("influence_sims must be at least 1")
    candidates = top_by_out_degree(graph, min(graph.n, candidate_factor * count))
    totals = {}
    for u in sorted(candidates):
        totals[u] = sum(ic_spread(graph, (u,), rng) for _ in range(influence_sims))
    ranked = sorted(totals, key=lambda u: (-totals[u], u))
    return ranked[:count]


def check_seeds(graph, seeds, role="seed"):
    """Validate a seed list (no duplicates, ids in range) and return it as a list."""
    seeds = [int(s) for s in seeds]
    if len(set(seeds)) != len(seeds):
        raise DomainError(f"{role} set contains duplicate nodes")
    for s in seeds:
        if not 0 <= s < graph.n:
            raise DomainError(f"{role} node {s} is outside 0..{graph.n - 1}")
    return seeds
