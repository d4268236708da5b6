"""Maximal-clique benchmark pack: graphs, DIMACS ingestion, the smoothed
clique-size objective, and the optimality predicates used to judge results.

Vertices are 1-based.  A subgraph selection is a binary solution string
with m=2 categories: category 2 means the vertex is in the selected set,
category 1 means it is out.
"""

import numpy as np


class DimacsParseError(ValueError):
    """Malformed DIMACS input; the message names the offending line."""


class Graph:
    """Undirected simple graph on vertices 1..n, dense boolean adjacency."""

    def __init__(self, n_vertices, edges=(), self_loops_dropped=0):
        if n_vertices < 0:
            raise ValueError("vertex count must be >= 0")
        self.n = int(n_vertices)
        self.adj = np.zeros((self.n, self.n), dtype=bool)
        self.self_loops_dropped = self_loops_dropped
        for i, j in edges:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"edge ({i}, {j}) out of range for |V|={self.n}")
            if i == j:
                raise ValueError(f"self-loop ({i}, {j}) not allowed")
            self.adj[i - 1, j - 1] = True
            self.adj[j - 1, i - 1] = True

    @property
    def vertex_count(self):
        return self.n

    @property
    def edge_count(self):
        """Number of undirected edges."""
        return int(self.adj.sum()) // 2

    def has_edge(self, i, j):
        return bool(self.adj[i - 1, j - 1])

    def edges(self):
        """Sorted list of undirected edges as (i, j) with i < j, 1-based."""
        rows, cols = np.nonzero(np.triu(self.adj, k=1))
        return [(int(r) + 1, int(c) + 1) for r, c in zip(rows, cols)]


def parse_dimacs(text):
    """Parse DIMACS clq format: ``c`` comments, one ``p edge <n> <m>`` line,
    and ``e <i> <j>`` edge lines with 1-based vertices.

    Duplicate edge lines are idempotent; self-loop lines are dropped and
    counted on the returned graph's ``self_loops_dropped``.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    n = None
    pairs = []
    loops = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens or tokens[0] == "c":
            continue
        if tokens[0] == "p":
            if n is not None:
                raise DimacsParseError(f"line {lineno}: duplicate problem line")
            if len(tokens) != 4 or tokens[1] != "edge":
                raise DimacsParseError(f"line {lineno}: expected 'p edge <n> <m>'")
            try:
                n = int(tokens[2])
                int(tokens[3])
            except ValueError:
                raise DimacsParseError(f"line {lineno}: non-integer counts in problem line") from None
            if n < 0:
                raise DimacsParseError(f"line {lineno}: negative vertex count")
        elif tokens[0] == "e":
            if n is None:
                raise DimacsParseError(f"line {lineno}: edge line before problem line")
            if len(tokens) != 3:
                raise DimacsParseError(f"line {lineno}: expected 'e <i> <j>'")
            try:
                i, j = int(tokens[1]), int(tokens[2])
            except ValueError:
                raise DimacsParseError(f"line {lineno}: non-integer vertex index") from None
            if not (1 <= i <= n and 1 <= j <= n):
                raise DimacsParseError(f"line {lineno}: vertex index out of range 1..{n}")
            if i == j:
                loops += 1
                continue
            pairs.append((i, j))
        else:
            raise DimacsParseError(f"line {lineno}: unrecognized line type {tokens[0]!r}")
    if n is None:
        raise DimacsParseError("missing 'p edge' problem line")
    return Graph(n, pairs, self_loops_dropped=loops)


def to_dimacs(graph):
    """Serialize back to DIMACS clq text (undirected edges listed once)."""
    lines = [f"p edge {graph.n} {graph.edge_count}"]
    lines.extend(f"e {i} {j}" for i, j in graph.edges())
    return "\n".join(lines) + "\n"


MEMBER = 2  # solution category marking subgraph membership


def members(x):
    """0-based vertex indices selected by a binary solution string."""
    return np.flatnonzero(np.asarray(x) == MEMBER)


def solution_from_members(vertex_ids, n):
    """Binary solution string selecting the given 1-based vertices."""
    x = np.ones(n, dtype=np.int64)
    for v in vertex_ids:
        x[v - 1] = MEMBER
    return x


def soft_clique_size(x, graph, kappa):
    """Edge density of the selected subgraph with a size reward.

    Counts ordered vertex pairs of the selection that are edges, divided by
    ``max(u * (u - 1 + kappa), 1)`` where u is the selection size.  Values
    lie in [0, 1]; at kappa=0 a value of 1 certifies a clique of size >= 2,
    and raising kappa boosts larger subgraphs relative to smaller ones.
    """
    if not 0.0 <= kappa <= 1.0:
        raise ValueError("kappa must lie in [0, 1]")
    sel = members(x)
    u = sel.size
    ordered_edges = int(graph.adj[np.ix_(sel, sel)].sum())
    return ordered_edges / max(u * (u - 1 + kappa), 1)


def clique_objective(graph, kappa):
    """Objective closure over solutions for the optimizer loops."""

    def objective(x):
        return soft_clique_size(x, graph, kappa)

    return objective


def is_clique(vertex_ids, graph):
    """True when every pair of the given 1-based vertices is an edge
    (vacuously true for at most one vertex)."""
    idx = np.unique(np.asarray(list(vertex_ids), dtype=np.int64)) - 1
    if idx.size > 0 and (idx.min() < 0 or idx.max() >= graph.n):
        raise ValueError("vertex id out of range")
    u = idx.size
    if u <= 1:
        return True
    return int(graph.adj[np.ix_(idx, idx)].sum()) == u * (u - 1)


def is_inclusion_maximal(vertex_ids, graph):
    """True when the set is a clique no outside vertex can extend.

    Non-cliques return False rather than raising.
    """
    if not is_clique(vertex_ids, graph):
        return False
    idx = np.unique(np.asarray(list(vertex_ids), dtype=np.int64)) - 1
    extendable = graph.adj[:, idx].all(axis=1)
    extendable[idx] = False
    return not extendable.any()


def is_local_optimum(x, graph, kappa):
    """True when no single-vertex flip of ``x`` scores strictly higher.

    Flips are evaluated incrementally: toggling vertex v changes the
    ordered-pair count by +-2 * (edges between v and the selection).
    """
    if not 0.0 <= kappa <= 1.0:
        raise ValueError("kappa must lie in [0, 1]")
    x = np.asarray(x)
    sel = members(x)
    u = sel.size
    ordered = int(graph.adj[np.ix_(sel, sel)].sum())
    value = ordered / max(u * (u - 1 + kappa), 1)

    deg_in = graph.adj[:, sel].sum(axis=1)  # edges from each vertex into the selection
    in_sel = np.zeros(graph.n, dtype=bool)
    in_sel[sel] = True
    for v in range(graph.n):
        if in_sel[v]:
            flipped_u = u - 1
            flipped_ordered = ordered - 2 * int(deg_in[v])
        else:
            flipped_u = u + 1
            flipped_ordered = ordered + 2 * int(deg_in[v])
        flipped = flipped_ordered / max(flipped_u * (flipped_u - 1 + kappa), 1)
        if flipped > value:
            return False
    return True
