"""Graph container, instance I/O, and seeded instance generators.

Vertices are normalized to 0..n-1. Induced subgraphs keep a label map back
to the parent graph so solutions found on a subgraph can be lifted.
"""
from __future__ import annotations

import random
from typing import Iterable, Sequence


class GraphParseError(ValueError):
    """Malformed instance text; the message names the offending line."""


class Graph:
    """Simple undirected graph with set-based adjacency.

    Immutable after construction: `adj` is a tuple of frozensets and safe to
    share across threads. `labels`, when present, maps local vertex i to the
    identifier it had in the parent graph this one was induced from.
    """

    __slots__ = ("n", "adj", "labels")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]],
                 labels: Sequence[int] | None = None):
        if n < 0:
            raise ValueError(f"vertex count must be >= 0, got {n}")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        self.n = n
        self.adj = tuple(frozenset(s) for s in nbrs)
        if labels is not None:
            if len(labels) != n:
                raise ValueError("label map length must equal vertex count")
            self.labels = tuple(labels)
        else:
            self.labels = None

    @property
    def m(self) -> int:
        return sum(len(s) for s in self.adj) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in sorted(self.adj[u]) if u < v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def to_parent(self, vertices: Iterable[int]) -> tuple[int, ...]:
        """Map local vertex ids to the parent graph's ids (identity if no labels)."""
        if self.labels is None:
            return tuple(sorted(vertices))
        return tuple(sorted(self.labels[v] for v in vertices))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise GraphParseError(f"line {lineno}: {what} is not an integer: {token!r}") from None


def parse_graph(text: str | bytes, fmt: str = "auto") -> Graph:
    """Parse an instance in PACE .gr, DIMACS, or plain edge-list format.

    All three formats use 1-indexed vertices. Duplicate edges collapse
    silently; self-loops are errors. `fmt` is one of "pace-gr", "dimacs",
    "edge-list", or "auto" (detect from the header line).
    """
    if isinstance(text, bytes):
        text = text.decode("ascii", errors="replace")
    lines = text.splitlines()

    if fmt == "auto":
        fmt = "edge-list"
        for raw in lines:
            s = raw.strip()
            if not s or s.startswith("c"):
                continue
            if s.startswith("p tw"):
                fmt = "pace-gr"
            elif s.startswith("p edge") or s.startswith("p col"):
                fmt = "dimacs"
            break

    n = None
    pairs: list[tuple[int, int, int]] = []  # (u, v, lineno), 1-indexed
    for lineno, raw in enumerate(lines, start=1):
        s = raw.strip()
        if not s or s.startswith("c"):
            continue
        tok = s.split()
        if fmt == "pace-gr" and tok[0] == "p":
            if len(tok) != 4 or tok[1] != "tw":
                raise GraphParseError(f"line {lineno}: malformed header {s!r}, expected 'p tw <n> <m>'")
            n = _parse_int(tok[2], lineno, "vertex count")
            continue
        if fmt == "dimacs" and tok[0] == "p":
            if len(tok) != 4:
                raise GraphParseError(f"line {lineno}: malformed header {s!r}, expected 'p edge <n> <m>'")
            n = _parse_int(tok[2], lineno, "vertex count")
            continue
        if fmt == "dimacs":
            if tok[0] != "e":
                raise GraphParseError(f"line {lineno}: expected 'e <u> <v>', got {s!r}")
            tok = tok[1:]
        if len(tok) != 2:
            raise GraphParseError(f"line {lineno}: expected an edge 'u v', got {s!r}")
        u = _parse_int(tok[0], lineno, "vertex")
        v = _parse_int(tok[1], lineno, "vertex")
        pairs.append((u, v, lineno))

    if fmt in ("pace-gr", "dimacs") and n is None:
        raise GraphParseError("line 1: missing problem header line")
    if n is None:  # edge-list: size inferred
        n = max((max(u, v) for u, v, _ in pairs), default=0)

    edges = set()
    for u, v, lineno in pairs:
        if u == v:
            raise GraphParseError(f"line {lineno}: self-loop at vertex {u}")
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphParseError(f"line {lineno}: vertex index out of range (n={n}): {u} {v}")
        edges.add((min(u, v) - 1, max(u, v) - 1))
    return Graph(n, sorted(edges))


def format_pace_gr(G: Graph) -> str:
    """Render a graph in PACE 2017 .gr format (1-indexed)."""
    lines = [f"p tw {G.n} {G.m}"]
    lines.extend(f"{u + 1} {v + 1}" for u, v in G.edges())
    return "\n".join(lines) + "\n"


def induced_subgraph(G: Graph, vertices: Iterable[int]) -> Graph:
    """Subgraph induced by `vertices`, relabeled 0..|S|-1 in sorted order.

    The result's `labels` maps back to G's vertex ids.
    """
    S = sorted(set(vertices))
    for v in S:
        if not (0 <= v < G.n):
            raise ValueError(f"vertex {v} out of range for n={G.n}")
    pos = {v: i for i, v in enumerate(S)}
    members = set(S)
    edges = [(pos[u], pos[v]) for u in S for v in G.adj[u] if v in members and u < v]
    return Graph(len(S), edges, labels=S)


def connected_components(G: Graph) -> list[tuple[int, ...]]:
    """Vertex sets of the connected components, each sorted, ordered by minimum."""
    seen = [False] * G.n
    out = []
    for s in range(G.n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for w in G.adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    stack.append(w)
        out.append(tuple(sorted(comp)))
    return out


def is_independent_set(G: Graph, vertices: Iterable[int]) -> bool:
    """True iff no edge of G has both endpoints in `vertices`."""
    S = set(vertices)
    for v in S:
        if not (0 <= v < G.n):
            raise ValueError(f"vertex {v} out of range for n={G.n}")
    return all(not (G.adj[v] & S) for v in S)


def gen_partial_ktree(n: int, k: int, keep_prob: float, seed: int):
    """Random partial k-tree with its width-k tree decomposition certificate.

    Builds a k-tree (every new vertex joined to a k-clique inside an existing
    bag), then deletes each edge independently with probability 1-keep_prob.
    The k-tree's decomposition (bags of size k+1) stays valid for the
    subgraph, so the returned width is certified <= k.
    """
    from .decomp import TreeDecomposition

    if not (1 <= k < n):
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    if not (0.0 <= keep_prob <= 1.0):
        raise ValueError(f"keep_prob must be in [0,1], got {keep_prob}")
    rng = random.Random(seed)

    base = list(range(k + 1))
    bags = [frozenset(base)]
    tree_edges = []
    edges = {(u, v) for i, u in enumerate(base) for v in base[i + 1:]}
    for v in range(k + 1, n):
        host = rng.randrange(len(bags))
        clique = sorted(bags[host])
        del clique[rng.randrange(len(clique))]
        bags.append(frozenset(clique + [v]))
        tree_edges.append((host, len(bags) - 1))
        edges.update((u, v) for u in clique)

    kept = sorted(e for e in edges if rng.random() < keep_prob)
    return Graph(n, kept), TreeDecomposition(tuple(bags), tuple(tree_edges))


def gen_interval_graph(n: int, k: int, keep_prob: float, seed: int):
    """Random interval-style graph with a certified width-k path decomposition.

    Walks a path of (k+1)-cliques: each bag drops one random member of the
    previous bag and introduces the next vertex. Edges inside bags are kept
    with probability keep_prob.
    """
    from .decomp import PathDecomposition

    if not (1 <= k < n):
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    if not (0.0 <= keep_prob <= 1.0):
        raise ValueError(f"keep_prob must be in [0,1], got {keep_prob}")
    rng = random.Random(seed)

    cur = list(range(k + 1))
    bags = [frozenset(cur)]
    edges = {(u, v) for i, u in enumerate(cur) for v in cur[i + 1:]}
    for v in range(k + 1, n):
        del cur[rng.randrange(len(cur))]
        cur.append(v)
        bags.append(frozenset(cur))
        edges.update((min(u, v), max(u, v)) for u in cur if u != v)

    kept = sorted(e for e in edges if rng.random() < keep_prob)
    return Graph(n, kept), PathDecomposition(tuple(bags))
