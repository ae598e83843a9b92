"""Exact independent-set oracles and pluggable approximators.

A BlackBox bundles a solve procedure with its declared ratio function f,
clamped to 2 <= f(n) <= n so the level arithmetic downstream never
degenerates. box_exact wraps the branch-and-bound oracle (f(n) = n);
box_clique_removal is a polynomial Ramsey-style approximator with a
declared f(n) = max(2, floor(log2 n)).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .graphcore import Graph, is_independent_set
from .decomp import InvalidDecompositionError, TreeDecomposition, nice_kinds, validate_td


class BudgetExceededError(RuntimeError):
    """The solver refuses the instance (too many vertices / too wide)."""


@dataclass(frozen=True)
class IndependentSetResult:
    """A solution plus the pipeline branch that produced it."""

    vertices: tuple[int, ...]
    provenance: str

    @property
    def size(self) -> int:
        return len(self.vertices)

    def relabeled(self, mapping) -> "IndependentSetResult":
        return IndependentSetResult(tuple(sorted(mapping[v] for v in self.vertices)),
                                    self.provenance)


def clamp_ratio(raw: Callable[[int], int], n: int) -> int:
    """Evaluate a ratio function with the 2 <= f(n) <= n clamp applied."""
    return max(2, min(int(raw(n)), max(n, 2)))


@dataclass(frozen=True)
class BlackBox:
    """An assumed n/f(n)-approximation algorithm, passed around explicitly."""

    name: str
    solve: Callable[[Graph], tuple[int, ...]]
    ratio_fn: Callable[[int], int]

    def f(self, n: int) -> int:
        return clamp_ratio(self.ratio_fn, n)

    def run(self, G: Graph, provenance: str = "black-box") -> IndependentSetResult:
        out = tuple(sorted(self.solve(G)))
        assert is_independent_set(G, out)
        return IndependentSetResult(out, provenance)


# ---------------------------------------------------------------------------
# Exact solvers.
# ---------------------------------------------------------------------------

def exact_mis_bruteforce(G: Graph, budget: int = 30) -> IndependentSetResult:
    """Maximum independent set by branch and bound on bitmasks.

    Branches in/out on the highest-degree vertex of the residual graph,
    takes degree-<=1 vertices greedily, and prunes with the residual count.
    Refuses graphs with more than `budget` vertices.
    """
    n = G.n
    if n > budget:
        raise BudgetExceededError(f"brute force refused: n={n} exceeds budget {budget}")
    if n == 0:
        return IndependentSetResult((), "exact")

    adj = [0] * n
    for u in range(n):
        for v in G.adj[u]:
            adj[u] |= 1 << v

    start = greedy_degeneracy(G)
    best_size = start.size
    best = list(start.vertices)
    chosen: list[int] = []

    def search(active: int, size: int) -> None:
        nonlocal best_size, best
        cnt = active.bit_count()
        if size + cnt <= best_size:
            return
        if cnt == 0:
            best_size, best = size, chosen.copy()
            return
        # pick max residual degree; sweep low-degree vertices directly
        pick, pick_deg = -1, -1
        rest = active
        while rest:
            v = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            d = (adj[v] & active).bit_count()
            if d > pick_deg:
                pick, pick_deg = v, d
        if pick_deg <= 1:
            # residual graph is a matching plus isolated vertices
            taken = []
            rest = active
            while rest:
                v = (rest & -rest).bit_length() - 1
                rest &= rest - 1
                if adj[v] & active & ((1 << v) - 1):
                    continue  # lower-id matched partner already taken
                taken.append(v)
            if size + len(taken) > best_size:
                best_size, best = size + len(taken), chosen + taken
            return
        v = pick
        chosen.append(v)
        search(active & ~(adj[v] | (1 << v)), size + 1)
        chosen.pop()
        search(active & ~(1 << v), size)

    search((1 << n) - 1, 0)
    out = IndependentSetResult(tuple(sorted(best)), "exact")
    assert is_independent_set(G, out.vertices)
    return out


def exact_mis_td_dp(G: Graph, T: TreeDecomposition, width_budget: int = 20) -> IndependentSetResult:
    """Maximum independent set by subset DP over a nice tree decomposition."""
    validate_td(G, T).raise_if_failed()
    kinds = T.kinds if T.kinds is not None else nice_kinds(T)
    if set(kinds) - {"leaf", "introduce", "forget", "join"}:
        raise InvalidDecompositionError(f"tree DP needs strict niceness, got kinds {sorted(set(kinds))}")
    if T.max_bag_size > width_budget:
        raise BudgetExceededError(
            f"tree DP refused: max bag {T.max_bag_size} exceeds budget {width_budget}")

    parent, children = T.rooted()
    post: list[int] = []
    stack = [(T.root, False)]
    while stack:
        t, expanded = stack.pop()
        if expanded:
            post.append(t)
            continue
        stack.append((t, True))
        for c in children[t]:
            stack.append((c, False))

    def independent_subsets(bag: tuple[int, ...]):
        m = len(bag)
        conflicts = [0] * m
        for i in range(m):
            for j in range(i + 1, m):
                if bag[j] in G.adj[bag[i]]:
                    conflicts[i] |= 1 << j
                    conflicts[j] |= 1 << i
        for mask in range(1 << m):
            ok = True
            mm = mask
            while mm:
                i = (mm & -mm).bit_length() - 1
                mm &= mm - 1
                if conflicts[i] & mask:
                    ok = False
                    break
            if ok:
                yield frozenset(bag[i] for i in range(m) if mask >> i & 1)

    # tables[t]: independent S subset of B_t -> (size, realizing vertex set)
    tables: dict[int, dict[frozenset[int], tuple[int, frozenset[int]]]] = {}
    for t in post:
        bag = tuple(sorted(T.bags[t]))
        kind = kinds[t]
        if kind == "leaf":
            tables[t] = {S: (len(S), S) for S in independent_subsets(bag)}
        elif kind == "introduce":
            c = children[t][0]
            (v,) = T.bags[t] - T.bags[c]
            tbl = {}
            for S in independent_subsets(bag):
                if v in S:
                    base = S - {v}
                    if G.adj[v] & base:
                        continue
                    size, full = tables[c][base]
                    tbl[S] = (size + 1, full | {v})
                else:
                    tbl[S] = tables[c][S]
            tables[t] = tbl
        elif kind == "forget":
            c = children[t][0]
            (v,) = T.bags[c] - T.bags[t]
            tbl = {}
            for S, val in tables[c].items():
                key = S - {v}
                if key not in tbl or val[0] > tbl[key][0]:
                    tbl[key] = val
            tables[t] = tbl
        else:  # join
            c1, c2 = children[t]
            tbl = {}
            for S, (s1, f1) in tables[c1].items():
                s2, f2 = tables[c2][S]
                tbl[S] = (s1 + s2 - len(S), f1 | f2)
            tables[t] = tbl
        for c in children[t]:
            del tables[c]

    _, full = max(tables[T.root].values(), key=lambda v: v[0])
    out = IndependentSetResult(tuple(sorted(full)), "exact")
    assert is_independent_set(G, out.vertices)
    return out


def greedy_degeneracy(G: Graph) -> IndependentSetResult:
    """Repeatedly take a minimum-degree vertex and delete its neighborhood.

    Returns at least n/(tw(G)+1) vertices; ties break to the lowest id.
    """
    deg = [len(G.adj[v]) for v in range(G.n)]
    alive = set(range(G.n))
    out = []
    while alive:
        v = min(alive, key=lambda x: (deg[x], x))
        out.append(v)
        drop = (G.adj[v] & alive) | {v}
        for u in drop:
            alive.discard(u)
            for w in G.adj[u]:
                deg[w] -= 1
    res = IndependentSetResult(tuple(sorted(out)), "greedy")
    assert is_independent_set(G, res.vertices)
    return res


# ---------------------------------------------------------------------------
# Black-box instantiations.
# ---------------------------------------------------------------------------

def box_exact(budget: int = 30) -> BlackBox:
    """Exact oracle as a black box: f(n) = n, refuses graphs over `budget`."""
    def solve(G: Graph) -> tuple[int, ...]:
        return exact_mis_bruteforce(G, budget=budget).vertices

    return BlackBox(name=f"exact:{budget}", solve=solve, ratio_fn=lambda n: n)


def _ramsey(adj: list[frozenset[int]], active: frozenset[int]):
    """Clique and independent set, each nonempty on nonempty input."""
    if not active:
        return frozenset(), frozenset()
    v = min(active, key=lambda x: (-len(adj[x] & active), x))
    nbrs = adj[v] & active
    rest = active - nbrs - {v}
    c1, i1 = _ramsey(adj, nbrs)
    c2, i2 = _ramsey(adj, rest)
    clique = c1 | {v} if len(c1) + 1 >= len(c2) else c2
    indep = i2 | {v} if len(i2) + 1 >= len(i1) else i1
    return clique, indep


def box_clique_removal() -> BlackBox:
    """Ramsey-based clique removal; declared ratio n / max(2, floor(log2 n)).

    Always outputs an independent set; the declared guarantee is audited
    statistically against the exact oracle on small instances.
    """
    def solve(G: Graph) -> tuple[int, ...]:
        active = frozenset(range(G.n))
        best: frozenset[int] = frozenset()
        while active:
            clique, indep = _ramsey(G.adj, active)
            if len(indep) > len(best):
                best = indep
            active -= clique
        assert is_independent_set(G, best)
        return tuple(sorted(best))

    return BlackBox(name="clique-removal", solve=solve,
                    ratio_fn=lambda n: max(2, n.bit_length() - 1))
