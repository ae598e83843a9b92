"""Treewidth-parameterized approximation pipeline.

Candidates: the degeneracy greedy, one unique vertex per leaf bag, and the
union over chopped components of a two-branch solve (pathwidth branch on
C - Q, low-depth branch on C[Q]). The maximum candidate is returned with a
trace of what every stage produced.
"""
from __future__ import annotations

from dataclasses import dataclass

from .graphcore import Graph, connected_components, induced_subgraph, is_independent_set
from .decomp import (TreeDecomposition, branch_bag_union, chop_subtrees,
                     contract_to_branch_td, make_leaf_unique, make_nice,
                     path_decomp_minus_Q, reduce_depth, validate_td)
from .pwapx import approx_pw
from .solvers import BlackBox, IndependentSetResult, greedy_degeneracy


@dataclass(frozen=True)
class ComponentRecord:
    """What the two branches produced on one chopped component."""

    n: int
    leaf_count: int
    q_size: int
    path_branch_size: int
    q_branch_size: int | None
    chosen: str  # "path" or "branch"


@dataclass(frozen=True)
class PipelineTrace:
    ell: int
    x_size: int
    components: tuple[ComponentRecord, ...]
    candidates: tuple[tuple[str, int], ...]
    final_size: int


def leaf_unique_candidate(G: Graph, T: TreeDecomposition) -> IndependentSetResult:
    """One exclusively-owned vertex per leaf bag; independent by construction.

    Requires a leaf-unique decomposition (post make_leaf_unique): two such
    vertices from different leaves never share a bag, hence never an edge.
    """
    counts: dict[int, int] = {}
    for bag in T.bags:
        for v in bag:
            counts[v] = counts.get(v, 0) + 1
    picks = []
    for t in T.leaf_nodes():
        unique = sorted(v for v in T.bags[t] if counts[v] == 1)
        if not unique:
            raise ValueError(f"leaf node {t} has no vertex of its own; "
                             "run make_leaf_unique first")
        picks.append(unique[0])
    res = IndependentSetResult(tuple(sorted(picks)), "leaf-set")
    assert is_independent_set(G, res.vertices)
    return res


def level_split_Q(TQ: TreeDecomposition, k: int) -> list[tuple[int, ...]]:
    """Partition the decomposed vertices into layers by the root distance of
    each vertex's highest bag.

    Every connected component within one layer sits inside a single bag, so
    components have at most 6k vertices once TQ went through reduce_depth.
    """
    parent, children = TQ.rooted()
    dist = [0] * TQ.n_nodes
    order = [TQ.root]
    stack = [TQ.root]
    while stack:
        t = stack.pop()
        for c in children[t]:
            dist[c] = dist[t] + 1
            order.append(c)
            stack.append(c)

    highest: dict[int, int] = {}
    for t in order:  # preorder: parents before children
        for v in TQ.bags[t]:
            if v not in highest:
                highest[v] = dist[t]
    depth = max(dist) if dist else 0
    layers: list[list[int]] = [[] for _ in range(depth + 1)]
    for v, d in sorted(highest.items()):
        layers[d].append(v)
    return [tuple(layer) for layer in layers]


def approx_component(C: Graph, TC: TreeDecomposition, box: BlackBox):
    """Two-branch solve of one chopped component; returns (result, record).

    Path branch: drop the branch-node vertices Q and run the pathwidth
    pipeline on C - Q. Q branch (when Q is nonempty): contract to the branch
    structure, rebalance to logarithmic depth, split into layers by highest
    bag, and solve every connected component of every layer with the box,
    keeping the best single layer. The larger branch wins.
    """
    k = TC.max_bag_size
    Q = branch_bag_union(TC)
    qset = set(Q)

    rest = [v for v in range(C.n) if v not in qset]
    path_pd = path_decomp_minus_Q(TC, Q, C)
    if rest:
        c_minus_q = induced_subgraph(C, rest)
        path_res = approx_pw(c_minus_q, path_pd, box)
        path_vertices = c_minus_q.to_parent(path_res.vertices)
        path_prov = path_res.provenance
    else:
        path_vertices, path_prov = (), "pw-level-0"

    q_vertices: tuple[int, ...] | None = None
    q_prov = ""
    if Q:
        cq = induced_subgraph(C, Q)
        tq = contract_to_branch_td(TC, Q, C)
        balanced = reduce_depth(tq, cq)
        layers = level_split_Q(balanced, k)
        best_layer: list[int] = []
        best_idx = 0
        for i, layer in enumerate(layers):
            if not layer:
                continue
            layer_graph = induced_subgraph(cq, layer)
            picked: list[int] = []
            for comp in connected_components(layer_graph):
                assert len(comp) <= 6 * k
                comp_graph = induced_subgraph(layer_graph, comp)
                picked.extend(comp_graph.to_parent(box.solve(comp_graph)))
            if len(picked) > len(best_layer):
                best_layer = [layer_graph.labels[v] for v in picked]
                best_idx = i
        q_vertices = tuple(sorted(cq.to_parent(best_layer)))
        q_prov = f"Q-level-{best_idx}"

    if q_vertices is not None and len(q_vertices) > len(path_vertices):
        res = IndependentSetResult(q_vertices, q_prov)
        chosen = "branch"
    else:
        res = IndependentSetResult(tuple(sorted(path_vertices)), path_prov)
        chosen = "path"
    assert is_independent_set(C, res.vertices)

    record = ComponentRecord(
        n=C.n,
        leaf_count=len(TC.leaf_nodes()),
        q_size=len(Q),
        path_branch_size=len(path_vertices),
        q_branch_size=None if q_vertices is None else len(q_vertices),
        chosen=chosen,
    )
    return res, record


def approx_tw(G: Graph, T: TreeDecomposition, box: BlackBox):
    """Full pipeline; returns (result, trace).

    The final size is the maximum over the greedy, leaf-set, and chop-union
    candidates, so it is always at least ceil(n/(w+1)) for input width w.
    """
    validate_td(G, T).raise_if_failed()

    nice = make_nice(T, G)
    unique = make_leaf_unique(nice, G)
    k = T.max_bag_size
    ell = 2 * box.f(k)

    candidates = [greedy_degeneracy(G), leaf_unique_candidate(G, unique)]

    X, parts = chop_subtrees(G, unique, ell)
    union: list[int] = []
    records = []
    for part_graph, part_td in parts:
        res, record = approx_component(part_graph, part_td, box)
        union.extend(part_graph.to_parent(res.vertices))
        records.append(record)
    candidates.append(IndependentSetResult(tuple(sorted(union)), "chop-union"))

    best = max(candidates, key=lambda r: r.size)
    assert is_independent_set(G, best.vertices)
    assert best.size * (T.width + 1) >= G.n

    trace = PipelineTrace(
        ell=ell,
        x_size=len(X),
        components=tuple(records),
        candidates=tuple((r.provenance, r.size) for r in candidates),
        final_size=best.size,
    )
    return best, trace
