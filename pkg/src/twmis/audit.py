"""Structural audits for every lemma-level bound the pipeline relies on.

Each audit returns AuditCheck records (name, ok, detail); the CLI turns any
failure into a nonzero exit, and the acceptance suite asserts them across
the generated corpus.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .graphcore import Graph, connected_components, induced_subgraph
from .decomp import (PathDecomposition, TreeDecomposition, branch_bag_union,
                     chop_subtrees, contract_to_branch_td, make_leaf_unique,
                     make_nice, make_nice_path, path_decomp_minus_Q,
                     reduce_depth, validate_td, validate_pd)
from .pwapx import block_partition, level_partition, vertex_lengths
from .solvers import BlackBox
from .twapx import level_split_Q

DEPTH_CONSTANT = 4  # depth budget multiplier for reduce_depth: C*(1+log2 nodes)


@dataclass(frozen=True)
class AuditCheck:
    name: str
    ok: bool
    detail: str = ""


def _check(name: str, ok: bool, detail: str = "") -> AuditCheck:
    return AuditCheck(name, bool(ok), "" if ok else detail)


def audit_transform_chain(G: Graph, T: TreeDecomposition):
    """make_nice -> make_leaf_unique -> reduce_depth bound checks.

    Returns (checks, nice, leaf_unique).
    """
    checks = []
    w = T.width
    nice = make_nice(T, G)
    rep = validate_td(G, nice)
    checks.append(_check("make_nice_valid", rep.ok, "; ".join(rep.failures)))
    checks.append(_check("make_nice_node_bound", nice.n_nodes <= 4 * G.n,
                         f"{nice.n_nodes} nodes > 4n = {4 * G.n}"))
    checks.append(_check("make_nice_width", nice.width == w,
                         f"width changed {w} -> {nice.width}"))

    unique = make_leaf_unique(nice, G)
    rep = validate_td(G, unique)
    checks.append(_check("leaf_unique_valid", rep.ok, "; ".join(rep.failures)))
    checks.append(_check("leaf_unique_node_bound", unique.n_nodes <= 4 * G.n,
                         f"{unique.n_nodes} nodes > 4n = {4 * G.n}"))
    checks.append(_check("leaf_unique_width", unique.width <= w,
                         f"width grew {w} -> {unique.width}"))
    counts: dict[int, int] = {}
    for bag in unique.bags:
        for v in bag:
            counts[v] = counts.get(v, 0) + 1
    bad = [t for t in unique.leaf_nodes()
           if not any(counts[v] == 1 for v in unique.bags[t])]
    checks.append(_check("leaf_unique_property", not bad,
                         f"leaves without a unique vertex: {bad}"))

    balanced = reduce_depth(nice, G)
    rep = validate_td(G, balanced)
    checks.append(_check("reduce_depth_valid", rep.ok, "; ".join(rep.failures)))
    checks.append(_check("reduce_depth_width", balanced.width <= 3 * nice.width + 2,
                         f"width {balanced.width} > 3*{nice.width}+2"))
    budget = DEPTH_CONSTANT * (1 + math.log2(max(1, nice.n_nodes)))
    checks.append(_check("reduce_depth_depth", balanced.depth() <= budget,
                         f"depth {balanced.depth()} > {budget:.1f}"))
    return checks, nice, unique


def audit_level_blocks(G: Graph, P: PathDecomposition, f) -> list[AuditCheck]:
    """Length-level partition and block bounds for one path-decomposed graph."""
    checks = []
    rep = validate_pd(G, P)
    checks.append(_check("path_input_valid", rep.ok, "; ".join(rep.failures)))
    if not rep.ok or G.n == 0:
        return checks
    nice = make_nice_path(P, G)
    checks.append(_check("nice_path_bag_count", nice.n_bags == 2 * G.n,
                         f"{nice.n_bags} bags != 2n = {2 * G.n}"))
    checks.append(_check("nice_path_width", nice.width <= P.width,
                         f"width grew {P.width} -> {nice.width}"))
    rep = validate_pd(G, nice)
    checks.append(_check("nice_path_valid", rep.ok, "; ".join(rep.failures)))

    lengths = vertex_lengths(G, nice)
    lp = level_partition(G, nice, f)
    covered = sorted(v for level in lp.levels for v in level) + list(lp.long_vertices)
    checks.append(_check("level_partition_exact", sorted(covered) == list(range(G.n)),
                         "levels + long set do not partition V(G)"))
    long_bound = G.n / (2 * lp.f_k)
    checks.append(_check("long_set_bound", len(lp.long_vertices) <= long_bound,
                         f"|V'| = {len(lp.long_vertices)} > n/(2f(k)) = {long_bound:.2f}"))

    for i, level in enumerate(lp.levels):
        if not level:
            continue
        blocks = block_partition(level, nice, lengths, lp.k)
        sizes_x = [len(b) for b in blocks.x_blocks]
        sizes_y = [len(b) for b in blocks.y_blocks]
        checks.append(_check(f"x_block_size_level_{i}", max(sizes_x, default=0) <= lp.k,
                             f"an X block exceeds k = {lp.k}"))
        checks.append(_check(f"y_block_size_level_{i}", max(sizes_y, default=0) <= 4 * lp.k,
                             f"a Y block exceeds 4k = {4 * lp.k}"))
        all_blocks = [v for b in blocks.x_blocks + blocks.y_blocks for v in b]
        checks.append(_check(f"block_partition_exact_level_{i}",
                             sorted(all_blocks) == sorted(level),
                             "X/Y blocks do not partition the level"))
        for tag, group in (("x", blocks.x_blocks), ("y", blocks.y_blocks)):
            seen: dict[int, int] = {}
            for r, block in enumerate(group):
                for v in block:
                    seen[v] = r
            cross = [(u, v) for u in seen for v in G.adj[u]
                     if v in seen and seen[u] != seen[v]]
            checks.append(_check(f"no_cross_{tag}_edges_level_{i}", not cross,
                                 f"cross-block edges: {cross[:3]}"))
    return checks


def audit_chop(G: Graph, unique: TreeDecomposition, ell: int):
    """Chop bounds: |X|, per-part leaves, exact partition, zero cross edges.

    Returns (checks, X, parts).
    """
    checks = []
    k = unique.max_bag_size
    leaves_in = len(unique.leaf_nodes())
    X, parts = chop_subtrees(G, unique, ell)
    checks.append(_check("chop_x_bound", len(X) <= k * leaves_in / ell,
                         f"|X| = {len(X)} > k|L|/ell = {k * leaves_in / ell:.2f}"))
    part_vertices: list[int] = list(X)
    for part_graph, part_td in parts:
        part_vertices.extend(part_graph.labels)
        rep = validate_td(part_graph, part_td)
        checks.append(_check("chop_part_valid", rep.ok, "; ".join(rep.failures)))
        checks.append(_check("chop_part_leaves", len(part_td.leaf_nodes()) <= ell,
                             f"part has {len(part_td.leaf_nodes())} leaves > ell = {ell}"))
        checks.append(_check("chop_part_width", part_td.max_bag_size <= k,
                             f"part bag {part_td.max_bag_size} > input bag {k}"))
    checks.append(_check("chop_partition_exact",
                         sorted(part_vertices) == list(range(G.n)),
                         "X + part vertex sets do not partition V(G)"))
    owner: dict[int, int] = {}
    for idx, (part_graph, _) in enumerate(parts):
        for v in part_graph.labels:
            owner[v] = idx
    cross = [(u, v) for u in owner for v in G.adj[u]
             if v in owner and owner[u] != owner[v]]
    checks.append(_check("chop_no_cross_edges", not cross,
                         f"edges between parts: {cross[:3]}"))
    return checks, X, parts


def audit_part_branches(C: Graph, TC: TreeDecomposition, k: int, ell: int, f) -> list[AuditCheck]:
    """Branch-structure bounds of one chopped part, global bag-size budget k."""
    checks = []
    deg = TC.node_degrees()
    undirected_leaves = sum(1 for d in deg if d <= 1)
    branch_count = sum(1 for d in deg if d >= 3)
    checks.append(_check("branch_count_bound", branch_count <= max(0, ell - 1),
                         f"{branch_count} branch nodes > ell-1 = {ell - 1} "
                         f"({undirected_leaves} undirected leaves)"))

    Q = branch_bag_union(TC)
    qset = set(Q)
    rest = [v for v in range(C.n) if v not in qset]
    pd = path_decomp_minus_Q(TC, Q, C)
    cmq = induced_subgraph(C, rest)
    rep = validate_pd(cmq, pd)
    checks.append(_check("c_minus_q_path_valid", rep.ok, "; ".join(rep.failures)))
    checks.append(_check("c_minus_q_path_width", pd.max_bag_size <= k,
                         f"C-Q path bag {pd.max_bag_size} > k = {k}"))
    if cmq.n:
        checks.extend(audit_level_blocks(cmq, pd, f))

    if Q:
        cq = induced_subgraph(C, Q)
        tq = contract_to_branch_td(TC, Q, C)
        rep = validate_td(cq, tq)
        checks.append(_check("cq_td_valid", rep.ok, "; ".join(rep.failures)))
        checks.append(_check("cq_td_nodes", tq.n_nodes <= 2 * max(1, branch_count),
                             f"{tq.n_nodes} nodes > 2*branch = {2 * branch_count}"))
        checks.append(_check("cq_td_width", tq.max_bag_size <= 2 * k,
                             f"C[Q] bag {tq.max_bag_size} > 2k = {2 * k}"))
        balanced = reduce_depth(tq, cq)
        rep = validate_td(cq, balanced)
        checks.append(_check("cq_balanced_valid", rep.ok, "; ".join(rep.failures)))
        checks.append(_check("cq_balanced_width", balanced.max_bag_size <= 6 * k,
                             f"rebalanced bag {balanced.max_bag_size} > 6k = {6 * k}"))
        layers = level_split_Q(balanced, k)
        flat = sorted(v for layer in layers for v in layer)
        checks.append(_check("layers_partition_q", flat == list(range(cq.n)),
                             "layers do not partition C[Q]"))
        big = 0
        for layer in layers:
            if not layer:
                continue
            lg = induced_subgraph(cq, layer)
            big = max([big] + [len(c) for c in connected_components(lg)])
        checks.append(_check("layer_component_size", big <= 6 * k,
                             f"layer component of {big} vertices > 6k = {6 * k}"))
    return checks


def run_audits(G: Graph, T: TreeDecomposition, box: BlackBox) -> list[AuditCheck]:
    """Every structural audit for one instance, end to end."""
    checks, nice, unique = audit_transform_chain(G, T)
    k = T.max_bag_size
    ell = 2 * box.f(k)
    chop_checks, X, parts = audit_chop(G, unique, ell)
    checks.extend(chop_checks)
    for part_graph, part_td in parts:
        checks.extend(audit_part_branches(part_graph, part_td, k, ell, box.f))
    return checks
