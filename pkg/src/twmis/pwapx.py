"""Pathwidth-parameterized approximation: vertices are leveled by how many
bags of a nice path decomposition contain them, each level is cut into
small blocks solvable by the black box, and the best per-level candidate is
returned alongside the greedy fallback.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .graphcore import Graph, induced_subgraph, is_independent_set
from .decomp import PathDecomposition, make_nice_path
from .solvers import BlackBox, IndependentSetResult, clamp_ratio, greedy_degeneracy


@dataclass(frozen=True)
class LevelPartition:
    """Levels V_0..V_m by vertex length, plus the long-vertex set V'.

    With c = ceil(log2 f(k)), level 0 holds lengths below 2k, level i in
    [1, c+1] holds lengths in [k*2^i, k*2^(i+1)), and the long set holds
    lengths >= 4k*2^c; the top level boundary meets the long threshold
    exactly, so the pieces partition V(G).
    """

    levels: tuple[tuple[int, ...], ...]
    long_vertices: tuple[int, ...]
    lengths: tuple[int, ...]
    k: int
    f_k: int

    @property
    def level_count(self) -> int:
        return len(self.levels)

    def level_max_length(self, i: int) -> int:
        """Max length L within level i; 1 for an empty level."""
        return max((self.lengths[v] for v in self.levels[i]), default=1)


@dataclass(frozen=True)
class BlockPartition:
    """One level's X-blocks (vertices of the sampled bags B_{2Lr}) and
    Y-blocks (vertices confined to the gaps between sampled bags)."""

    x_blocks: tuple[tuple[int, ...], ...]
    y_blocks: tuple[tuple[int, ...], ...]
    L: int


def vertex_lengths(G: Graph, P: PathDecomposition) -> tuple[int, ...]:
    """Number of bags containing each vertex; P must be nice with 2n bags."""
    if not P.is_nice or P.n_bags != 2 * G.n:
        raise ValueError(f"need a nice path decomposition with {2 * G.n} bags, got {P.n_bags}")
    counts = [0] * G.n
    for bag in P.bags:
        for v in bag:
            counts[v] += 1
    assert sum(counts) <= 2 * G.n * max(1, P.max_bag_size)
    return tuple(counts)


def level_partition(G: Graph, P: PathDecomposition, f: Callable[[int], int]) -> LevelPartition:
    """Partition V(G) into length levels V_0..V_m and the long set V'."""
    lengths = vertex_lengths(G, P)
    k = max(1, P.max_bag_size)
    f_k = clamp_ratio(f, k)
    c = math.ceil(math.log2(f_k))
    m = c + 1
    long_floor = 4 * k * (1 << c)  # == k * 2^(m+1)

    levels: list[list[int]] = [[] for _ in range(m + 1)]
    long_vs: list[int] = []
    for v in range(G.n):
        ell = lengths[v]
        if ell < 2 * k:
            levels[0].append(v)
        elif ell >= long_floor:
            long_vs.append(v)
        else:
            i = ell // k
            levels[i.bit_length() - 1].append(v)
    lp = LevelPartition(tuple(tuple(lv) for lv in levels), tuple(long_vs), lengths, k, f_k)
    assert sum(len(lv) for lv in lp.levels) + len(lp.long_vertices) == G.n
    return lp


def block_partition(level: tuple[int, ...], P: PathDecomposition,
                    lengths: tuple[int, ...], k: int) -> BlockPartition:
    """Cut one level into X_r = B_{2Lr} (sampled bags) and Y_r (gap) blocks.

    L is the maximum length within the level (1 when empty); bags are
    1-indexed B_1..B_2n. Every block has at most 4k vertices and no edge
    joins two X-blocks or two Y-blocks.
    """
    two_n = P.n_bags
    members = set(level)
    L = max((lengths[v] for v in level), default=1)

    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for idx, bag in enumerate(P.bags, start=1):
        for v in bag:
            if v in members:
                first.setdefault(v, idx)
                last[v] = idx

    p = two_n // (2 * L)
    q = -(-two_n // (2 * L))
    x_blocks = [[] for _ in range(p)]
    y_blocks = [[] for _ in range(q)]
    for v in sorted(members):
        s, e = first[v], last[v]
        r_lo = -(-s // (2 * L))  # first r with 2Lr >= s; at most one multiple fits
        if r_lo <= p and 2 * L * r_lo <= e:
            x_blocks[r_lo - 1].append(v)
        else:
            r = (s - 1) // (2 * L) + 1  # gap: interval inside [2L(r-1)+1, 2Lr-1]
            assert 2 * L * (r - 1) + 1 <= s and e <= 2 * L * r - 1
            y_blocks[r - 1].append(v)

    return BlockPartition(tuple(tuple(b) for b in x_blocks),
                          tuple(tuple(b) for b in y_blocks), L)


def approx_level(G: Graph, level: tuple[int, ...], blocks: BlockPartition,
                 box: BlackBox, level_index: int = 0) -> IndependentSetResult:
    """Solve every block with the box; return the larger of the X and Y unions."""
    def union_solve(block_list) -> list[int]:
        out: list[int] = []
        for block in block_list:
            if not block:
                continue
            sub = induced_subgraph(G, block)
            out.extend(sub.to_parent(box.solve(sub)))
        return out

    x_star = union_solve(blocks.x_blocks)
    y_star = union_solve(blocks.y_blocks)
    winner = x_star if len(x_star) >= len(y_star) else y_star
    res = IndependentSetResult(tuple(sorted(winner)), f"pw-level-{level_index}")
    assert is_independent_set(G, res.vertices)
    return res


def approx_pw(G: Graph, P: PathDecomposition, box: BlackBox) -> IndependentSetResult:
    """Best of the greedy candidate and one candidate per length level.

    The output is always at least n/(pw+1) vertices via the greedy candidate;
    the long-vertex set is never solved (it is dominated by the levels).
    """
    if G.n == 0:
        return IndependentSetResult((), "greedy")
    nice = make_nice_path(P, G)
    lengths = vertex_lengths(G, nice)
    lp = level_partition(G, nice, box.f)

    candidates = [greedy_degeneracy(G)]
    for i, level in enumerate(lp.levels):
        if not level:
            continue
        blocks = block_partition(level, nice, lengths, lp.k)
        candidates.append(approx_level(G, level, blocks, box, level_index=i))

    best = max(candidates, key=lambda r: r.size)
    assert is_independent_set(G, best.vertices)
    assert best.size * (P.width + 1) >= G.n
    return best
