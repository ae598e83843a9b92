"""Tree and path decompositions: validation, niceness, and the transforms
used by the approximation pipeline (leaf-unique repair, depth reduction,
subtree chopping, branch-node contraction).

A decomposition's bag contents always use the vertex ids of the graph it
decomposes; functions that produce a decomposition of an induced subgraph
relabel bags to that subgraph's local ids (position in the sorted vertex
set, matching graphcore.induced_subgraph).
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable

from .graphcore import Graph, GraphParseError, induced_subgraph, connected_components


class InvalidDecompositionError(ValueError):
    """Input decomposition violates a precondition (invalid, not nice, ...)."""


NICE_KINDS = ("leaf", "introduce", "forget", "join", "plain")


@dataclass(frozen=True)
class TreeDecomposition:
    """Tree of bags. `kinds` is set for nice decompositions (per-node tag)."""

    bags: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...]
    root: int | None = None
    kinds: tuple[str, ...] | None = None

    def __post_init__(self):
        n = len(self.bags)
        for u, v in self.edges:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise ValueError(f"bad tree edge ({u},{v}) for {n} nodes")
        if self.root is not None and not (0 <= self.root < n):
            raise ValueError(f"root {self.root} out of range")
        if self.kinds is not None and len(self.kinds) != n:
            raise ValueError("kinds length must equal node count")

    @property
    def n_nodes(self) -> int:
        return len(self.bags)

    @property
    def max_bag_size(self) -> int:
        return max((len(b) for b in self.bags), default=0)

    @property
    def width(self) -> int:
        return self.max_bag_size - 1

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n_nodes)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def node_degrees(self) -> list[int]:
        return [len(s) for s in self.adjacency()]

    def rooted(self) -> tuple[list[int | None], list[list[int]]]:
        """(parent, children) arrays from the root; children sorted by id."""
        if self.root is None:
            raise InvalidDecompositionError("decomposition is not rooted")
        adj = self.adjacency()
        parent: list[int | None] = [None] * self.n_nodes
        children: list[list[int]] = [[] for _ in range(self.n_nodes)]
        seen = {self.root}
        queue = deque([self.root])
        while queue:
            t = queue.popleft()
            for u in sorted(adj[t]):
                if u not in seen:
                    seen.add(u)
                    parent[u] = t
                    children[t].append(u)
                    queue.append(u)
        if len(seen) != self.n_nodes:
            raise InvalidDecompositionError("tree is not connected from the root")
        return parent, children

    def leaf_nodes(self) -> list[int]:
        """Childless nodes of the rooted tree (a single node counts as a leaf)."""
        _, children = self.rooted()
        return [t for t in range(self.n_nodes) if not children[t]]

    def depth(self) -> int:
        if self.root is None:
            raise InvalidDecompositionError("decomposition is not rooted")
        _, children = self.rooted()
        dist = [0] * self.n_nodes
        best = 0
        stack = [self.root]
        while stack:
            t = stack.pop()
            for c in children[t]:
                dist[c] = dist[t] + 1
                best = max(best, dist[c])
                stack.append(c)
        return best


@dataclass(frozen=True)
class PathDecomposition:
    """Ordered bag sequence B_1..B_m."""

    bags: tuple[frozenset[int], ...]

    @property
    def n_bags(self) -> int:
        return len(self.bags)

    @property
    def max_bag_size(self) -> int:
        return max((len(b) for b in self.bags), default=0)

    @property
    def width(self) -> int:
        return self.max_bag_size - 1

    @property
    def is_nice(self) -> bool:
        """Consecutive bags differ by exactly one vertex, starting from a
        singleton (a virtual empty bag precedes the sequence)."""
        if not self.bags:
            return True
        if len(self.bags[0]) != 1:
            return False
        return all(len(a ^ b) == 1 for a, b in zip(self.bags, self.bags[1:]))

    def as_tree(self) -> TreeDecomposition:
        edges = tuple((i, i + 1) for i in range(len(self.bags) - 1))
        return TreeDecomposition(self.bags, edges, root=0 if self.bags else None)


@dataclass(frozen=True)
class ValidationReport:
    """Per-property pass/fail with a concrete witness on failure."""

    width: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    def raise_if_failed(self, what: str = "decomposition") -> None:
        if self.failures:
            raise InvalidDecompositionError(f"invalid {what}: " + "; ".join(self.failures))


def validate_td(G: Graph, T: TreeDecomposition) -> ValidationReport:
    """Check tree shape plus the three decomposition properties."""
    failures = []
    N = T.n_nodes
    if N == 0:
        return ValidationReport(width=-1, failures=("empty decomposition (no nodes)",))

    adj = T.adjacency()
    if len(set(T.edges)) != N - 1 or len(T.edges) != N - 1:
        failures.append(f"tree structure: expected {N - 1} distinct edges, got {len(T.edges)}")
    else:
        seen = {0}
        queue = deque([0])
        while queue:
            t = queue.popleft()
            for u in adj[t]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        if len(seen) != N:
            failures.append("tree structure: decomposition tree is disconnected")

    occ: dict[int, list[int]] = {}
    for t, bag in enumerate(T.bags):
        for v in bag:
            if not (0 <= v < G.n):
                failures.append(f"bag {t} contains out-of-range vertex {v}")
                continue
            occ.setdefault(v, []).append(t)

    for v in range(G.n):
        if v not in occ:
            failures.append(f"property 1 violated: vertex {v} appears in no bag")
            break

    for u, v in G.edges():
        if u in occ and v in occ and not (set(occ[u]) & set(occ[v])):
            failures.append(f"property 2 violated: edge ({u},{v}) is covered by no bag")
            break

    for v in sorted(occ):
        nodes = set(occ[v])
        start = next(iter(nodes))
        seen = {start}
        queue = deque([start])
        while queue:
            t = queue.popleft()
            for u in adj[t]:
                if u in nodes and u not in seen:
                    seen.add(u)
                    queue.append(u)
        if seen != nodes:
            failures.append(f"property 3 violated: occurrence nodes of vertex {v} are disconnected")
            break

    return ValidationReport(width=T.width, failures=tuple(failures))


def validate_pd(G: Graph, P: PathDecomposition) -> ValidationReport:
    if not P.bags:
        if G.n == 0:
            return ValidationReport(width=-1, failures=())
        return ValidationReport(width=-1, failures=(f"empty path decomposition for n={G.n}",))
    return validate_td(G, P.as_tree())


def nice_kinds(T: TreeDecomposition) -> tuple[str, ...]:
    """Derive per-node kind tags; raises if T is not nice (or not rooted)."""
    parent, children = T.rooted()
    kinds = []
    for t in range(T.n_nodes):
        cs = children[t]
        if len(cs) == 0:
            kinds.append("leaf")
        elif len(cs) == 1:
            c = cs[0]
            bt, bc = T.bags[t], T.bags[c]
            if bc < bt and len(bt) == len(bc) + 1:
                kinds.append("introduce")
            elif bt < bc and len(bc) == len(bt) + 1:
                kinds.append("forget")
            else:
                raise InvalidDecompositionError(
                    f"not nice: node {t} has one child whose bag differs by != 1 vertex")
        elif len(cs) == 2:
            if T.bags[cs[0]] == T.bags[t] == T.bags[cs[1]]:
                kinds.append("join")
            else:
                raise InvalidDecompositionError(f"not nice: join node {t} has unequal child bags")
        else:
            raise InvalidDecompositionError(f"not nice: node {t} has {len(cs)} children")
    return tuple(kinds)


# ---------------------------------------------------------------------------
# make_nice: smooth the decomposition, then expand into nice form.
# Smoothing pins every bag at size w+1 with adjacent bags trading exactly one
# vertex, which forces exactly n-w nodes and makes the 4n bound of the nice
# expansion immediate.
# ---------------------------------------------------------------------------

def make_nice(T: TreeDecomposition, G: Graph) -> TreeDecomposition:
    """Nice rooted decomposition of the same width with at most 4n nodes."""
    validate_td(G, T).raise_if_failed()
    if G.n == 0:
        return TreeDecomposition((frozenset(),), (), root=0, kinds=("leaf",))

    k1 = T.max_bag_size  # width + 1
    bags: dict[int, set[int]] = {i: set(b) for i, b in enumerate(T.bags)}
    adj: dict[int, set[int]] = {i: set() for i in bags}
    for u, v in T.edges:
        adj[u].add(v)
        adj[v].add(u)

    def contract(u: int, into: int) -> None:
        for w in adj[u]:
            adj[w].discard(u)
            if w != into:
                adj[w].add(into)
                adj[into].add(w)
        del adj[u], bags[u]

    # Contract subset-adjacent bags and pad deficient bags to size k1.
    work = deque(sorted(bags))
    while work:
        t = work.popleft()
        if t not in bags:
            continue
        merged = False
        for u in sorted(adj[t]):
            if bags[u] <= bags[t]:
                contract(u, t)
                merged = True
            elif bags[t] <= bags[u]:
                contract(t, u)
                work.append(u)
                merged = None
                break
        if merged is None:
            continue
        if merged:
            work.append(t)
            continue
        if len(bags[t]) < k1 and adj[t]:
            u = min(adj[t])
            bags[t].add(min(bags[u] - bags[t]))
            work.append(t)
            work.extend(sorted(adj[t]))

    assert all(len(b) == k1 for b in bags.values()) or len(bags) == 1

    # Subdivide edges so adjacent bags trade exactly one vertex.
    nxt = max(bags) + 1
    for u, v in [(u, v) for u in sorted(bags) for v in sorted(adj[u]) if u < v]:
        drops = sorted(bags[u] - bags[v])
        adds = sorted(bags[v] - bags[u])
        if len(drops) <= 1:
            continue
        adj[u].discard(v)
        adj[v].discard(u)
        prev, cur = u, set(bags[u])
        for i in range(len(drops) - 1):
            cur = (cur - {drops[i]}) | {adds[i]}
            bags[nxt] = set(cur)
            adj[nxt] = {prev}
            adj[prev].add(nxt)
            prev, nxt = nxt, nxt + 1
        adj[prev].add(v)
        adj[v].add(prev)

    # Expand to a nice tree: joins over multiple children, one introduce +
    # one forget node along each smooth edge.
    out_bags: list[frozenset[int]] = []
    out_kinds: list[str] = []
    out_edges: list[tuple[int, int]] = []

    def new_node(bag: Iterable[int], kind: str, parent_id: int | None) -> int:
        out_bags.append(frozenset(bag))
        out_kinds.append(kind)
        nid = len(out_bags) - 1
        if parent_id is not None:
            out_edges.append((parent_id, nid))
        return nid

    sroot = min(bags)
    stack = [(sroot, None, None)]  # (smooth node, smooth parent, out attach point)
    while stack:
        t, par, attach = stack.pop()
        cs = sorted(c for c in adj[t] if c != par)
        bt = bags[t]
        if not cs:
            new_node(bt, "leaf", attach)
            continue
        if len(cs) == 1:
            c = cs[0]
            top = new_node(bt, "introduce", attach)
            mid = new_node(bt & bags[c], "forget", top)
            stack.append((c, t, mid))
            continue
        joins = [new_node(bt, "join", attach)]
        for _ in range(len(cs) - 2):
            joins.append(new_node(bt, "join", joins[-1]))
        for i, c in enumerate(cs):
            jparent = joins[min(i, len(joins) - 1)]
            a = new_node(bt, "introduce", jparent)
            m = new_node(bt & bags[c], "forget", a)
            stack.append((c, t, m))

    result = TreeDecomposition(tuple(out_bags), tuple(out_edges), root=0, kinds=tuple(out_kinds))
    assert result.n_nodes <= 4 * G.n
    return result


def make_leaf_unique(T: TreeDecomposition, G: Graph) -> TreeDecomposition:
    """Nice decomposition where every leaf bag owns a vertex found nowhere else.

    Deletes offending leaves; when a join is left with a single child the
    edge between them is contracted to restore niceness.
    """
    validate_td(G, T).raise_if_failed()
    nice_kinds(T)  # raises if not nice
    if G.n == 0:
        return T

    parent, children_l = T.rooted()
    children = {t: list(cs) for t, cs in enumerate(children_l)}
    bags = list(T.bags)
    root = T.root
    alive = set(range(T.n_nodes))
    count = Counter(v for bag in bags for v in bag)

    def bad_leaf(t: int) -> bool:
        return not children[t] and all(count[v] > 1 for v in bags[t])

    while True:
        t = next((x for x in sorted(alive) if bad_leaf(x)), None)
        if t is None:
            break
        if t == root:  # lone-node tree cannot be bad unless the graph is empty
            raise InvalidDecompositionError("cannot repair: root leaf has no unique vertex")
        alive.remove(t)
        for v in bags[t]:
            count[v] -= 1
        p = parent[t]
        children[p].remove(t)
        if len(children[p]) == 1 and bags[p] == bags[children[p][0]]:
            # ex-join node: contract the edge to its remaining child
            c = children[p][0]
            alive.remove(p)
            for v in bags[p]:
                count[v] -= 1
            if p == root:
                root = c
                parent[c] = None
            else:
                gp = parent[p]
                children[gp][children[gp].index(p)] = c
                parent[c] = gp

    order = sorted(alive)
    renum = {t: i for i, t in enumerate(order)}
    new_bags = tuple(bags[t] for t in order)
    new_edges = tuple((renum[parent[t]], renum[t]) for t in order if t != root)
    out = TreeDecomposition(new_bags, new_edges, root=renum[root])
    return TreeDecomposition(new_bags, new_edges, root=renum[root], kinds=nice_kinds(out))


def make_nice_path(P: PathDecomposition, G: Graph) -> PathDecomposition:
    """Nice path decomposition with exactly 2n bags, same width.

    Each vertex is introduced once and forgotten once; the leading empty bag
    is dropped and the trailing empty bag kept.
    """
    validate_pd(G, P).raise_if_failed("path decomposition")
    if G.n == 0:
        return PathDecomposition(())

    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for i, bag in enumerate(P.bags):
        for v in bag:
            first.setdefault(v, i)
            last[v] = i

    intro_at: list[list[int]] = [[] for _ in P.bags]
    forget_at: list[list[int]] = [[] for _ in P.bags]
    for v in range(G.n):
        intro_at[first[v]].append(v)
        forget_at[last[v]].append(v)

    out: list[frozenset[int]] = []
    cur: set[int] = set()
    for i in range(len(P.bags)):
        for v in sorted(intro_at[i]):
            cur.add(v)
            out.append(frozenset(cur))
        for v in sorted(forget_at[i]):
            cur.remove(v)
            out.append(frozenset(cur))
    assert len(out) == 2 * G.n and not cur
    return PathDecomposition(tuple(out))


# ---------------------------------------------------------------------------
# reduce_depth: recursive balanced splitting of the decomposition tree.
# Each call splits at a centroid (or, with two pinned portal bags, at the
# weighted median of the portal path) and roots the result at the union of
# at most 3 original bags: width <= 3w+2, subtree size halves at least every
# other level.
# ---------------------------------------------------------------------------

def reduce_depth(T: TreeDecomposition, G: Graph) -> TreeDecomposition:
    """Rooted decomposition of depth O(log #nodes) and width <= 3w+2."""
    validate_td(G, T).raise_if_failed()
    adj = T.adjacency()
    bags = T.bags

    out_bags: list[frozenset[int]] = []
    out_edges: list[tuple[int, int]] = []

    def new_node(bag: frozenset[int], parent_id: int | None) -> int:
        out_bags.append(bag)
        nid = len(out_bags) - 1
        if parent_id is not None:
            out_edges.append((parent_id, nid))
        return nid

    def components_without(nodes: set[int], t: int) -> list[set[int]]:
        comps = []
        left = set(nodes)
        left.discard(t)
        while left:
            s = min(left)
            comp = {s}
            stack = [s]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w in left and w not in comp:
                        comp.add(w)
                        stack.append(w)
            left -= comp
            comps.append(comp)
        return sorted(comps, key=min)

    def centroid(nodes: set[int]) -> int:
        total = len(nodes)
        anchor = min(nodes)
        order = []
        parent = {anchor: None}
        stack = [anchor]
        while stack:
            u = stack.pop()
            order.append(u)
            for w in sorted(adj[u]):
                if w in nodes and w not in parent:
                    parent[w] = u
                    stack.append(w)
        size = {u: 1 for u in nodes}
        for u in reversed(order):
            if parent[u] is not None:
                size[parent[u]] += size[u]
        best, best_score = anchor, total
        for u in order:
            below = [size[w] for w in adj[u] if w in nodes and parent.get(w) == u]
            score = max([total - size[u]] + below)
            if score < best_score or (score == best_score and u < best):
                best, best_score = u, score
        return best

    def tree_path(nodes: set[int], a: int, b: int) -> list[int]:
        parent = {a: None}
        queue = deque([a])
        while queue:
            u = queue.popleft()
            if u == b:
                break
            for w in sorted(adj[u]):
                if w in nodes and w not in parent:
                    parent[w] = u
                    queue.append(w)
        path = [b]
        while path[-1] != a:
            path.append(parent[path[-1]])
        return path[::-1]

    def path_median(nodes: set[int], a: int, b: int) -> int:
        path = tree_path(nodes, a, b)
        on_path = set(path)
        weights = []
        for x in path:
            w = 1
            for nb in adj[x]:
                if nb in nodes and nb not in on_path:
                    comp = {nb}
                    stack = [nb]
                    while stack:
                        u = stack.pop()
                        for z in adj[u]:
                            if z in nodes and z not in on_path and z not in comp:
                                comp.add(z)
                                stack.append(z)
                    w += len(comp)
            weights.append(w)
        total = len(nodes)
        cum = 0
        for x, w in zip(path, weights):
            cum += w
            if 2 * cum >= total:
                return x
        return path[-1]

    def rec(nodes: set[int], portals: tuple[int, ...], attach: int | None) -> None:
        if len(nodes) <= 2:
            bag = frozenset().union(*(bags[t] for t in sorted(nodes)))
            new_node(bag, attach)
            return
        if len(portals) == 2:
            tstar = path_median(nodes, portals[0], portals[1])
        elif len(portals) == 1:
            tstar = centroid(nodes)
        else:
            tstar = centroid(nodes)
        bag = frozenset(bags[tstar]).union(*(bags[p] for p in portals)) if portals else frozenset(bags[tstar])
        rid = new_node(bag, attach)
        for comp in components_without(nodes, tstar):
            conn = min(c for c in adj[tstar] if c in comp)
            ports = sorted((set(portals) & comp) | {conn})
            assert len(ports) <= 2
            rec(comp, tuple(ports), rid)

    rec(set(range(T.n_nodes)), (), None)
    return TreeDecomposition(tuple(out_bags), tuple(out_edges), root=0)


# ---------------------------------------------------------------------------
# Subtree chopping and branch-structure surgery.
# ---------------------------------------------------------------------------

def chop_subtrees(G: Graph, T: TreeDecomposition, ell: int):
    """Delete at most k*|L|/ell vertices so every remaining component has a
    decomposition with at most `ell` leaves.

    Repeatedly picks the lowest (post-order) node with more than `ell` leaves
    below it, deletes that node's bag from the graph, and moves the child
    subtrees to the output. Returns (X, parts) where X is the sorted tuple of
    deleted vertices and parts is a list of (component graph, decomposition)
    pairs; part decompositions use the component's local vertex ids.
    """
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    nice_kinds(T)  # chop is used on nice rooted decompositions

    parent, children_l = T.rooted()
    children = {t: sorted(cs) for t, cs in enumerate(children_l)}
    bags = [set(b) for b in T.bags]
    alive = set(range(T.n_nodes))
    root = T.root

    X: set[int] = set()
    pieces: list[tuple[list[int], int]] = []

    def subtree_nodes(s: int) -> list[int]:
        acc = [s]
        stack = [s]
        while stack:
            u = stack.pop()
            for c in children[u]:
                acc.append(c)
                stack.append(c)
        return acc

    while root is not None:
        # post-order over the live tree, with per-node leaf counts
        post: list[int] = []
        stack: list[tuple[int, bool]] = [(root, False)]
        while stack:
            t, expanded = stack.pop()
            if expanded:
                post.append(t)
                continue
            stack.append((t, True))
            for c in reversed(children[t]):
                stack.append((c, False))
        lc = {t: 0 for t in post}
        for t in post:
            lc[t] = 1 if not children[t] else sum(lc[c] for c in children[t])
        if lc[root] <= ell:
            break
        tstar = next(t for t in post if lc[t] >= ell + 1)

        doomed = set(bags[tstar])
        X |= doomed
        for t in alive:
            bags[t] -= doomed
        for c in children[tstar]:
            piece = subtree_nodes(c)
            pieces.append((piece, c))
            alive -= set(piece)
        alive.remove(tstar)
        if tstar == root:
            root = None
        else:
            children[parent[tstar]].remove(tstar)

    if root is not None and alive:
        pieces.append((subtree_nodes(root), root))

    parts: list[tuple[Graph, TreeDecomposition]] = []
    for piece, proot in pieces:
        covered = sorted(set().union(*(bags[t] for t in piece)))
        if not covered:
            continue
        shell = induced_subgraph(G, covered)
        for comp in connected_components(shell):
            zset = set(shell.to_parent(comp))
            part_graph = induced_subgraph(G, zset)
            pos = {v: i for i, v in enumerate(part_graph.labels)}
            order = subtree_nodes(proot)
            renum = {t: i for i, t in enumerate(order)}
            part_bags = tuple(frozenset(pos[v] for v in bags[t] if v in zset) for t in order)
            part_edges = tuple((renum[t], renum[c]) for t in order for c in children[t])
            parts.append((part_graph, TreeDecomposition(part_bags, part_edges, root=0)))
    return tuple(sorted(X)), parts


def branch_bag_union(T: TreeDecomposition) -> tuple[int, ...]:
    """Union of the bags of nodes with undirected tree degree >= 3."""
    deg = T.node_degrees()
    out: set[int] = set()
    for t in range(T.n_nodes):
        if deg[t] >= 3:
            out |= T.bags[t]
    return tuple(sorted(out))


def path_decomp_minus_Q(T: TreeDecomposition, Q: Iterable[int], C: Graph) -> PathDecomposition:
    """Path decomposition of C - Q obtained by dropping branch nodes and
    Q-vertices, concatenating the leftover path segments.

    Bags use the local ids of induced_subgraph(C, V(C) - Q).
    """
    Qt = tuple(sorted(Q))
    if Qt != branch_bag_union(T):
        raise ValueError("Q does not match branch_bag_union(T)")
    qset = set(Qt)
    rest = [v for v in range(C.n) if v not in qset]
    pos = {v: i for i, v in enumerate(rest)}

    adj = T.adjacency()
    deg = [len(s) for s in adj]
    keep = [t for t in range(T.n_nodes) if deg[t] <= 2]
    keepset = set(keep)

    segments: list[list[int]] = []
    unseen = set(keep)
    while unseen:
        s = min(unseen)
        comp = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in keepset and w in unseen and w not in comp:
                    comp.add(w)
                    stack.append(w)
        unseen -= comp
        ends = sorted(t for t in comp if len(adj[t] & comp) <= 1)
        walk = [ends[0]]
        while len(walk) < len(comp):
            nxt = next(w for w in sorted(adj[walk[-1]] & comp) if len(walk) < 2 or w != walk[-2])
            walk.append(nxt)
        segments.append(walk)

    segments.sort(key=lambda seg: min(seg))
    bags = tuple(frozenset(pos[v] for v in T.bags[t] if v not in qset)
                 for seg in segments for t in seg)
    return PathDecomposition(bags)


def contract_to_branch_td(T: TreeDecomposition, Q: Iterable[int], C: Graph) -> TreeDecomposition:
    """Decomposition of C[Q] on the branch nodes of T, with one merged node
    (bag B_u | B_v) per maximal branch-to-branch path; pendant paths dropped.

    Bags use the local ids of induced_subgraph(C, Q); at most twice as many
    nodes as there are branch nodes; width at most 2*(max bag of T) - 1.
    """
    Qt = tuple(sorted(Q))
    if not Qt:
        raise ValueError("Q is empty; the branch decomposition is undefined")
    if Qt != branch_bag_union(T):
        raise ValueError("Q does not match branch_bag_union(T)")
    pos = {v: i for i, v in enumerate(Qt)}

    adj = T.adjacency()
    deg = [len(s) for s in adj]
    branch = [t for t in range(T.n_nodes) if deg[t] >= 3]
    bset = set(branch)

    out_bags = [frozenset(pos[v] for v in T.bags[t]) for t in branch]
    out_edges: list[tuple[int, int]] = []
    bid = {t: i for i, t in enumerate(branch)}

    for u in branch:
        for start in sorted(adj[u]):
            prev, cur = u, start
            while cur not in bset:
                nxts = [w for w in adj[cur] if w != prev]
                if not nxts:
                    cur = None  # pendant path: dropped
                    break
                prev, cur = cur, nxts[0]
            if cur is None or not (u < cur):
                continue
            mid = len(out_bags)
            out_bags.append(frozenset(pos[v] for v in (T.bags[u] | T.bags[cur])))
            out_edges.append((bid[u], mid))
            out_edges.append((mid, bid[cur]))

    return TreeDecomposition(tuple(out_bags), tuple(out_edges), root=0)


# ---------------------------------------------------------------------------
# PACE 2017 .td interchange format.
# ---------------------------------------------------------------------------

def read_td(text: str | bytes) -> TreeDecomposition:
    """Parse PACE .td text (1-indexed bag ids and vertices)."""
    if isinstance(text, bytes):
        text = text.decode("ascii", errors="replace")
    n_bags = None
    bag_map: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("c"):
            continue
        tok = s.split()
        if tok[0] == "s":
            if len(tok) != 5 or tok[1] != "td":
                raise GraphParseError(f"line {lineno}: malformed header {s!r}, expected 's td <bags> <maxbag> <n>'")
            n_bags = int(tok[2])
        elif tok[0] == "b":
            if n_bags is None:
                raise GraphParseError(f"line {lineno}: bag line before 's td' header")
            i = int(tok[1])
            if not (1 <= i <= n_bags):
                raise GraphParseError(f"line {lineno}: bag id {i} out of range")
            bag_map[i] = frozenset(int(x) - 1 for x in tok[2:])
        else:
            if n_bags is None:
                raise GraphParseError(f"line {lineno}: edge line before 's td' header")
            if len(tok) != 2:
                raise GraphParseError(f"line {lineno}: expected a tree edge 'u v', got {s!r}")
            u, v = int(tok[0]), int(tok[1])
            if not (1 <= u <= n_bags and 1 <= v <= n_bags):
                raise GraphParseError(f"line {lineno}: tree edge ({u},{v}) out of range")
            edges.append((u - 1, v - 1))
    if n_bags is None:
        raise GraphParseError("line 1: missing 's td' header")
    bags = tuple(bag_map.get(i, frozenset()) for i in range(1, n_bags + 1))
    return TreeDecomposition(bags, tuple(edges))


def write_td(T: TreeDecomposition, n: int) -> str:
    """Render PACE .td text; `n` is the vertex count of the decomposed graph."""
    lines = [f"s td {T.n_nodes} {T.max_bag_size} {n}"]
    for i, bag in enumerate(T.bags, start=1):
        lines.append("b " + " ".join([str(i)] + [str(v + 1) for v in sorted(bag)]))
    lines.extend(f"{u + 1} {v + 1}" for u, v in T.edges)
    return "\n".join(lines) + "\n"
