"""Baseline structures and brute-force oracles for differential testing.

Everything here is independent of the forest core: connectivity ground truth
comes from plain graph search over an adjacency map, never from the structure
under test.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Optional, Set

from .errors import ComponentTooLarge, NoSuchEdge, SelfLoop, UnsupportedOperation
from .forest import make_forest
from .records import DeleteOutcome

DEFAULT_COMPONENT_CAP = 2000


class AdjacencyGraph:
    """Plain undirected simple graph as a symmetric adjacency map."""

    def __init__(self):
        self.adjacency: Dict[int, Set[int]] = {}

    def add_vertex(self, v: int) -> None:
        self.adjacency.setdefault(v, set())

    def add_edge(self, u: int, v: int) -> bool:
        """Insert an edge; returns False if it was already present."""
        if u == v:
            raise SelfLoop(f"self loop at {u!r}")
        a = self.adjacency.setdefault(u, set())
        self.adjacency.setdefault(v, set())
        if v in a:
            return False
        a.add(v)
        self.adjacency[v].add(u)
        return True

    def remove_edge(self, u: int, v: int) -> None:
        adj = self.adjacency
        if u not in adj or v not in adj[u]:
            raise NoSuchEdge(f"edge ({u!r}, {v!r}) not present")
        adj[u].discard(v)
        adj[v].discard(u)

    def has_edge(self, u: int, v: int) -> bool:
        return u in self.adjacency and v in self.adjacency[u]

    def vertices(self) -> list:
        return list(self.adjacency)

    def n_edges(self) -> int:
        return sum(len(s) for s in self.adjacency.values()) // 2

    def edges(self) -> list:
        out = []
        for u, nbrs in self.adjacency.items():
            for v in nbrs:
                if u < v:
                    out.append((u, v))
        return out

    def component_of(self, v: int) -> Set[int]:
        adj = self.adjacency
        comp = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        return comp

    def components(self) -> list:
        seen: Set[int] = set()
        out = []
        for v in self.adjacency:
            if v not in seen:
                comp = self.component_of(v)
                seen |= comp
                out.append(comp)
        return out


def oracle_conn(g: AdjacencyGraph, u: int, v: int) -> bool:
    """Ground-truth connectivity by breadth-first search."""
    adj = g.adjacency
    if u not in adj or v not in adj:
        from .errors import UnknownVertex

        raise UnknownVertex(f"{u!r} or {v!r} not in graph")
    if u == v:
        return True
    seen = {u}
    frontier = [u]
    while frontier:
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if y == v:
                    return True
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return False


def bfs_tree(g: AdjacencyGraph, root: int) -> Dict[int, Optional[int]]:
    """Deterministic BFS tree (sorted neighbor order): vertex -> parent map."""
    adj = g.adjacency
    parent: Dict[int, Optional[int]] = {root: None}
    frontier = [root]
    while frontier:
        nxt = []
        for x in frontier:
            for y in sorted(adj[x]):
                if y not in parent:
                    parent[y] = x
                    nxt.append(y)
        frontier = nxt
    return parent


def bfs_depths(g: AdjacencyGraph, root: int) -> Dict[int, int]:
    """Distance from ``root`` to every vertex of its component."""
    adj = g.adjacency
    depth = {root: 0}
    frontier = [root]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if y not in depth:
                    depth[y] = d
                    nxt.append(y)
        frontier = nxt
    return depth


def _component_distance_sums(g: AdjacencyGraph, comp: list) -> list:
    """Sum of shortest-path distances from each component vertex to all others."""
    import numpy as np
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path

    index = {v: i for i, v in enumerate(comp)}
    rows = []
    cols = []
    for v in comp:
        iv = index[v]
        for w in g.adjacency[v]:
            rows.append(iv)
            cols.append(index[w])
    n = len(comp)
    mat = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    dist = shortest_path(mat, method="D", unweighted=True, directed=False)
    return [int(s) for s in dist.sum(axis=1)]


def opt_bfs_tree(g: AdjacencyGraph, member: int, cap: int = DEFAULT_COMPONENT_CAP) -> tuple:
    """Root minimizing the BFS-tree distance sum over all possible roots.

    Returns ``(root, minimal distance sum)`` for the component containing
    ``member``.  Ties go to the smallest vertex key.  Expensive (one BFS per
    vertex), hence the component size cap.
    """
    comp = sorted(g.component_of(member))
    if len(comp) > cap:
        raise ComponentTooLarge(f"component of {member!r} has {len(comp)} > {cap} vertices")
    if len(comp) == 1:
        return (comp[0], 0)
    sums = _component_distance_sums(g, comp)
    best = min(range(len(comp)), key=lambda i: (sums[i], comp[i]))
    return (comp[best], sums[best])


def avg_sp(g: AdjacencyGraph, member: int, cap: int = DEFAULT_COMPONENT_CAP) -> Fraction:
    """Exact mean shortest-path length over unordered pairs of one component."""
    comp = sorted(g.component_of(member))
    n = len(comp)
    if n > cap:
        raise ComponentTooLarge(f"component of {member!r} has {n} > {cap} vertices")
    if n < 2:
        return Fraction(0)
    total = 0
    for v in comp:
        total += sum(bfs_depths(g, v).values())
    # every unordered pair counted twice
    return Fraction(total, 2) / (n * (n - 1) // 2)


class UnionFind:
    """Union by rank with path compression; keys are created on first use."""

    def __init__(self):
        self.parent: Dict[int, int] = {}
        self.rank: Dict[int, int] = {}

    def find(self, u: int) -> int:
        parent = self.parent
        if u not in parent:
            parent[u] = u
            self.rank[u] = 0
            return u
        root = u
        while parent[root] != root:
            root = parent[root]
        while parent[u] != root:
            parent[u], u = root, parent[u]
        return root

    def union(self, u: int, v: int) -> bool:
        """Merge the two sets; returns False when already joined."""
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return False
        rank = self.rank
        if rank[ru] < rank[rv]:
            ru, rv = rv, ru
        self.parent[rv] = ru
        if rank[ru] == rank[rv]:
            rank[ru] += 1
        return True

    def connected(self, u: int, v: int) -> bool:
        return self.find(u) == self.find(v)


class ComponentTracker:
    """Incremental component labelling over an adjacency graph.

    Keeps ``conn`` answers O(1) between updates so differential harnesses can
    check every event without re-running a full search per query.  Verified
    against plain BFS in the test suite.
    """

    def __init__(self, graph: Optional[AdjacencyGraph] = None):
        self.graph = graph if graph is not None else AdjacencyGraph()
        self.labels: Dict[int, int] = {}
        self._members: Dict[int, Set[int]] = {}
        self._next = 0
        for v in self.graph.adjacency:
            self._new_component([v])
        for u, v in self.graph.edges():
            self._merge(u, v)

    def _new_component(self, vertices) -> int:
        lbl = self._next
        self._next += 1
        members = set(vertices)
        self._members[lbl] = members
        for v in members:
            self.labels[v] = lbl
        return lbl

    def add_vertex(self, v: int) -> None:
        if v not in self.labels:
            self.graph.add_vertex(v)
            self._new_component([v])

    def _merge(self, u: int, v: int) -> bool:
        lu, lv = self.labels[u], self.labels[v]
        if lu == lv:
            return False
        if len(self._members[lu]) < len(self._members[lv]):
            lu, lv = lv, lu
        small = self._members.pop(lv)
        self._members[lu] |= small
        for x in small:
            self.labels[x] = lu
        return True

    def insert(self, u: int, v: int) -> bool:
        """Add the edge; returns True when two components merged."""
        self.add_vertex(u)
        self.add_vertex(v)
        if not self.graph.add_edge(u, v):
            return False
        return self._merge(u, v)

    def delete(self, u: int, v: int) -> bool:
        """Remove the edge; returns True when the component split."""
        self.graph.remove_edge(u, v)
        # search u's side; early exit once v proves the component held
        adj = self.graph.adjacency
        seen = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y == v:
                    return False
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        old = self.labels[u]
        self._members[old] -= seen
        self._new_component(seen)
        return True

    def conn(self, u: int, v: int) -> bool:
        return self.labels[u] == self.labels[v]

    def n_components(self) -> int:
        return len(self._members)


def naive_forest(backend: Optional[str] = None):
    """Forest variant without any rebalancing heuristics (first-hit replacement)."""
    return make_forest(maintain=False, backend=backend)


class UnionFindStructure:
    """Insertion-only baseline exposing the replay-facing structure protocol."""

    name = "unionfind"

    def __init__(self):
        self._uf = UnionFind()
        self._edges: Set[tuple] = set()

    def add_vertex(self, v: int) -> None:
        self._uf.find(v)

    def has_vertex(self, v: int) -> bool:
        return v in self._uf.parent

    def vertices(self) -> list:
        return list(self._uf.parent)

    def insert_edge(self, u: int, v: int) -> str:
        if u == v:
            raise SelfLoop(f"self loop at {u!r}")
        pair = (u, v) if u < v else (v, u)
        if pair in self._edges:
            return "noop"
        self._edges.add(pair)
        return "te" if self._uf.union(u, v) else "nte"

    def delete_edge(self, u: int, v: int):
        raise UnsupportedOperation("union-find cannot delete edges")

    def conn(self, u: int, v: int) -> bool:
        return self._uf.connected(u, v)

    def conn_batch(self, u_keys, v_keys) -> list:
        find = self._uf.find
        return [find(u) == find(v) for u, v in zip(u_keys, v_keys)]

    def n_vertices(self) -> int:
        return len(self._uf.parent)

    def n_edges(self) -> int:
        return len(self._edges)

    def n_components(self) -> int:
        uf = self._uf
        return len({uf.find(v) for v in uf.parent})

    def snapshot_metrics(self) -> tuple:
        # no spanning tree is maintained, so both tree metrics read as zero
        return (0, 0, self.n_components(), self.n_vertices(), self.n_edges())

    def depth_histogram_total(self) -> dict:
        return {}


class OptForest:
    """Exact-connectivity structure whose snapshot metrics are the optimal ones.

    Maintains only the graph (via a component tracker).  At snapshot time it
    reports, per component, the distance sum of the best possible BFS tree
    and the cut sum of that tree, i.e. the floor any spanning-forest
    structure can hope to reach.
    """

    name = "oracle"

    def __init__(self, cap: int = DEFAULT_COMPONENT_CAP):
        self.cap = cap
        self._tracker = ComponentTracker()

    @property
    def graph(self) -> AdjacencyGraph:
        return self._tracker.graph

    def add_vertex(self, v: int) -> None:
        self._tracker.add_vertex(v)

    def has_vertex(self, v: int) -> bool:
        return v in self._tracker.labels

    def vertices(self) -> list:
        return list(self._tracker.labels)

    def insert_edge(self, u: int, v: int) -> str:
        if u == v:
            raise SelfLoop(f"self loop at {u!r}")
        if self.graph.has_edge(u, v):
            return "noop"
        return "te" if self._tracker.insert(u, v) else "nte"

    def delete_edge(self, u: int, v: int) -> DeleteOutcome:
        # classified by bridge-ness: a splitting delete maps to the tree
        # class, anything else to the constant-time class
        split = self._tracker.delete(u, v)
        return DeleteOutcome("tree" if split else "nontree", split, ())

    def conn(self, u: int, v: int) -> bool:
        return self._tracker.conn(u, v)

    def conn_batch(self, u_keys, v_keys) -> list:
        labels = self._tracker.labels
        return [labels[u] == labels[v] for u, v in zip(u_keys, v_keys)]

    def n_vertices(self) -> int:
        return len(self._tracker.labels)

    def n_edges(self) -> int:
        return self.graph.n_edges()

    def n_components(self) -> int:
        return self._tracker.n_components()

    def _per_component(self):
        for members in self._tracker._members.values():
            yield sorted(members)

    def snapshot_metrics(self) -> tuple:
        s_d_total = 0
        s_c_total = 0
        for comp in self._per_component():
            if len(comp) > self.cap:
                raise ComponentTooLarge(
                    f"component with {len(comp)} vertices exceeds oracle cap {self.cap}"
                )
            if len(comp) == 1:
                continue
            sums = _component_distance_sums(self.graph, comp)
            best = min(range(len(comp)), key=lambda i: (sums[i], comp[i]))
            s_d_total += sums[best]
            s_c_total += self._tree_cut_sum(comp[best])
        return (s_d_total, s_c_total, self.n_components(), self.n_vertices(), self.n_edges())

    def _tree_cut_sum(self, root: int) -> int:
        parent = bfs_tree(self.graph, root)
        size = {v: 1 for v in parent}
        depths = bfs_depths(self.graph, root)
        order = sorted(parent, key=lambda v: -depths[v])
        for v in order:
            p = parent[v]
            if p is not None:
                size[p] += size[v]
        n = len(parent)
        return sum(min(size[v], n - size[v]) for v in parent if parent[v] is not None)

    def depth_histogram_total(self) -> dict:
        hist: dict = {}
        for comp in self._per_component():
            if len(comp) == 1:
                hist[0] = hist.get(0, 0) + 1
                continue
            sums = _component_distance_sums(self.graph, comp)
            best = min(range(len(comp)), key=lambda i: (sums[i], comp[i]))
            for d in bfs_depths(self.graph, comp[best]).values():
                hist[d] = hist.get(d, 0) + 1
        return hist
