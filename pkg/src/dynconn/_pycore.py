"""Pure-Python forest core.

Maintains one spanning tree per connected component of a fully dynamic
undirected graph.  Every node carries its subtree size and the set of
incident non-tree edges, which together embed the complete graph in the
forest and drive the rebalancing heuristics (shortcut rewiring on non-tree
inserts, centroid restoration on merges and connectivity queries).

Storage is a contiguous arena indexed by dense internal ids with a key->id
map.  Children and non-tree neighborhoods are insertion-ordered dicts so
that traversal order (and therefore replacement-edge tie-breaking) is
deterministic and identical to the compiled core.

The compiled twin of this module is ``dynconn._core``; the two must stay
behaviorally identical (see tests/test_backends.py).
"""

from __future__ import annotations

from typing import Iterator, Optional

from .errors import (
    DuplicateVertex,
    EdgeExists,
    IsRoot,
    NoSuchEdge,
    NotARoot,
    NotSameTree,
    NotTreeEdge,
    SameTree,
    SelfLoop,
    UnknownVertex,
    VertexNotIsolated,
)
from .records import DeleteOutcome, RootInfo

COMPILED = False


class Forest:
    """Spanning forest of a dynamic graph with size and non-tree-edge annotations.

    With ``maintain=True`` (the default) the structure runs the full set of
    heuristics.  With ``maintain=False`` it degrades to the naive variant:
    non-tree inserts only record adjacency, merges attach the smaller tree
    without centroid repair, queries never reroot, and replacement-edge
    search stops at the first candidate.
    """

    __slots__ = (
        "_maintain",
        "_key_of",
        "_parent",
        "_size",
        "_children",
        "_nte",
        "_id_of",
        "_roots",
        "_free",
        "_n_nte",
    )

    def __init__(self, maintain: bool = True):
        self._maintain = bool(maintain)
        self._key_of: list = []    # id -> key (None for freed slots)
        self._parent: list = []    # id -> parent id, -1 for roots
        self._size: list = []      # id -> subtree size
        self._children: list = []  # id -> ordered dict {child id: None}
        self._nte: list = []       # id -> ordered dict {neighbor id: None}
        self._id_of: dict = {}     # key -> id
        self._roots: dict = {}     # ordered set of root ids
        self._free: list = []      # reusable slots
        self._n_nte = 0            # number of embedded non-tree edges

    # -- bookkeeping -----------------------------------------------------

    @property
    def maintain(self) -> bool:
        return self._maintain

    @property
    def backend(self) -> str:
        return "python"

    def __len__(self) -> int:
        return len(self._id_of)

    def __contains__(self, key: int) -> bool:
        return key in self._id_of

    def has_vertex(self, key: int) -> bool:
        return key in self._id_of

    def n_vertices(self) -> int:
        return len(self._id_of)

    def n_components(self) -> int:
        return len(self._roots)

    def n_edges(self) -> int:
        # every non-root contributes exactly one tree edge
        return (len(self._id_of) - len(self._roots)) + self._n_nte

    def vertices(self) -> list:
        return list(self._id_of.keys())

    def roots(self) -> list:
        key_of = self._key_of
        return [key_of[i] for i in self._roots]

    def _resolve(self, key: int) -> int:
        try:
            return self._id_of[key]
        except KeyError:
            raise UnknownVertex(f"vertex {key!r} not in forest") from None

    # -- vertex maintenance ----------------------------------------------

    def add_vertex(self, key: int) -> None:
        if key in self._id_of:
            raise DuplicateVertex(f"vertex {key!r} already present")
        self._add_vertex(key)

    def _add_vertex(self, key: int) -> int:
        if self._free:
            i = self._free.pop()
            self._key_of[i] = key
            self._parent[i] = -1
            self._size[i] = 1
            self._children[i] = {}
            self._nte[i] = {}
        else:
            i = len(self._key_of)
            self._key_of.append(key)
            self._parent.append(-1)
            self._size.append(1)
            self._children.append({})
            self._nte.append({})
        self._id_of[key] = i
        self._roots[i] = None
        return i

    def remove_vertex(self, key: int) -> None:
        """Remove an isolated vertex; vertices with incident edges are refused."""
        i = self._resolve(key)
        if self._parent[i] != -1 or self._children[i] or self._nte[i]:
            raise VertexNotIsolated(f"vertex {key!r} still has incident edges")
        del self._id_of[key]
        del self._roots[i]
        self._key_of[i] = None
        self._free.append(i)

    # -- traversal --------------------------------------------------------

    def find_root(self, key: int) -> RootInfo:
        """Walk parent pointers to the component root; does not mutate."""
        i = self._resolve(key)
        parent = self._parent
        gate = -1
        depth = 0
        while parent[i] != -1:
            gate = i
            i = parent[i]
            depth += 1
        key_of = self._key_of
        return RootInfo(key_of[i], depth, key_of[gate] if gate != -1 else None)

    def _root_of(self, i: int) -> int:
        parent = self._parent
        while parent[i] != -1:
            i = parent[i]
        return i

    def _depth_of(self, i: int) -> int:
        parent = self._parent
        d = 0
        while parent[i] != -1:
            i = parent[i]
            d += 1
        return d

    # -- restructuring primitives -----------------------------------------

    def reroot(self, key: int) -> int:
        """Make the given vertex the root of its tree; returns its key."""
        w = self._resolve(key)
        self._reroot(w)
        return key

    def _reroot(self, w: int) -> int:
        parent = self._parent
        size = self._size
        children = self._children
        ch = w
        cur = parent[w]
        if cur == -1:
            return w
        parent[w] = -1
        # reverse the parent chain from w up to the old root
        while cur != -1:
            g = parent[cur]
            parent[cur] = ch
            del children[cur][ch]
            children[ch][cur] = None
            ch = cur
            cur = g
        del self._roots[ch]
        self._roots[w] = None
        # fix sizes bottom-up along the reversed path (ch is the old root)
        while parent[ch] != -1:
            p = parent[ch]
            size[ch] -= size[p]
            size[p] += size[ch]
            ch = p
        return w

    def link(self, u_key: int, r_u_key: int, v_key: int) -> int:
        """Attach the tree rooted at ``v`` below ``u``; returns the final root key.

        ``r_u`` must be the root of ``u``'s tree and ``v`` a root of a distinct
        tree.  If a node on the walk from ``u`` to the root ends up holding
        more than half of the merged tree, the deepest such node becomes the
        new root.
        """
        u = self._resolve(u_key)
        r_u = self._resolve(r_u_key)
        v = self._resolve(v_key)
        if self._parent[v] != -1:
            raise NotARoot(f"{v_key!r} is not a root")
        if self._parent[r_u] != -1 or self._root_of(u) != r_u:
            raise NotARoot(f"{r_u_key!r} is not the root of {u_key!r}'s tree")
        if r_u == v:
            raise SameTree(f"{u_key!r} and {v_key!r} are in the same tree")
        return self._key_of[self._link(u, r_u, v, self._maintain)]

    def _link(self, u: int, r_u: int, v: int, restore: bool) -> int:
        parent = self._parent
        size = self._size
        self._children[u][v] = None
        parent[v] = u
        del self._roots[v]
        vsz = size[v]
        total = size[r_u] + vsz
        m = -1
        i = u
        while i != -1:
            size[i] += vsz
            if restore and m == -1 and i != r_u and 2 * size[i] > total:
                m = i
            i = parent[i]
        if m != -1:
            return self._reroot(m)
        return r_u

    def unlink(self, key: int) -> tuple:
        """Detach a non-root vertex from its parent; returns (key, former root key)."""
        v = self._resolve(key)
        if self._parent[v] == -1:
            raise IsRoot(f"{key!r} is a root")
        v, r = self._unlink(v)
        return (self._key_of[v], self._key_of[r])

    def _unlink(self, v: int) -> tuple:
        parent = self._parent
        size = self._size
        vsz = size[v]
        i = v
        while parent[i] != -1:
            i = parent[i]
            size[i] -= vsz
        p = parent[v]
        del self._children[p][v]
        parent[v] = -1
        self._roots[v] = None
        return (v, i)

    # -- connectivity -------------------------------------------------------

    def conn(self, u_key: int, v_key: int) -> bool:
        """True iff both vertices are in the same tree.

        As a side effect (in maintaining mode) each endpoint's walk may
        reroot its tree at the root's gate child when that child holds more
        than half of the tree, deferring centroid restoration to queries.
        The answer is decided from the root the second walk reaches before
        its own repair fires, so back-to-back reroots of one tree cannot
        make connected vertices look disconnected.
        """
        u = self._resolve(u_key)
        v = self._resolve(v_key)
        return self._conn_impl(u, v)[0]

    def conn_batch(self, u_keys, v_keys) -> list:
        """Vectorized ``conn``; answers one boolean per pair."""
        id_of = self._id_of
        out = []
        for u_key, v_key in zip(u_keys, v_keys):
            try:
                u = id_of[u_key]
                v = id_of[v_key]
            except KeyError:
                raise UnknownVertex("unknown vertex in batch") from None
            out.append(self._conn_impl(u, v)[0])
        return out

    def _walk(self, i: int) -> tuple:
        """(root, gate child) without mutation; gate is -1 at the root itself."""
        parent = self._parent
        d = -1
        while parent[i] != -1:
            d = i
            i = parent[i]
        return (i, d)

    def _repair(self, root: int, gate: int) -> int:
        if self._maintain and gate != -1 and 2 * self._size[gate] > self._size[root]:
            return self._reroot(gate)
        return root

    def _conn_impl(self, u: int, v: int) -> tuple:
        """(same tree?, final root of u's tree, final root of v's tree)."""
        r_u, d_u = self._walk(u)
        r_u = self._repair(r_u, d_u)
        r_v, d_v = self._walk(v)
        same = r_v == r_u
        r_v = self._repair(r_v, d_v)
        if same:
            r_u = r_v
        return (same, r_u, r_v)

    # -- edge insertion -------------------------------------------------------

    def insert_edge(self, u_key: int, v_key: int) -> str:
        """Insert an undirected edge, creating missing vertices.

        Returns which path was taken: ``"te"`` (trees merged), ``"nte"``
        (recorded as a non-tree edge, possibly with shortcut rewiring) or
        ``"noop"`` (the edge was already embedded).
        """
        if u_key == v_key:
            raise SelfLoop(f"self loop at {u_key!r}")
        id_of = self._id_of
        u = id_of[u_key] if u_key in id_of else self._add_vertex(u_key)
        v = id_of[v_key] if v_key in id_of else self._add_vertex(v_key)
        parent = self._parent
        if v in self._nte[u] or parent[u] == v or parent[v] == u:
            return "noop"
        same, r_u, r_v = self._conn_impl(u, v)
        if same:
            self._insert_nte(u, v, r_v)
            return "nte"
        self._insert_te(u, v, r_u, r_v)
        return "te"

    def insert_nte(self, u_key: int, v_key: int, r_key: int) -> int:
        """Embed a non-tree edge between two vertices of the same tree."""
        u = self._resolve(u_key)
        v = self._resolve(v_key)
        r = self._resolve(r_key)
        if self._parent[r] != -1 or self._root_of(u) != r or self._root_of(v) != r:
            raise NotSameTree(f"{u_key!r} and {v_key!r} are not both in the tree of {r_key!r}")
        if v in self._nte[u] or self._parent[u] == v or self._parent[v] == u:
            raise EdgeExists(f"edge ({u_key!r}, {v_key!r}) already embedded")
        return self._key_of[self._insert_nte(u, v, r)]

    def _insert_nte(self, u: int, v: int, r: int) -> int:
        parent = self._parent
        if self._maintain:
            du = self._depth_of(u)
            dv = self._depth_of(v)
            if du <= dv:
                l, h = u, v
            else:
                l, h = v, u
            delta = abs(dv - du)
        else:
            delta = 0
        if delta < 2:
            self._nte[u][v] = None
            self._nte[v][u] = None
            self._n_nte += 1
            return r
        # shortcut rewiring: detach the (delta-2)nd ancestor of the deep
        # endpoint, demote its parent edge to non-tree, hang the subtree
        # (rerooted at the deep endpoint) below the shallow endpoint
        i = h
        for _ in range(delta - 2):
            i = parent[i]
        p = parent[i]
        self._nte[i][p] = None
        self._nte[p][i] = None
        self._n_nte += 1
        self._unlink(i)
        self._reroot(h)
        return self._link(l, r, h, True)

    def insert_te(self, u_key: int, v_key: int, r_u_key: int, r_v_key: int) -> int:
        """Merge two trees with a new tree edge (u, v); returns the merged root key."""
        u = self._resolve(u_key)
        v = self._resolve(v_key)
        r_u = self._resolve(r_u_key)
        r_v = self._resolve(r_v_key)
        if self._parent[r_u] != -1 or self._root_of(u) != r_u:
            raise NotARoot(f"{r_u_key!r} is not the root of {u_key!r}'s tree")
        if self._parent[r_v] != -1 or self._root_of(v) != r_v:
            raise NotARoot(f"{r_v_key!r} is not the root of {v_key!r}'s tree")
        if r_u == r_v:
            raise SameTree(f"{u_key!r} and {v_key!r} are already connected")
        return self._key_of[self._insert_te(u, v, r_u, r_v)]

    def _insert_te(self, u: int, v: int, r_u: int, r_v: int) -> int:
        # reroot the smaller tree at its endpoint and hang it below the other
        if self._size[r_u] < self._size[r_v]:
            return self._link(v, r_v, self._reroot(u), self._maintain)
        return self._link(u, r_u, self._reroot(v), self._maintain)

    # -- edge deletion ----------------------------------------------------------

    def delete_edge(self, u_key: int, v_key: int) -> DeleteOutcome:
        """Remove an embedded edge, dispatching on tree vs non-tree."""
        id_of = self._id_of
        if u_key not in id_of or v_key not in id_of:
            raise NoSuchEdge(f"edge ({u_key!r}, {v_key!r}) not embedded")
        u = id_of[u_key]
        v = id_of[v_key]
        if v in self._nte[u]:
            self._delete_nte(u, v)
            return DeleteOutcome("nontree", False, ())
        parent = self._parent
        if parent[v] == u or parent[u] == v:
            return self._delete_te(u, v)
        raise NoSuchEdge(f"edge ({u_key!r}, {v_key!r}) not embedded")

    def delete_nte(self, u_key: int, v_key: int) -> None:
        """Remove a non-tree edge; O(1), the tree is untouched."""
        u = self._resolve(u_key)
        v = self._resolve(v_key)
        if v not in self._nte[u]:
            raise NoSuchEdge(f"({u_key!r}, {v_key!r}) is not an embedded non-tree edge")
        self._delete_nte(u, v)

    def _delete_nte(self, u: int, v: int) -> None:
        del self._nte[u][v]
        del self._nte[v][u]
        self._n_nte -= 1

    def delete_te(self, u_key: int, v_key: int) -> DeleteOutcome:
        """Remove a tree edge, searching the smaller side for a replacement."""
        u = self._resolve(u_key)
        v = self._resolve(v_key)
        parent = self._parent
        if parent[v] != u and parent[u] != v:
            raise NotTreeEdge(f"({u_key!r}, {v_key!r}) is not a tree edge")
        return self._delete_te(u, v)

    def _delete_te(self, u: int, v: int) -> DeleteOutcome:
        parent = self._parent
        size = self._size
        nte = self._nte
        ch = v if parent[v] == u else u
        ch, r = self._unlink(ch)
        if size[ch] < size[r]:
            r_s, r_l = ch, r
        else:
            r_s, r_l = r, ch
        # BFS the smaller tree streaming candidate replacement edges; keep the
        # one whose far endpoint sits closest to the larger tree's root
        maintain = self._maintain
        best_u = -1
        best_v = -1
        best_depth = 0
        queue = [r_s]
        qi = 0
        while qi < len(queue):
            x = queue[qi]
            qi += 1
            for y in nte[x]:
                rr = y
                d = 0
                while parent[rr] != -1:
                    rr = parent[rr]
                    d += 1
                if rr == r_l and (best_u == -1 or d < best_depth):
                    best_u, best_v, best_depth = x, y, d
                    if not maintain:
                        break
            if best_u != -1 and not maintain:
                break
            queue.extend(self._children[x])
        if best_u == -1:
            if maintain:
                m = self._centroid_descend(r_s)
                if m != r_s:
                    r_s = self._reroot(m)
            key_of = self._key_of
            return DeleteOutcome("tree", True, (key_of[r_s], key_of[r_l]))
        self._delete_nte(best_u, best_v)
        new_root = self._insert_te(best_u, best_v, r_s, r_l)
        return DeleteOutcome("tree", False, (self._key_of[new_root],))

    # -- metrics ------------------------------------------------------------------

    def _require_root(self, key: int) -> int:
        i = self._resolve(key)
        if self._parent[i] != -1:
            raise NotARoot(f"{key!r} is not a root")
        return i

    def s_d(self, root_key: int) -> int:
        """Sum over the tree of each node's depth below the given root."""
        r = self._require_root(root_key)
        children = self._children
        total = 0
        stack = [(r, 0)]
        while stack:
            i, d = stack.pop()
            total += d
            for c in children[i]:
                stack.append((c, d + 1))
        return total

    def s_c(self, root_key: int) -> int:
        """Sum over tree edges of the smaller side produced by cutting the edge."""
        r = self._require_root(root_key)
        children = self._children
        size = self._size
        n = size[r]
        total = 0
        stack = list(children[r])
        while stack:
            i = stack.pop()
            s = size[i]
            total += s if s <= n - s else n - s
            stack.extend(children[i])
        return total

    def s_d_total(self) -> int:
        children = self._children
        total = 0
        for r in self._roots:
            stack = [(r, 0)]
            while stack:
                i, d = stack.pop()
                total += d
                for c in children[i]:
                    stack.append((c, d + 1))
        return total

    def s_c_total(self) -> int:
        children = self._children
        size = self._size
        total = 0
        for r in self._roots:
            n = size[r]
            stack = list(children[r])
            while stack:
                i = stack.pop()
                s = size[i]
                total += s if s <= n - s else n - s
                stack.extend(children[i])
        return total

    def depth_histogram(self, root_key: int) -> dict:
        """Map depth -> node count for one tree."""
        r = self._require_root(root_key)
        children = self._children
        hist: dict = {}
        stack = [(r, 0)]
        while stack:
            i, d = stack.pop()
            hist[d] = hist.get(d, 0) + 1
            for c in children[i]:
                stack.append((c, d + 1))
        return hist

    def depth_histogram_total(self) -> dict:
        children = self._children
        hist: dict = {}
        for r in self._roots:
            stack = [(r, 0)]
            while stack:
                i, d = stack.pop()
                hist[d] = hist.get(d, 0) + 1
                for c in children[i]:
                    stack.append((c, d + 1))
        return hist

    def centroid(self, root_key: int) -> int:
        """Vertex of the tree minimizing mean distance to all other vertices.

        Found by descending into any child holding strictly more than half
        of the tree; with two adjacent centroids the one nearer the current
        root is returned.
        """
        r = self._require_root(root_key)
        return self._key_of[self._centroid_descend(r)]

    def _centroid_descend(self, r: int) -> int:
        children = self._children
        size = self._size
        total = size[r]
        m = r
        while True:
            nxt = -1
            for c in children[m]:
                if 2 * size[c] > total:
                    nxt = c
                    break
            if nxt == -1:
                return m
            m = nxt

    def snapshot_metrics(self) -> tuple:
        """(s_d_total, s_c_total, n_components, n_vertices, n_edges)."""
        return (
            self.s_d_total(),
            self.s_c_total(),
            len(self._roots),
            len(self._id_of),
            self.n_edges(),
        )

    # -- introspection (validator, oracles, serialization) -------------------------

    def parent_of(self, key: int) -> Optional[int]:
        i = self._resolve(key)
        p = self._parent[i]
        return self._key_of[p] if p != -1 else None

    def children_of(self, key: int) -> list:
        i = self._resolve(key)
        key_of = self._key_of
        return [key_of[c] for c in self._children[i]]

    def nte_of(self, key: int) -> list:
        i = self._resolve(key)
        key_of = self._key_of
        return [key_of[x] for x in self._nte[i]]

    def size_of(self, key: int) -> int:
        return self._size[self._resolve(key)]

    def depth_of(self, key: int) -> int:
        return self._depth_of(self._resolve(key))

    def tree_edges(self) -> Iterator[tuple]:
        """Embedded tree edges as (min key, max key) pairs."""
        key_of = self._key_of
        parent = self._parent
        for key, i in self._id_of.items():
            p = parent[i]
            if p != -1:
                pk = key_of[p]
                yield (key, pk) if key < pk else (pk, key)

    def nontree_edges(self) -> Iterator[tuple]:
        """Embedded non-tree edges as (min key, max key) pairs."""
        key_of = self._key_of
        for key, i in self._id_of.items():
            for x in self._nte[i]:
                xk = key_of[x]
                if key < xk:
                    yield (key, xk)

    def edges(self) -> list:
        """All embedded edges, canonical (min, max) per pair."""
        out = list(self.tree_edges())
        out.extend(self.nontree_edges())
        return out

    # -- raw construction hooks (fixtures and fault injection) ---------------------

    def _raw_attach(self, parent_key: int, child_key: int) -> None:
        """Attach ``child`` (a root) below ``parent`` without rebalancing."""
        u = self._resolve(parent_key)
        v = self._resolve(child_key)
        if self._parent[v] != -1:
            raise NotARoot(f"{child_key!r} is not a root")
        r = self._root_of(u)
        if r == v:
            raise SameTree(f"{parent_key!r} and {child_key!r} are in the same tree")
        self._link(u, r, v, False)

    def _raw_add_nte(self, u_key: int, v_key: int) -> None:
        """Record a non-tree edge without any rewiring."""
        u = self._resolve(u_key)
        v = self._resolve(v_key)
        if v in self._nte[u] or self._parent[u] == v or self._parent[v] == u:
            raise EdgeExists(f"edge ({u_key!r}, {v_key!r}) already embedded")
        self._nte[u][v] = None
        self._nte[v][u] = None
        self._n_nte += 1

    def _raw_set_size(self, key: int, value: int) -> None:
        """Corrupt a stored size (validator tests only)."""
        self._size[self._resolve(key)] = value

    def validate(self):
        from .forest import validate_forest

        return validate_forest(self)
