# distutils: language = c++
"""Compiled forest core.

Behaviorally identical to ``dynconn._pycore`` (same algorithms, same
deterministic iteration orders); parent pointers and subtree sizes live in
C arrays so the hot traversals compile to tight loops.
"""

from libcpp.vector cimport vector

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

COMPILED = True


cdef class Forest:
    """Spanning forest of a dynamic graph; see dynconn._pycore.Forest."""

    cdef bint _maintain
    cdef list _key_of          # id -> key object (None for freed slots)
    cdef vector[long long] _parent
    cdef vector[long long] _size
    cdef list _children        # id -> ordered dict {child id: None}
    cdef list _nte             # id -> ordered dict {neighbor id: None}
    cdef dict _id_of           # key -> id
    cdef dict _roots           # ordered set of root ids
    cdef list _free
    cdef long long _n_nte

    def __init__(self, maintain=True):
        self._maintain = bool(maintain)
        self._key_of = []
        self._children = []
        self._nte = []
        self._id_of = {}
        self._roots = {}
        self._free = []
        self._n_nte = 0

    # -- bookkeeping -----------------------------------------------------

    @property
    def maintain(self):
        return self._maintain

    @property
    def backend(self):
        return "compiled"

    def __len__(self):
        return len(self._id_of)

    def __contains__(self, key):
        return key in self._id_of

    def has_vertex(self, key):
        return key in self._id_of

    def n_vertices(self):
        return len(self._id_of)

    def n_components(self):
        return len(self._roots)

    def n_edges(self):
        return (len(self._id_of) - len(self._roots)) + self._n_nte

    def vertices(self):
        return list(self._id_of.keys())

    def roots(self):
        key_of = self._key_of
        return [key_of[i] for i in self._roots]

    cdef long long _resolve(self, key) except -2:
        cdef object i = self._id_of.get(key)
        if i is None:
            raise UnknownVertex(f"vertex {key!r} not in forest")
        return <long long> i

    # -- vertex maintenance ----------------------------------------------

    def add_vertex(self, key):
        if key in self._id_of:
            raise DuplicateVertex(f"vertex {key!r} already present")
        self._add_vertex(key)

    cdef long long _add_vertex(self, key):
        cdef long long i
        if self._free:
            i = <long long> self._free.pop()
            self._key_of[i] = key
            self._parent[i] = -1
            self._size[i] = 1
            self._children[i] = {}
            self._nte[i] = {}
        else:
            i = <long long> len(self._key_of)
            self._key_of.append(key)
            self._parent.push_back(-1)
            self._size.push_back(1)
            self._children.append({})
            self._nte.append({})
        self._id_of[key] = i
        self._roots[i] = None
        return i

    def remove_vertex(self, key):
        """Remove an isolated vertex; vertices with incident edges are refused."""
        cdef long long i = self._resolve(key)
        if self._parent[i] != -1 or (<dict> self._children[i]) or (<dict> self._nte[i]):
            raise VertexNotIsolated(f"vertex {key!r} still has incident edges")
        del self._id_of[key]
        del self._roots[i]
        self._key_of[i] = None
        self._free.append(i)

    # -- traversal --------------------------------------------------------

    def find_root(self, key):
        """Walk parent pointers to the component root; does not mutate."""
        cdef long long i = self._resolve(key)
        cdef long long gate = -1
        cdef long long depth = 0
        while self._parent[i] != -1:
            gate = i
            i = self._parent[i]
            depth += 1
        return RootInfo(
            self._key_of[i], depth, self._key_of[gate] if gate != -1 else None
        )

    cdef long long _root_of(self, long long i):
        while self._parent[i] != -1:
            i = self._parent[i]
        return i

    cdef long long _depth_of_c(self, long long i):
        cdef long long d = 0
        while self._parent[i] != -1:
            i = self._parent[i]
            d += 1
        return d

    # -- restructuring primitives -----------------------------------------

    def reroot(self, key):
        """Make the given vertex the root of its tree; returns its key."""
        cdef long long w = self._resolve(key)
        self._reroot(w)
        return key

    cdef long long _reroot(self, long long w):
        cdef long long ch, cur, g, p
        ch = w
        cur = self._parent[w]
        if cur == -1:
            return w
        self._parent[w] = -1
        while cur != -1:
            g = self._parent[cur]
            self._parent[cur] = ch
            del (<dict> self._children[cur])[ch]
            (<dict> self._children[ch])[cur] = None
            ch = cur
            cur = g
        del self._roots[ch]
        self._roots[w] = None
        while self._parent[ch] != -1:
            p = self._parent[ch]
            self._size[ch] -= self._size[p]
            self._size[p] += self._size[ch]
            ch = p
        return w

    def link(self, u_key, r_u_key, v_key):
        """Attach the tree rooted at v below u; returns the final root key."""
        cdef long long u = self._resolve(u_key)
        cdef long long r_u = self._resolve(r_u_key)
        cdef long long v = self._resolve(v_key)
        if self._parent[v] != -1:
            raise NotARoot(f"{v_key!r} is not a root")
        if self._parent[r_u] != -1 or self._root_of(u) != r_u:
            raise NotARoot(f"{r_u_key!r} is not the root of {u_key!r}'s tree")
        if r_u == v:
            raise SameTree(f"{u_key!r} and {v_key!r} are in the same tree")
        return self._key_of[self._link(u, r_u, v, self._maintain)]

    cdef long long _link(self, long long u, long long r_u, long long v, bint restore):
        cdef long long vsz, total, m, i
        (<dict> self._children[u])[v] = None
        self._parent[v] = u
        del self._roots[v]
        vsz = self._size[v]
        total = self._size[r_u] + vsz
        m = -1
        i = u
        while i != -1:
            self._size[i] += vsz
            if restore and m == -1 and i != r_u and 2 * self._size[i] > total:
                m = i
            i = self._parent[i]
        if m != -1:
            return self._reroot(m)
        return r_u

    def unlink(self, key):
        """Detach a non-root vertex from its parent; returns (key, former root key)."""
        cdef long long v = self._resolve(key)
        if self._parent[v] == -1:
            raise IsRoot(f"{key!r} is a root")
        cdef long long r = self._unlink(v)
        return (self._key_of[v], self._key_of[r])

    cdef long long _unlink(self, long long v):
        cdef long long vsz = self._size[v]
        cdef long long i = v
        cdef long long p
        while self._parent[i] != -1:
            i = self._parent[i]
            self._size[i] -= vsz
        p = self._parent[v]
        del (<dict> self._children[p])[v]
        self._parent[v] = -1
        self._roots[v] = None
        return i

    # -- connectivity -------------------------------------------------------

    def conn(self, u_key, v_key):
        """True iff both vertices are in the same tree (may reroot as repair)."""
        cdef long long u = self._resolve(u_key)
        cdef long long v = self._resolve(v_key)
        cdef long long r_u = 0, r_v = 0
        return self._conn_impl(u, v, &r_u, &r_v)

    def conn_batch(self, u_keys, v_keys):
        """Vectorized ``conn``; answers one boolean per pair."""
        cdef dict id_of = self._id_of
        cdef list out = []
        cdef long long u, v, r_u, r_v
        for u_key, v_key in zip(u_keys, v_keys):
            iu = id_of.get(u_key)
            iv = id_of.get(v_key)
            if iu is None or iv is None:
                raise UnknownVertex("unknown vertex in batch")
            u = <long long> iu
            v = <long long> iv
            out.append(self._conn_impl(u, v, &r_u, &r_v))
        return out

    cdef long long _walk_c(self, long long i, long long* gate):
        cdef long long d = -1
        while self._parent[i] != -1:
            d = i
            i = self._parent[i]
        gate[0] = d
        return i

    cdef long long _repair(self, long long root, long long gate):
        if self._maintain and gate != -1 and 2 * self._size[gate] > self._size[root]:
            return self._reroot(gate)
        return root

    cdef bint _conn_impl(self, long long u, long long v, long long* r_u_out, long long* r_v_out):
        cdef long long gate = 0
        cdef long long r_u, r_v
        cdef bint same
        r_u = self._walk_c(u, &gate)
        r_u = self._repair(r_u, gate)
        r_v = self._walk_c(v, &gate)
        same = r_v == r_u
        r_v = self._repair(r_v, gate)
        if same:
            r_u = r_v
        r_u_out[0] = r_u
        r_v_out[0] = r_v
        return same

    # -- edge insertion -------------------------------------------------------

    def insert_edge(self, u_key, v_key):
        """Insert an undirected edge, creating missing vertices.

        Returns the path taken: "te", "nte" or "noop".
        """
        if u_key == v_key:
            raise SelfLoop(f"self loop at {u_key!r}")
        cdef dict id_of = self._id_of
        iu = id_of.get(u_key)
        iv = id_of.get(v_key)
        cdef long long u = self._add_vertex(u_key) if iu is None else <long long> iu
        cdef long long v = self._add_vertex(v_key) if iv is None else <long long> iv
        if v in (<dict> self._nte[u]) or self._parent[u] == v or self._parent[v] == u:
            return "noop"
        cdef long long r_u = 0, r_v = 0
        cdef bint same = self._conn_impl(u, v, &r_u, &r_v)
        if same:
            self._insert_nte(u, v, r_v)
            return "nte"
        self._insert_te(u, v, r_u, r_v)
        return "te"

    def insert_nte(self, u_key, v_key, r_key):
        """Embed a non-tree edge between two vertices of the same tree."""
        cdef long long u = self._resolve(u_key)
        cdef long long v = self._resolve(v_key)
        cdef long long r = self._resolve(r_key)
        if self._parent[r] != -1 or self._root_of(u) != r or self._root_of(v) != r:
            raise NotSameTree(f"{u_key!r} and {v_key!r} are not both in the tree of {r_key!r}")
        if v in (<dict> self._nte[u]) or self._parent[u] == v or self._parent[v] == u:
            raise EdgeExists(f"edge ({u_key!r}, {v_key!r}) already embedded")
        return self._key_of[self._insert_nte(u, v, r)]

    cdef long long _insert_nte(self, long long u, long long v, long long r):
        cdef long long du, dv, l, h, delta, i, p
        cdef long long x
        if self._maintain:
            du = self._depth_of_c(u)
            dv = self._depth_of_c(v)
            if du <= dv:
                l = u
                h = v
                delta = dv - du
            else:
                l = v
                h = u
                delta = du - dv
        else:
            delta = 0
        if delta < 2:
            (<dict> self._nte[u])[v] = None
            (<dict> self._nte[v])[u] = None
            self._n_nte += 1
            return r
        i = h
        for x in range(delta - 2):
            i = self._parent[i]
        p = self._parent[i]
        (<dict> self._nte[i])[p] = None
        (<dict> self._nte[p])[i] = None
        self._n_nte += 1
        self._unlink(i)
        self._reroot(h)
        return self._link(l, r, h, True)

    def insert_te(self, u_key, v_key, r_u_key, r_v_key):
        """Merge two trees with a new tree edge (u, v); returns the merged root key."""
        cdef long long u = self._resolve(u_key)
        cdef long long v = self._resolve(v_key)
        cdef long long r_u = self._resolve(r_u_key)
        cdef long long r_v = self._resolve(r_v_key)
        if self._parent[r_u] != -1 or self._root_of(u) != r_u:
            raise NotARoot(f"{r_u_key!r} is not the root of {u_key!r}'s tree")
        if self._parent[r_v] != -1 or self._root_of(v) != r_v:
            raise NotARoot(f"{r_v_key!r} is not the root of {v_key!r}'s tree")
        if r_u == r_v:
            raise SameTree(f"{u_key!r} and {v_key!r} are already connected")
        return self._key_of[self._insert_te(u, v, r_u, r_v)]

    cdef long long _insert_te(self, long long u, long long v, long long r_u, long long r_v):
        if self._size[r_u] < self._size[r_v]:
            return self._link(v, r_v, self._reroot(u), self._maintain)
        return self._link(u, r_u, self._reroot(v), self._maintain)

    # -- edge deletion ----------------------------------------------------------

    def delete_edge(self, u_key, v_key):
        """Remove an embedded edge, dispatching on tree vs non-tree."""
        cdef dict id_of = self._id_of
        iu = id_of.get(u_key)
        iv = id_of.get(v_key)
        if iu is None or iv is None:
            raise NoSuchEdge(f"edge ({u_key!r}, {v_key!r}) not embedded")
        cdef long long u = <long long> iu
        cdef long long v = <long long> iv
        if v in (<dict> self._nte[u]):
            self._delete_nte(u, v)
            return DeleteOutcome("nontree", False, ())
        if self._parent[v] == u or self._parent[u] == v:
            return self._delete_te(u, v)
        raise NoSuchEdge(f"edge ({u_key!r}, {v_key!r}) not embedded")

    def delete_nte(self, u_key, v_key):
        """Remove a non-tree edge; O(1), the tree is untouched."""
        cdef long long u = self._resolve(u_key)
        cdef long long v = self._resolve(v_key)
        if v not in (<dict> self._nte[u]):
            raise NoSuchEdge(f"({u_key!r}, {v_key!r}) is not an embedded non-tree edge")
        self._delete_nte(u, v)

    cdef void _delete_nte(self, long long u, long long v):
        del (<dict> self._nte[u])[v]
        del (<dict> self._nte[v])[u]
        self._n_nte -= 1

    def delete_te(self, u_key, v_key):
        """Remove a tree edge, searching the smaller side for a replacement."""
        cdef long long u = self._resolve(u_key)
        cdef long long v = self._resolve(v_key)
        if self._parent[v] != u and self._parent[u] != v:
            raise NotTreeEdge(f"({u_key!r}, {v_key!r}) is not a tree edge")
        return self._delete_te(u, v)

    cdef object _delete_te(self, long long u, long long v):
        cdef long long ch, r, r_s, r_l, best_u, best_v, best_depth
        cdef long long x, y, rr, d, new_root, m
        cdef bint maintain = self._maintain
        cdef list queue
        cdef Py_ssize_t qi
        ch = v if self._parent[v] == u else u
        r = self._unlink(ch)
        if self._size[ch] < self._size[r]:
            r_s = ch
            r_l = r
        else:
            r_s = r
            r_l = ch
        best_u = -1
        best_v = -1
        best_depth = 0
        queue = [r_s]
        qi = 0
        while qi < len(queue):
            x = <long long> queue[qi]
            qi += 1
            for y_obj in (<dict> self._nte[x]):
                y = <long long> y_obj
                rr = y
                d = 0
                while self._parent[rr] != -1:
                    rr = self._parent[rr]
                    d += 1
                if rr == r_l and (best_u == -1 or d < best_depth):
                    best_u = x
                    best_v = y
                    best_depth = d
                    if not maintain:
                        break
            if best_u != -1 and not maintain:
                break
            queue.extend(<dict> self._children[x])
        if best_u == -1:
            if maintain:
                m = self._centroid_descend(r_s)
                if m != r_s:
                    r_s = self._reroot(m)
            return DeleteOutcome("tree", True, (self._key_of[r_s], self._key_of[r_l]))
        self._delete_nte(best_u, best_v)
        new_root = self._insert_te(best_u, best_v, r_s, r_l)
        return DeleteOutcome("tree", False, (self._key_of[new_root],))

    # -- metrics ------------------------------------------------------------------

    cdef long long _require_root(self, key) except -2:
        cdef long long i = self._resolve(key)
        if self._parent[i] != -1:
            raise NotARoot(f"{key!r} is not a root")
        return i

    cdef long long _s_d_tree(self, long long r):
        cdef vector[long long] stack_node
        cdef vector[long long] stack_depth
        cdef long long total = 0, i, d
        stack_node.push_back(r)
        stack_depth.push_back(0)
        while stack_node.size() > 0:
            i = stack_node.back()
            stack_node.pop_back()
            d = stack_depth.back()
            stack_depth.pop_back()
            total += d
            for c_obj in (<dict> self._children[i]):
                stack_node.push_back(<long long> c_obj)
                stack_depth.push_back(d + 1)
        return total

    cdef long long _s_c_tree(self, long long r):
        cdef vector[long long] stack
        cdef long long total = 0, n, i, s
        n = self._size[r]
        for c_obj in (<dict> self._children[r]):
            stack.push_back(<long long> c_obj)
        while stack.size() > 0:
            i = stack.back()
            stack.pop_back()
            s = self._size[i]
            total += s if s <= n - s else n - s
            for c_obj in (<dict> self._children[i]):
                stack.push_back(<long long> c_obj)
        return total

    def s_d(self, root_key):
        """Sum over the tree of each node's depth below the given root."""
        return self._s_d_tree(self._require_root(root_key))

    def s_c(self, root_key):
        """Sum over tree edges of the smaller side produced by cutting the edge."""
        return self._s_c_tree(self._require_root(root_key))

    def s_d_total(self):
        cdef long long total = 0
        for r in self._roots:
            total += self._s_d_tree(<long long> r)
        return total

    def s_c_total(self):
        cdef long long total = 0
        for r in self._roots:
            total += self._s_c_tree(<long long> r)
        return total

    cdef void _hist_tree(self, long long r, dict hist):
        cdef vector[long long] stack_node
        cdef vector[long long] stack_depth
        cdef long long i, d
        stack_node.push_back(r)
        stack_depth.push_back(0)
        while stack_node.size() > 0:
            i = stack_node.back()
            stack_node.pop_back()
            d = stack_depth.back()
            stack_depth.pop_back()
            hist[d] = hist.get(d, 0) + 1
            for c_obj in (<dict> self._children[i]):
                stack_node.push_back(<long long> c_obj)
                stack_depth.push_back(d + 1)

    def depth_histogram(self, root_key):
        """Map depth -> node count for one tree."""
        cdef dict hist = {}
        self._hist_tree(self._require_root(root_key), hist)
        return hist

    def depth_histogram_total(self):
        cdef dict hist = {}
        for r in self._roots:
            self._hist_tree(<long long> r, hist)
        return hist

    def centroid(self, root_key):
        """Vertex of the tree minimizing mean distance to all other vertices."""
        cdef long long r = self._require_root(root_key)
        return self._key_of[self._centroid_descend(r)]

    cdef long long _centroid_descend(self, long long r):
        cdef long long total = self._size[r]
        cdef long long m = r
        cdef long long nxt
        while True:
            nxt = -1
            for c_obj in (<dict> self._children[m]):
                if 2 * self._size[<long long> c_obj] > total:
                    nxt = <long long> c_obj
                    break
            if nxt == -1:
                return m
            m = nxt

    def snapshot_metrics(self):
        """(s_d_total, s_c_total, n_components, n_vertices, n_edges)."""
        return (
            self.s_d_total(),
            self.s_c_total(),
            len(self._roots),
            len(self._id_of),
            self.n_edges(),
        )

    # -- introspection ----------------------------------------------------------

    def parent_of(self, key):
        cdef long long i = self._resolve(key)
        cdef long long p = self._parent[i]
        return self._key_of[p] if p != -1 else None

    def children_of(self, key):
        cdef long long i = self._resolve(key)
        key_of = self._key_of
        return [key_of[c] for c in (<dict> self._children[i])]

    def nte_of(self, key):
        cdef long long i = self._resolve(key)
        key_of = self._key_of
        return [key_of[x] for x in (<dict> self._nte[i])]

    def size_of(self, key):
        return self._size[self._resolve(key)]

    def depth_of(self, key):
        return self._depth_of_c(self._resolve(key))

    def tree_edges(self):
        """Embedded tree edges as (min key, max key) pairs."""
        key_of = self._key_of
        cdef long long p
        for key, i in self._id_of.items():
            p = self._parent[<long long> i]
            if p != -1:
                pk = key_of[p]
                yield (key, pk) if key < pk else (pk, key)

    def nontree_edges(self):
        """Embedded non-tree edges as (min key, max key) pairs."""
        key_of = self._key_of
        for key, i in self._id_of.items():
            for x in (<dict> self._nte[<long long> i]):
                xk = key_of[x]
                if key < xk:
                    yield (key, xk)

    def edges(self):
        """All embedded edges, canonical (min, max) per pair."""
        out = list(self.tree_edges())
        out.extend(self.nontree_edges())
        return out

    # -- raw construction hooks ----------------------------------------------------

    def _raw_attach(self, parent_key, child_key):
        """Attach ``child`` (a root) below ``parent`` without rebalancing."""
        cdef long long u = self._resolve(parent_key)
        cdef long long v = self._resolve(child_key)
        if self._parent[v] != -1:
            raise NotARoot(f"{child_key!r} is not a root")
        cdef long long r = self._root_of(u)
        if r == v:
            raise SameTree(f"{parent_key!r} and {child_key!r} are in the same tree")
        self._link(u, r, v, False)

    def _raw_add_nte(self, u_key, v_key):
        """Record a non-tree edge without any rewiring."""
        cdef long long u = self._resolve(u_key)
        cdef long long v = self._resolve(v_key)
        if v in (<dict> self._nte[u]) or self._parent[u] == v or self._parent[v] == u:
            raise EdgeExists(f"edge ({u_key!r}, {v_key!r}) already embedded")
        (<dict> self._nte[u])[v] = None
        (<dict> self._nte[v])[u] = None
        self._n_nte += 1

    def _raw_set_size(self, key, value):
        """Corrupt a stored size (validator tests only)."""
        self._size[self._resolve(key)] = <long long> value

    def validate(self):
        from .forest import validate_forest

        return validate_forest(self)
