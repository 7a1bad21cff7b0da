"""Shared test utilities: random shapes, brute-force oracles, model graphs."""

import random

from dynconn.forest import build_forest


def random_tree_edges(n, rng):
    """Random labelled tree on keys 0..n-1, parent-before-child order."""
    edges = []
    for v in range(1, n):
        edges.append((rng.randrange(v), v))
    return edges


def random_forest(n, rng, *, backend=None, maintain=True, nte_count=0):
    """Random single-tree forest with optional random non-tree edges."""
    edges = random_tree_edges(n, rng)
    f = build_forest(edges, maintain=maintain, backend=backend,
                     extra_vertices=range(n))
    tree_pairs = {(min(a, b), max(a, b)) for a, b in edges}
    added = set()
    attempts = 0
    while len(added) < nte_count and attempts < nte_count * 20:
        attempts += 1
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v:
            continue
        pair = (min(u, v), max(u, v))
        if pair in tree_pairs or pair in added:
            continue
        f._raw_add_nte(u, v)
        added.add(pair)
    return f


def brute_depths(f, root):
    """Depth of every vertex of the tree at ``root`` via child traversal."""
    depths = {root: 0}
    stack = [root]
    while stack:
        k = stack.pop()
        for c in f.children_of(k):
            depths[c] = depths[k] + 1
            stack.append(c)
    return depths


def brute_cut_sum(f, root):
    """Per-edge brute force: remove each tree edge, count the smaller side."""
    depths = brute_depths(f, root)
    nodes = list(depths)
    total = len(nodes)

    def side_size(k):
        cnt = 1
        stack = [k]
        while stack:
            x = stack.pop()
            for c in f.children_of(x):
                cnt += 1
                stack.append(c)
        return cnt

    out = 0
    for k in nodes:
        if f.parent_of(k) is not None:
            s = side_size(k)
            out += min(s, total - s)
    return out


def model_components(edges_live, vertices):
    """Connected components of a plain edge set, as a frozenset of frozensets."""
    adj = {v: set() for v in vertices}
    for u, v in edges_live:
        adj[u].add(v)
        adj[v].add(u)
    seen = set()
    comps = []
    for v in vertices:
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(frozenset(comp))
    return frozenset(comps)


def random_ops_sequence(n_keys, n_ops, seed):
    """Mixed operation stream over a fixed key pool, as (op, u, v) tuples."""
    rng = random.Random(seed)
    live = set()
    ops = []
    for _ in range(n_ops):
        roll = rng.random()
        if live and roll < 0.35:
            u, v = rng.choice(sorted(live))
            ops.append(("delete", u, v))
            live.discard((u, v))
        else:
            u, v = rng.randrange(n_keys), rng.randrange(n_keys)
            if u == v:
                continue
            u, v = min(u, v), max(u, v)
            ops.append(("insert", u, v))
            live.add((u, v))
    return ops
