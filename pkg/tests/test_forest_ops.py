"""Unit tests for the forest operations, run against every built core."""

import random

import pytest

from dynconn import errors
from dynconn.forest import build_forest, snapshot_structure

from figures import D1_NTE, D1_TREE
from helpers import brute_depths, random_forest, random_tree_edges


def test_add_vertex_singleton(forest_cls):
    f = forest_cls()
    f.add_vertex(7)
    assert f.roots() == [7]
    assert f.size_of(7) == 1
    assert f.find_root(7) == (7, 0, None)


def test_add_vertex_duplicate(forest_cls):
    f = forest_cls()
    f.add_vertex(7)
    with pytest.raises(errors.DuplicateVertex):
        f.add_vertex(7)


def test_add_many_vertices_all_roots(forest_cls):
    f = forest_cls()
    for k in range(1, 101):
        f.add_vertex(k)
    assert sorted(f.roots()) == list(range(1, 101))
    assert all(f.size_of(k) == 1 for k in range(1, 101))
    assert f.validate() == []


def test_remove_vertex_isolated_only(forest_cls):
    f = forest_cls()
    f.add_vertex(1)
    f.add_vertex(2)
    f.insert_edge(1, 2)
    with pytest.raises(errors.VertexNotIsolated):
        f.remove_vertex(1)
    f.delete_edge(1, 2)
    f.remove_vertex(1)
    assert not f.has_vertex(1)
    assert f.roots() == [2]
    f.add_vertex(3)  # slot reuse keeps the arena consistent
    assert f.validate() == []


def test_unknown_vertex_errors(forest_cls):
    f = forest_cls()
    with pytest.raises(errors.UnknownVertex):
        f.find_root(1)
    with pytest.raises(errors.UnknownVertex):
        f.conn(1, 2)
    with pytest.raises(errors.UnknownVertex):
        f.reroot(1)


def test_find_root_on_fixture(backend):
    f = build_forest(D1_TREE, D1_NTE, backend=backend)
    assert f.find_root(5) == (1, 2, 3)
    assert f.find_root(1) == (1, 0, None)
    assert f.find_root(6) == (1, 2, 4)


def test_find_root_depth_matches_bfs(backend):
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randrange(2, 60)
        f = random_forest(n, rng, backend=backend)
        depths = brute_depths(f, f.roots()[0])
        for k in range(n):
            assert f.find_root(k).depth == depths[k]


def test_reroot_noop_on_root(backend):
    f = build_forest(D1_TREE, D1_NTE, backend=backend)
    before = snapshot_structure(f)
    assert f.reroot(1) == 1
    assert snapshot_structure(f) == before


def test_reroot_preserves_edges_and_sizes(backend):
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randrange(2, 40)
        f = random_forest(n, rng, backend=backend, nte_count=rng.randrange(3))
        edges_before = sorted(f.edges())
        target = rng.randrange(n)
        f.reroot(target)
        assert f.parent_of(target) is None
        assert sorted(f.edges()) == edges_before
        assert f.validate() == []


def test_link_two_singletons(forest_cls):
    f = forest_cls()
    f.add_vertex(1)
    f.add_vertex(2)
    assert f.link(1, 1, 2) == 1
    assert f.size_of(1) == 2
    assert f.parent_of(2) == 1
    assert f.validate() == []


def test_link_errors(backend):
    f = build_forest(D1_TREE, backend=backend)
    f.add_vertex(99)
    with pytest.raises(errors.NotARoot):
        f.link(1, 1, 5)      # 5 is not a root
    with pytest.raises(errors.NotARoot):
        f.link(5, 3, 99)     # 3 is not the root of 5's tree
    with pytest.raises(errors.SameTree):
        f.link(5, 1, 1)


def test_link_no_heavy_path_child_after(backend):
    # after a merge, no former attach-path node that ends up directly under
    # the returned root may hold more than half of the merged tree
    rng = random.Random(23)
    for _ in range(100):
        na, nb = rng.randrange(1, 25), rng.randrange(1, 25)
        f = random_forest(na, rng, backend=backend)
        attach_at = rng.randrange(na)
        for k in range(nb):
            f.add_vertex(100 + k)
        for p, c in random_tree_edges(nb, rng):
            f._raw_attach(100 + p, 100 + c)
        path = [attach_at]
        while f.parent_of(path[-1]) is not None:
            path.append(f.parent_of(path[-1]))
        new_root = f.link(attach_at, path[-1], 100)
        total = f.size_of(new_root)
        for node in path:
            if node != new_root and f.parent_of(node) == new_root:
                assert 2 * f.size_of(node) <= total
        assert f.validate() == []


def test_unlink_two_node_tree(forest_cls):
    f = forest_cls()
    f.add_vertex(1)
    f.add_vertex(2)
    f.link(1, 1, 2)
    assert f.unlink(2) == (2, 1)
    assert f.size_of(1) == 1 and f.size_of(2) == 1
    assert sorted(f.roots()) == [1, 2]
    with pytest.raises(errors.IsRoot):
        f.unlink(1)


def test_unlink_revalidates_sizes(backend):
    rng = random.Random(7)
    for _ in range(100):
        n = rng.randrange(2, 40)
        f = random_forest(n, rng, backend=backend)
        target = rng.randrange(1, n)
        if f.parent_of(target) is None:
            continue
        f.unlink(target)
        assert f.parent_of(target) is None
        assert f.validate() == []


def test_conn_reflexive_and_components(backend):
    f = build_forest(D1_TREE, D1_NTE, backend=backend)
    for p, c in [(9, 10), (9, 11), (10, 12)]:
        if not f.has_vertex(p):
            f.add_vertex(p)
        f.add_vertex(c)
        f._raw_attach(p, c)
    assert f.conn(2, 6) is True
    assert f.conn(6, 9) is False
    assert f.conn(4, 4) is True
    assert f.n_components() == 2


def test_conn_restores_heavy_gate_child(forest_cls):
    # a long chain walked from its deep end pulls the gate child up
    f = forest_cls()
    f.add_vertex(0)
    for k in range(1, 10):
        f.add_vertex(k)
        f._raw_attach(k - 1, k)
    assert f.find_root(9).root == 0
    assert f.conn(9, 0) is True
    # gate child 1 held 9 of 10 nodes, so it must now be the root
    assert f.find_root(0).root == 1
    assert f.validate() == []


def test_conn_no_restore_when_naive(forest_cls):
    f = forest_cls(maintain=False)
    f.add_vertex(0)
    for k in range(1, 10):
        f.add_vertex(k)
        f._raw_attach(k - 1, k)
    assert f.conn(9, 0) is True
    assert f.find_root(0).root == 0


def test_insert_edge_selfloop(forest_cls):
    f = forest_cls()
    with pytest.raises(errors.SelfLoop):
        f.insert_edge(3, 3)


def test_insert_edge_autocreates_and_dispatches(forest_cls):
    f = forest_cls()
    assert f.insert_edge(1, 2) == "te"
    assert f.insert_edge(2, 3) == "te"
    assert f.insert_edge(1, 3) == "nte"
    assert f.insert_edge(1, 3) == "noop"
    assert f.insert_edge(3, 1) == "noop"
    assert f.n_edges() == 3
    assert f.validate() == []


def test_insert_edge_embedded_set_matches_inserted(backend):
    rng = random.Random(3)
    from dynconn.forest import make_forest

    f = make_forest(backend=backend)
    inserted = set()
    for _ in range(400):
        u, v = rng.randrange(30), rng.randrange(30)
        if u == v:
            continue
        f.insert_edge(u, v)
        inserted.add((min(u, v), max(u, v)))
    assert sorted(f.edges()) == sorted(inserted)
    assert f.validate() == []


def test_insert_nte_sibling_case(backend):
    f = build_forest([(1, 2), (1, 3)], backend=backend)
    before_edges = sorted(f.tree_edges())
    f.insert_nte(2, 3, 1)
    assert sorted(f.tree_edges()) == before_edges
    assert f.nte_of(2) == [3] and f.nte_of(3) == [2]
    with pytest.raises(errors.EdgeExists):
        f.insert_nte(2, 3, 1)


def test_insert_nte_wrong_tree(backend):
    f = build_forest([(1, 2)], extra_vertices=[5], backend=backend)
    with pytest.raises(errors.NotSameTree):
        f.insert_nte(1, 5, 1)


def test_insert_te_merges_sizes(forest_cls):
    f = forest_cls()
    f.add_vertex(1)
    f.add_vertex(2)
    root = f.insert_te(1, 2, 1, 2)
    assert f.size_of(root) == 2
    assert f.n_components() == 1
    with pytest.raises(errors.SameTree):
        f.insert_te(1, 2, root, root)


def test_insert_te_random_merges(backend):
    rng = random.Random(17)
    from dynconn.forest import make_forest

    for _ in range(50):
        f = make_forest(backend=backend)
        na, nb = rng.randrange(1, 20), rng.randrange(1, 20)
        for k in range(na):
            f.add_vertex(k)
        for p, c in random_tree_edges(na, rng):
            f._raw_attach(p, c)
        for k in range(100, 100 + nb):
            f.add_vertex(k)
        for p, c in random_tree_edges(nb, rng):
            f._raw_attach(100 + p, 100 + c)
        u = rng.randrange(na)
        v = 100 + rng.randrange(nb)
        ru, rv = f.find_root(u).root, f.find_root(v).root
        roots_before = set(f.roots())
        merged = f.insert_te(u, v, ru, rv)
        assert f.size_of(merged) == na + nb
        assert set(f.roots()) == (roots_before - {ru, rv}) | {merged}
        assert f.validate() == []


def test_delete_edge_two_node_split(forest_cls):
    f = forest_cls()
    f.insert_edge(1, 2)
    out = f.delete_edge(1, 2)
    assert out.kind == "tree" and out.split
    assert sorted(out.roots) == [1, 2]
    assert sorted(f.roots()) == [1, 2]


def test_delete_edge_missing(forest_cls):
    f = forest_cls()
    f.insert_edge(1, 2)
    with pytest.raises(errors.NoSuchEdge):
        f.delete_edge(1, 5)
    with pytest.raises(errors.NoSuchEdge):
        f.delete_edge(5, 6)


def test_delete_nte_symmetry_and_errors(backend):
    f = build_forest(D1_TREE, D1_NTE, backend=backend)
    f.delete_nte(2, 5)
    assert f.nte_of(2) == []
    assert f.nte_of(5) == [4]
    with pytest.raises(errors.NoSuchEdge):
        f.delete_nte(2, 5)
    assert f.validate() == []


def test_delete_te_requires_tree_edge(backend):
    f = build_forest(D1_TREE, D1_NTE, backend=backend)
    with pytest.raises(errors.NotTreeEdge):
        f.delete_te(2, 5)  # embedded, but as a non-tree edge


def test_delete_te_accepts_either_order(backend):
    for order in [(1, 4), (4, 1)]:
        f = build_forest(D1_TREE, D1_NTE, backend=backend)
        out = f.delete_edge(*order)
        assert out.kind == "tree" and not out.split
        assert out.roots == (3,)


def test_delete_edge_split_matches_component_count(backend):
    rng = random.Random(29)
    from dynconn.forest import make_forest

    from helpers import model_components

    f = make_forest(backend=backend)
    live = set()
    for k in range(25):
        f.add_vertex(k)
    for _ in range(500):
        if live and rng.random() < 0.45:
            u, v = rng.choice(sorted(live))
            live.discard((u, v))
            before = len(model_components(live | {(u, v)}, range(25)))
            after = len(model_components(live, range(25)))
            out = f.delete_edge(u, v)
            if out.kind == "tree":
                assert out.split == (after > before)
            else:
                assert after == before
        else:
            u, v = rng.randrange(25), rng.randrange(25)
            if u == v:
                continue
            f.insert_edge(u, v)
            live.add((min(u, v), max(u, v)))
        assert f.validate() == []
