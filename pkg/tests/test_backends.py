"""The pure and compiled cores must be bit-for-bit behaviorally identical."""

import random

import pytest

from dynconn.forest import available_backends, snapshot_structure

pytestmark = pytest.mark.skipif(
    len(available_backends()) < 2, reason="compiled core not built"
)


def drive(forest, ops):
    returns = []
    for op, args in ops:
        returns.append((op, getattr(forest, op)(*args)))
    return returns


def random_program(seed, n_keys=40, n_ops=1500):
    rng = random.Random(seed)
    live = set()
    present = set()
    ops = []
    for _ in range(n_ops):
        roll = rng.random()
        if roll < 0.08:
            k = rng.randrange(n_keys)
            if k not in present:
                ops.append(("add_vertex", (k,)))
                present.add(k)
        elif roll < 0.5 and len(present) >= 2:
            u, v = rng.sample(sorted(present), 2)
            pair = (min(u, v), max(u, v))
            ops.append(("insert_edge", (u, v)))
            live.add(pair)
        elif roll < 0.75 and live:
            u, v = rng.choice(sorted(live))
            live.discard((u, v))
            ops.append(("delete_edge", (u, v)))
        elif len(present) >= 2:
            u, v = rng.sample(sorted(present), 2)
            ops.append(("conn", (u, v)))
    return ops


@pytest.mark.parametrize("maintain", [True, False])
@pytest.mark.parametrize("seed", range(6))
def test_backends_equivalent(seed, maintain):
    backends = available_backends()
    ops = random_program(seed)
    forests = {name: cls(maintain=maintain) for name, cls in backends.items()}
    results = {name: drive(f, ops) for name, f in forests.items()}
    names = sorted(backends)
    base = names[0]
    for other in names[1:]:
        assert results[base] == results[other]
        assert snapshot_structure(forests[base]) == snapshot_structure(forests[other])
        # ordering-sensitive internals must match too, not just sorted views
        for k in forests[base].vertices():
            assert forests[base].children_of(k) == forests[other].children_of(k)
            assert forests[base].nte_of(k) == forests[other].nte_of(k)
        assert forests[base].roots() == forests[other].roots()


def test_backends_metrics_equivalent():
    backends = available_backends()
    ops = random_program(123, n_keys=25, n_ops=900)
    forests = {name: cls() for name, cls in backends.items()}
    for f in forests.values():
        drive(f, ops)
    vals = {name: f.snapshot_metrics() for name, f in forests.items()}
    assert len(set(vals.values())) == 1
    hists = {name: tuple(sorted(f.depth_histogram_total().items())) for name, f in forests.items()}
    assert len(set(hists.values())) == 1
