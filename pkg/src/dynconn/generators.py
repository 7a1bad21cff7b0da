"""Synthetic edge-stream generators for benchmarks and tests."""

from __future__ import annotations

import random
from typing import List, Tuple

from .errors import IndivisibleParameters
from .oracles import AdjacencyGraph


def gen_star_of_lines(k: int, n_total: int, start_t: int = 0):
    """Central vertex 0 with ``k`` attached paths of ``n_total / k`` vertices.

    The length of the paths controls the mean shortest-path length of the
    component: ``k == n_total`` gives a star (diameter 2), ``k == 1`` a single
    path.  Returns the adjacency graph and an insert-only stream with
    consecutive timestamps.
    """
    if k < 1 or n_total < 1:
        raise IndivisibleParameters("need k >= 1 and n_total >= 1")
    if n_total % k != 0:
        raise IndivisibleParameters(f"k={k} does not divide n_total={n_total}")
    length = n_total // k
    g = AdjacencyGraph()
    events: List[Tuple[int, int, int]] = []
    t = start_t
    for arm in range(k):
        prev = 0
        for step in range(length):
            v = 1 + arm * length + step
            g.add_edge(prev, v)
            events.append((prev, v, t))
            t += 1
            prev = v
    return g, events


def gen_random_dynamic(n: int, m: int, churn: float = 0.0, seed: int = 0,
                       start_t: int = 0, max_gap: int = 2) -> List[Tuple[int, int, int]]:
    """Uniform random simple-edge insertions with synthetic timestamps.

    ``churn`` is the probability that an event re-emits a previously emitted
    edge, which exercises the survival-rescheduling rule downstream.  Output
    is byte-deterministic for a given seed.
    """
    if n < 2:
        raise ValueError("need at least two vertices")
    if m < 1:
        raise ValueError("need at least one insertion")
    rng = random.Random(seed)
    events: List[Tuple[int, int, int]] = []
    emitted: List[Tuple[int, int]] = []
    t = start_t
    for _ in range(m):
        if emitted and rng.random() < churn:
            u, v = emitted[rng.randrange(len(emitted))]
        else:
            u = rng.randrange(n)
            v = rng.randrange(n - 1)
            if v >= u:
                v += 1
            if u > v:
                u, v = v, u
            emitted.append((u, v))
        events.append((u, v, t))
        t += rng.randrange(max_gap + 1)
    return events
