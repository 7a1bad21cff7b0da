"""Workload engine: edge streams, survival-time schedules, replay, metrics.

A raw stream is a time-ordered list of edge insertions ``(u, v, t)``.  The
scheduler assigns every insert a survival time: the edge dies ``t_d`` ticks
after its latest insertion, and re-inserting a live edge merely reschedules
its deletion.  Replay drives any structure exposing the small protocol
(insert_edge / delete_edge / conn / snapshot_metrics), timing each call and
evaluating query batteries at uniformly spaced snapshots.
"""

from __future__ import annotations

import hashlib
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .errors import (
    DynConnError,
    EmptyStream,
    ParseError,
    ReplayError,
    VerificationError,
)
from .oracles import ComponentTracker

INSERT = "insert"
DELETE = "delete"

ALL_PAIRS_VERTEX_LIMIT = 10_000
OP_CLASSES = ("insert_te", "insert_nte", "delete_te", "delete_nte", "noop")
_MASK64 = (1 << 64) - 1


class EdgeEvent(NamedTuple):
    u: int
    v: int
    t: int
    op: str


# -- stream files ---------------------------------------------------------------


def parse_stream(source) -> List[Tuple[int, int, int]]:
    """Read a raw insertion stream: one ``<u> <v> <t>`` triple per line.

    Lines starting with ``#`` and blank lines are skipped.  Timestamps need
    not be monotone (scheduling sorts).  Malformed lines raise ParseError
    with their line number.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return _parse_lines(fh)
    if isinstance(source, io.TextIOBase) or hasattr(source, "read"):
        return _parse_lines(source)
    return _parse_lines(iter(source))


def _parse_lines(lines) -> List[Tuple[int, int, int]]:
    out = []
    for line_no, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) != 3:
            raise ParseError(f"expected 3 fields, got {len(parts)}", line_no)
        try:
            u, v, t = (int(p) for p in parts)
        except ValueError:
            raise ParseError(f"non-integer field in {text!r}", line_no) from None
        if u < 0 or v < 0 or t < 0:
            raise ParseError("negative values not allowed", line_no)
        if u == v:
            raise ParseError(f"self loop at vertex {u}", line_no)
        out.append((u, v, t))
    return out


def serialize_stream(events: Iterable[Tuple[int, int, int]], dest) -> None:
    """Write a raw insertion stream in the format parse_stream reads."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as fh:
            for u, v, t in events:
                fh.write(f"{u} {v} {t}\n")
        return
    for u, v, t in events:
        dest.write(f"{u} {v} {t}\n")


# -- scheduling -------------------------------------------------------------------


@dataclass(frozen=True)
class WorkloadSchedule:
    """Executable event sequence plus snapshot times and provenance."""

    events: Tuple[EdgeEvent, ...]
    snapshots: Tuple[int, ...]
    survival: int
    test_num: int
    seed: int = 0

    def has_deletes(self) -> bool:
        return any(ev.op == DELETE for ev in self.events)

    def digest(self) -> str:
        """Hash identifying the schedule (events, snapshots, parameters)."""
        h = hashlib.sha256()
        h.update(f"{self.survival}|{self.test_num}|".encode())
        h.update(",".join(map(str, self.snapshots)).encode())
        for ev in self.events:
            h.update(f"{ev.op[0]}{ev.u},{ev.v},{ev.t};".encode())
        return h.hexdigest()

    def save(self, dest) -> None:
        """Line-delimited text: header comments, then one ``op u v t`` per line."""
        lines = [
            f"# survival {self.survival}",
            f"# test_num {self.test_num}",
            f"# seed {self.seed}",
            "# snapshots " + " ".join(map(str, self.snapshots)),
        ]
        lines.extend(f"{'i' if ev.op == INSERT else 'd'} {ev.u} {ev.v} {ev.t}" for ev in self.events)
        text = "\n".join(lines) + "\n"
        if isinstance(dest, (str, Path)):
            Path(dest).write_text(text, encoding="utf-8")
        else:
            dest.write(text)

    @classmethod
    def load(cls, source) -> "WorkloadSchedule":
        text = Path(source).read_text(encoding="utf-8") if isinstance(source, (str, Path)) else source.read()
        survival = test_num = seed = 0
        snapshots: Tuple[int, ...] = ()
        events = []
        for line_no, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if not parts:
                    continue
                if parts[0] == "survival":
                    survival = int(parts[1])
                elif parts[0] == "test_num":
                    test_num = int(parts[1])
                elif parts[0] == "seed":
                    seed = int(parts[1])
                elif parts[0] == "snapshots":
                    snapshots = tuple(int(x) for x in parts[1:])
                continue
            parts = line.split()
            if len(parts) != 4 or parts[0] not in ("i", "d"):
                raise ParseError(f"bad schedule line {line!r}", line_no)
            events.append(
                EdgeEvent(int(parts[1]), int(parts[2]), int(parts[3]),
                          INSERT if parts[0] == "i" else DELETE)
            )
        return cls(tuple(events), snapshots, survival, test_num, seed)


def schedule(raw: Sequence[Tuple[int, int, int]], t_d: Optional[int], test_num: int,
             seed: int = 0) -> WorkloadSchedule:
    """Expand a raw insertion stream into an executable schedule.

    Every insert schedules a deletion at ``t + t_d``; re-inserting an edge
    that is still alive pushes its deletion to the new ``t + t_d``.  At equal
    timestamps deletions execute before insertions, so an edge deleted and
    re-inserted at the same tick never overlaps itself.  ``t_d=None`` builds
    an insertion-only schedule (for insertion-only baselines).  Snapshot
    times are ``test_num`` points uniformly spaced over the full event span.
    """
    if t_d is not None and t_d <= 0:
        raise ValueError("survival time must be positive (or None for insert-only)")
    if test_num < 1:
        raise ValueError("test_num must be at least 1")
    if not raw:
        raise EmptyStream("no insertions in stream")
    inserts = sorted(raw, key=lambda e: e[2])
    deletes: List[EdgeEvent] = []
    if t_d is not None:
        pending: dict = {}
        for u, v, t in inserts:
            pair = (u, v) if u < v else (v, u)
            expiry = pending.get(pair)
            if expiry is not None and expiry > t:
                pending[pair] = t + t_d  # still alive: extend survival
            else:
                if expiry is not None:
                    deletes.append(EdgeEvent(pair[0], pair[1], expiry, DELETE))
                    del pending[pair]
                pending[pair] = t + t_d
        for pair, expiry in pending.items():
            deletes.append(EdgeEvent(pair[0], pair[1], expiry, DELETE))
    events = [EdgeEvent(u, v, t, INSERT) for u, v, t in inserts]
    events.extend(deletes)
    # deletes sort before inserts at equal times; sort is stable per class
    events.sort(key=lambda ev: (ev.t, 0 if ev.op == DELETE else 1))
    t_s = events[0].t
    t_e = events[-1].t
    span = t_e - t_s
    snapshots = tuple(t_s + (i * span) // test_num for i in range(1, test_num + 1))
    return WorkloadSchedule(tuple(events), snapshots, t_d if t_d is not None else 0,
                            test_num, seed)


# -- query batteries ----------------------------------------------------------------


def query_battery(vertices: Sequence[int], mode: str, seed: int,
                  all_pairs_limit: int = ALL_PAIRS_VERTEX_LIMIT) -> List[Tuple[int, int]]:
    """Build the list of query pairs for one snapshot.

    Modes: ``allpairs``, ``random:N``, ``auto:N`` (all pairs below the vertex
    limit, N random pairs above), ``none``.  Random pairs are drawn uniformly
    with replacement from the current vertex set, deterministically from the
    seed.
    """
    if mode == "none" or not vertices:
        return []
    ordered = sorted(vertices)
    if mode.startswith("auto"):
        count = int(mode.split(":", 1)[1]) if ":" in mode else 1000
        mode = "allpairs" if len(ordered) < all_pairs_limit else f"random:{count}"
    if mode == "allpairs":
        return [(u, v) for i, u in enumerate(ordered) for v in ordered[i + 1:]]
    if mode.startswith("random"):
        count = int(mode.split(":", 1)[1]) if ":" in mode else 1000
        import random as _random

        rng = _random.Random(seed & _MASK64)
        us = rng.choices(ordered, k=count)
        vs = rng.choices(ordered, k=count)
        return list(zip(us, vs))
    raise ValueError(f"unknown query mode {mode!r}")


def digest_results(pairs: Sequence[Tuple[int, int]], answers: Sequence[bool]) -> int:
    """Order-insensitive 64-bit digest of (u, v, answer) triples."""
    acc = 0
    for (u, v), a in zip(pairs, answers):
        h = hashlib.blake2b(f"{u}|{v}|{int(a)}".encode(), digest_size=8).digest()
        acc = (acc + int.from_bytes(h, "little")) & _MASK64
    return acc


# -- metrics -----------------------------------------------------------------------


CSV_HEADER = (
    "snapshot_t,structure,s_d_total,s_c_total,n_components,n_vertices,n_edges,"
    "mean_us_insert_te,mean_us_insert_nte,mean_us_delete_te,mean_us_delete_nte,mean_us_query"
)


@dataclass
class MetricsRecord:
    """Per-snapshot measurements for one structure."""

    snapshot_t: int
    structure: str
    s_d_total: int
    s_c_total: int
    n_components: int
    n_vertices: int
    n_edges: int
    op_counts: dict = field(default_factory=dict)
    op_ns: dict = field(default_factory=dict)
    depth_hist: dict = field(default_factory=dict)
    n_queries: int = 0
    query_ns: int = 0
    query_digest: int = 0

    def mean_us(self, op_class: str) -> float:
        n = self.op_counts.get(op_class, 0)
        if not n:
            return 0.0
        return self.op_ns.get(op_class, 0) / n / 1000.0

    def mean_query_us(self) -> float:
        return self.query_ns / self.n_queries / 1000.0 if self.n_queries else 0.0

    def csv_row(self) -> str:
        return (
            f"{self.snapshot_t},{self.structure},{self.s_d_total},{self.s_c_total},"
            f"{self.n_components},{self.n_vertices},{self.n_edges},"
            f"{self.mean_us('insert_te'):.3f},{self.mean_us('insert_nte'):.3f},"
            f"{self.mean_us('delete_te'):.3f},{self.mean_us('delete_nte'):.3f},"
            f"{self.mean_query_us():.3f}"
        )

    def to_json(self) -> str:
        payload = {
            "snapshot_t": self.snapshot_t,
            "structure": self.structure,
            "s_d_total": self.s_d_total,
            "s_c_total": self.s_c_total,
            "n_components": self.n_components,
            "n_vertices": self.n_vertices,
            "n_edges": self.n_edges,
            "op_counts": self.op_counts,
            "op_ns": self.op_ns,
            "depth_hist": {str(k): v for k, v in sorted(self.depth_hist.items())},
            "n_queries": self.n_queries,
            "query_ns": self.query_ns,
            "query_digest": self.query_digest,
        }
        return json.dumps(payload, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "MetricsRecord":
        d = json.loads(line)
        return cls(
            snapshot_t=d["snapshot_t"],
            structure=d["structure"],
            s_d_total=d["s_d_total"],
            s_c_total=d["s_c_total"],
            n_components=d["n_components"],
            n_vertices=d["n_vertices"],
            n_edges=d["n_edges"],
            op_counts=d["op_counts"],
            op_ns=d["op_ns"],
            depth_hist={int(k): v for k, v in d["depth_hist"].items()},
            n_queries=d["n_queries"],
            query_ns=d["query_ns"],
            query_digest=d["query_digest"],
        )

    def reproducibility_key(self) -> tuple:
        """Everything except wall-clock latency fields."""
        return (
            self.snapshot_t,
            self.structure,
            self.s_d_total,
            self.s_c_total,
            self.n_components,
            self.n_vertices,
            self.n_edges,
            tuple(sorted(self.op_counts.items())),
            tuple(sorted(self.depth_hist.items())),
            self.n_queries,
            self.query_digest,
        )


def write_metrics_csv(records: Sequence[MetricsRecord], dest) -> None:
    lines = [CSV_HEADER] + [r.csv_row() for r in records]
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(text, encoding="utf-8")
    else:
        dest.write(text)


def write_metrics_jsonl(records: Sequence[MetricsRecord], dest) -> None:
    text = "\n".join(r.to_json() for r in records) + "\n"
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(text, encoding="utf-8")
    else:
        dest.write(text)


# -- replay ------------------------------------------------------------------------


def replay(sched: WorkloadSchedule, structure, *, structure_name: Optional[str] = None,
           battery: str = "none", seed: Optional[int] = None, verify: bool = False,
           histograms: bool = True,
           all_pairs_limit: int = ALL_PAIRS_VERTEX_LIMIT) -> List[MetricsRecord]:
    """Apply the schedule to the structure, measuring as configured.

    Query and update accounting stay separate: update latencies accumulate
    between snapshots, battery latencies are attributed to the snapshot that
    ran them.  With ``verify=True`` a shadow adjacency graph is maintained;
    battery answers, embedded edge sets and split decisions are checked
    against it and any divergence raises VerificationError.
    """
    name = structure_name or getattr(structure, "name", None) or "dtree"
    if seed is None:
        seed = sched.seed
    tracker = None
    if verify:
        tracker = ComponentTracker()
        for v in structure.vertices():
            tracker.add_vertex(v)
        if hasattr(structure, "edges"):
            for u, v in structure.edges():
                tracker.insert(u, v)
    records: List[MetricsRecord] = []
    counts = {c: 0 for c in OP_CLASSES}
    ns = {c: 0 for c in OP_CLASSES}
    perf = time.perf_counter_ns
    snaps = sched.snapshots
    si = 0
    last_idx = -1

    def take_snapshot(ts: int) -> None:
        nonlocal counts, ns
        s_d_total, s_c_total, n_comp, n_vert, n_edge = structure.snapshot_metrics()
        hist = structure.depth_histogram_total() if histograms else {}
        pairs = query_battery(structure.vertices(), battery,
                              (seed * 1_000_003 + len(records)) & _MASK64,
                              all_pairs_limit)
        q_ns = 0
        dig = 0
        if pairs:
            us = [p[0] for p in pairs]
            vs = [p[1] for p in pairs]
            t0 = perf()
            if hasattr(structure, "conn_batch"):
                answers = structure.conn_batch(us, vs)
            else:
                answers = [structure.conn(u, v) for u, v in pairs]
            q_ns = perf() - t0
            dig = digest_results(pairs, answers)
            if verify:
                labels = tracker.labels
                expected = [labels[u] == labels[v] for u, v in pairs]
                if expected != answers:
                    for (u, v), e, g in zip(pairs, expected, answers):
                        if e != g:
                            raise VerificationError(
                                f"conn({u},{v}) diverged at snapshot t={ts}: "
                                f"expected {e}, got {g}",
                                event_index=last_idx, pair=(u, v), expected=e, got=g,
                            )
        if verify:
            if structure.n_components() != tracker.n_components():
                raise VerificationError(
                    f"component count diverged at snapshot t={ts}: "
                    f"expected {tracker.n_components()}, got {structure.n_components()}",
                    event_index=last_idx,
                )
            if hasattr(structure, "edges"):
                got_edges = sorted(structure.edges())
                want_edges = sorted(tracker.graph.edges())
                if got_edges != want_edges:
                    raise VerificationError(
                        f"embedded edge set diverged at snapshot t={ts}",
                        event_index=last_idx,
                    )
        records.append(MetricsRecord(
            snapshot_t=ts, structure=name,
            s_d_total=s_d_total, s_c_total=s_c_total,
            n_components=n_comp, n_vertices=n_vert, n_edges=n_edge,
            op_counts=dict(counts), op_ns=dict(ns), depth_hist=hist,
            n_queries=len(pairs), query_ns=q_ns, query_digest=dig,
        ))
        counts = {c: 0 for c in OP_CLASSES}
        ns = {c: 0 for c in OP_CLASSES}

    for idx, ev in enumerate(sched.events):
        while si < len(snaps) and snaps[si] < ev.t:
            take_snapshot(snaps[si])
            si += 1
        try:
            if ev.op == INSERT:
                t0 = perf()
                kind = structure.insert_edge(ev.u, ev.v)
                t1 = perf()
                cls = "insert_te" if kind == "te" else ("insert_nte" if kind == "nte" else "noop")
            else:
                t0 = perf()
                out = structure.delete_edge(ev.u, ev.v)
                t1 = perf()
                cls = "delete_te" if out.kind == "tree" else "delete_nte"
        except DynConnError as exc:
            raise ReplayError(str(exc), idx) from exc
        counts[cls] += 1
        ns[cls] += t1 - t0
        last_idx = idx
        if verify:
            if ev.op == INSERT:
                tracker.insert(ev.u, ev.v)
            else:
                tracker.delete(ev.u, ev.v)
    while si < len(snaps):
        take_snapshot(snaps[si])
        si += 1
    return records
