"""Stream parsing, survival scheduling, batteries, replay and metrics files."""

import io
import random

import pytest

from dynconn import errors
from dynconn.forest import make_forest
from dynconn.generators import gen_random_dynamic
from dynconn.oracles import OptForest, UnionFindStructure, naive_forest
from dynconn.workload import (
    CSV_HEADER,
    DELETE,
    INSERT,
    MetricsRecord,
    WorkloadSchedule,
    digest_results,
    parse_stream,
    query_battery,
    replay,
    schedule,
    serialize_stream,
    write_metrics_csv,
    write_metrics_jsonl,
)


def test_parse_stream_basic():
    assert parse_stream(io.StringIO("1 2 100\n2 3 105\n")) == [(1, 2, 100), (2, 3, 105)]
    assert parse_stream(io.StringIO("")) == []
    assert parse_stream(io.StringIO("# header\n\n4 5 0\n")) == [(4, 5, 0)]


def test_parse_stream_errors_carry_line_numbers():
    with pytest.raises(errors.ParseError) as e:
        parse_stream(io.StringIO("1 2 3\n1 2\n"))
    assert e.value.line_no == 2
    with pytest.raises(errors.ParseError):
        parse_stream(io.StringIO("a b c\n"))
    with pytest.raises(errors.ParseError):
        parse_stream(io.StringIO("3 3 7\n"))


def test_stream_round_trip(tmp_path):
    events = gen_random_dynamic(20, 200, churn=0.3, seed=9)
    path = tmp_path / "stream.txt"
    serialize_stream(events, path)
    assert parse_stream(path) == events


def test_schedule_basic_survival():
    sched = schedule([(1, 2, 0)], t_d=14, test_num=1)
    assert sched.events == (
        (1, 2, 0, INSERT),
        (1, 2, 14, DELETE),
    )


def test_schedule_reinsert_extends_survival():
    sched = schedule([(1, 2, 0), (1, 2, 5)], t_d=14, test_num=1)
    deletes = [ev for ev in sched.events if ev.op == DELETE]
    assert deletes == [(1, 2, 19, DELETE)]
    assert len(sched.events) == 3


def test_schedule_reinsert_after_expiry_is_fresh():
    sched = schedule([(1, 2, 0), (1, 2, 30)], t_d=10, test_num=1)
    deletes = [ev for ev in sched.events if ev.op == DELETE]
    assert deletes == [(1, 2, 10, DELETE), (1, 2, 40, DELETE)]


def test_schedule_delete_precedes_insert_at_same_tick():
    sched = schedule([(1, 2, 0), (1, 2, 10)], t_d=10, test_num=1)
    ops_at_10 = [ev.op for ev in sched.events if ev.t == 10]
    assert ops_at_10 == [DELETE, INSERT]


def test_schedule_snapshot_spacing():
    raw = [(1, 2, 0), (3, 4, 986)]
    sched = schedule(raw, t_d=14, test_num=100)
    assert sched.events[-1].t == 1000
    assert sched.snapshots == tuple(range(10, 1001, 10))
    diffs = {b - a for a, b in zip(sched.snapshots, sched.snapshots[1:])}
    assert diffs == {10}


def test_schedule_empty_stream():
    with pytest.raises(errors.EmptyStream):
        schedule([], t_d=5, test_num=10)


def test_schedule_round_trip(tmp_path):
    raw = gen_random_dynamic(15, 120, churn=0.4, seed=3)
    sched = schedule(raw, t_d=9, test_num=7, seed=3)
    path = tmp_path / "sched.txt"
    sched.save(path)
    loaded = WorkloadSchedule.load(path)
    assert loaded == sched
    assert loaded.digest() == sched.digest()


def test_query_battery_modes():
    assert len(query_battery([1, 2, 3, 4], "allpairs", 0)) == 6
    r1 = query_battery(list(range(50)), "random:50", 7)
    r2 = query_battery(list(range(50)), "random:50", 7)
    assert r1 == r2 and len(r1) == 50
    assert query_battery(list(range(4)), "auto:9", 0) == query_battery(list(range(4)), "allpairs", 0)
    assert query_battery([], "allpairs", 0) == []
    assert query_battery([1, 2], "none", 0) == []


def test_query_battery_uniformity():
    # chi-square sanity on endpoint ids over many draws with a pinned seed
    n = 40
    pairs = query_battery(list(range(n)), "random:200000", 1234)
    counts = [0] * n
    for u, v in pairs:
        counts[u] += 1
        counts[v] += 1
    draws = 2 * len(pairs)
    expected = draws / n
    chi2 = sum((c - expected) ** 2 / expected for c in counts)
    # 39 dof: reject-at-0.001 threshold is ~72.05
    assert chi2 < 72.05


def test_digest_order_insensitive():
    pairs = [(1, 2), (3, 4), (5, 6)]
    answers = [True, False, True]
    d1 = digest_results(pairs, answers)
    d2 = digest_results(list(reversed(pairs)), list(reversed(answers)))
    assert d1 == d2
    assert d1 != digest_results(pairs, [True, True, True])


def test_replay_empty_schedule_metrics():
    sched = schedule([(1, 2, 0)], t_d=5, test_num=3)
    records = replay(sched, make_forest(), battery="none")
    assert len(records) == 3
    assert records[-1].n_edges == 0  # the lone edge expired


def test_replay_verify_random_workload():
    raw = gen_random_dynamic(30, 800, churn=0.35, seed=21)
    sched = schedule(raw, t_d=25, test_num=10, seed=21)
    records = replay(sched, make_forest(), battery="allpairs", verify=True)
    assert len(records) == 10
    assert all(r.n_queries > 0 for r in records if r.n_vertices > 1)


def test_replay_verify_catches_divergence():
    class LyingForest:
        name = "liar"

        def __init__(self):
            self.inner = make_forest()

        def __getattr__(self, item):
            return getattr(self.inner, item)

        def conn_batch(self, us, vs):
            return [False for _ in us]

    raw = [(1, 2, 0), (2, 3, 1)]
    sched = schedule(raw, t_d=100, test_num=10)
    with pytest.raises(errors.VerificationError) as e:
        replay(sched, LyingForest(), battery="allpairs", verify=True)
    assert e.value.pair is not None
    assert e.value.expected is True and e.value.got is False


def test_replay_deterministic_digests():
    raw = gen_random_dynamic(40, 600, churn=0.3, seed=5)
    sched = schedule(raw, t_d=20, test_num=8, seed=5)
    r1 = replay(sched, make_forest(), battery="random:200")
    r2 = replay(sched, make_forest(), battery="random:200")
    k1 = [r.reproducibility_key() for r in r1]
    k2 = [r.reproducibility_key() for r in r2]
    assert k1 == k2


def test_replay_counts_match_window_events():
    raw = gen_random_dynamic(25, 300, churn=0.2, seed=8)
    sched = schedule(raw, t_d=15, test_num=5, seed=8)
    records = replay(sched, make_forest(), battery="none")
    replayed = sum(sum(r.op_counts.values()) for r in records)
    assert replayed == len(sched.events)


def test_replay_identical_answers_across_structures():
    # maintained, naive and exact structures must agree on every battery
    raw = gen_random_dynamic(35, 700, churn=0.3, seed=13)
    sched = schedule(raw, t_d=30, test_num=6, seed=13)
    digests = {}
    for name, s in [
        ("dtree", make_forest()),
        ("naive", naive_forest()),
        ("oracle", OptForest()),
    ]:
        recs = replay(sched, s, structure_name=name, battery="allpairs", histograms=False)
        digests[name] = [r.query_digest for r in recs]
    assert digests["dtree"] == digests["naive"] == digests["oracle"]


def test_replay_insert_only_union_find_agrees():
    raw = gen_random_dynamic(30, 400, churn=0.2, seed=17)
    sched = schedule(raw, t_d=None, test_num=5, seed=17)
    assert not sched.has_deletes()
    f_recs = replay(sched, make_forest(), battery="random:500")
    u_recs = replay(sched, UnionFindStructure(), structure_name="unionfind", battery="random:500")
    assert [r.query_digest for r in f_recs] == [r.query_digest for r in u_recs]


def test_replay_union_find_rejects_deletes():
    sched = schedule([(1, 2, 0)], t_d=5, test_num=1)
    with pytest.raises(errors.ReplayError):
        replay(sched, UnionFindStructure(), structure_name="unionfind")


def test_oracle_structure_metrics_lower_bound():
    raw = gen_random_dynamic(40, 500, churn=0.25, seed=31)
    sched = schedule(raw, t_d=18, test_num=6, seed=31)
    f_recs = replay(sched, make_forest(), battery="none", histograms=False)
    o_recs = replay(sched, OptForest(), structure_name="oracle", battery="none", histograms=False)
    for fr, orr in zip(f_recs, o_recs):
        assert orr.s_d_total <= fr.s_d_total
        assert fr.n_components == orr.n_components


def test_metrics_files(tmp_path):
    raw = gen_random_dynamic(10, 60, seed=2)
    sched = schedule(raw, t_d=8, test_num=3, seed=2)
    records = replay(sched, make_forest(), battery="allpairs")
    csv_path = tmp_path / "m.csv"
    jsonl_path = tmp_path / "m.jsonl"
    write_metrics_csv(records, csv_path)
    write_metrics_jsonl(records, jsonl_path)
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + len(records)
    assert all(len(line.split(",")) == 12 for line in lines)
    parsed = [MetricsRecord.from_json(l) for l in jsonl_path.read_text().strip().splitlines()]
    assert [p.reproducibility_key() for p in parsed] == [r.reproducibility_key() for r in records]
