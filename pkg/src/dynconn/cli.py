"""Command-line front end: generate streams, replay workloads, compare structures.

Exit codes are a stable contract for CI: 0 success, 1 usage error,
2 verification mismatch, 3 runtime error.  Every option has a long-form flag;
flags override ``DYNCONN_*`` environment variables, which override defaults.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from .errors import DynConnError, ScheduleMismatch, UsageError, VerificationError
from .forest import available_backends, backend_name, make_forest
from .generators import gen_random_dynamic, gen_star_of_lines
from .oracles import OptForest, UnionFindStructure
from .workload import (
    CSV_HEADER,
    MetricsRecord,
    WorkloadSchedule,
    parse_stream,
    replay,
    schedule,
    serialize_stream,
    write_metrics_csv,
    write_metrics_jsonl,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2
EXIT_RUNTIME = 3

ENV_PREFIX = "DYNCONN_"
STRUCTURE_NAMES = ("dtree", "naive", "unionfind", "oracle")

DEFAULT_SURVIVAL = "14"   # dataset ticks; use 5 for year-granularity streams
DEFAULT_SNAPSHOTS = 100
DEFAULT_QUERIES = "auto:1000"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    """Resolved configuration for one replay."""

    structure: str
    input_spec: str
    survival: Optional[int]
    snapshots: int
    queries: str
    seed: int
    verify: bool
    out: Optional[str]
    backend: Optional[str]

    @classmethod
    def resolve(cls, args, structure: Optional[str] = None) -> "RunConfig":
        survival_text = _pick(getattr(args, "survival", None), "SURVIVAL", DEFAULT_SURVIVAL)
        survival = None if str(survival_text).lower() in ("none", "0") else int(survival_text)
        cfg = cls(
            structure=structure or _pick(getattr(args, "structure", None), "STRUCTURE", "dtree"),
            input_spec=_pick(getattr(args, "input", None), "INPUT", None),
            survival=survival,
            snapshots=int(_pick(getattr(args, "snapshots", None), "SNAPSHOTS", DEFAULT_SNAPSHOTS)),
            queries=str(_pick(getattr(args, "queries", None), "QUERIES", DEFAULT_QUERIES)),
            seed=int(_pick(getattr(args, "seed", None), "SEED", 0)),
            verify=bool(_pick(getattr(args, "verify", None), "VERIFY", False, cast=_parse_bool)),
            out=_pick(getattr(args, "out", None), "OUT", None),
            backend=getattr(args, "backend", None),
        )
        if cfg.structure not in STRUCTURE_NAMES:
            raise UsageError(f"unknown structure {cfg.structure!r}; choose from {STRUCTURE_NAMES}")
        if not cfg.input_spec:
            raise UsageError("exactly one input source is required (--input PATH or generator spec)")
        return cfg


def _parse_bool(text: str) -> bool:
    return str(text).strip().lower() in ("1", "true", "yes", "on")


def _pick(flag_value, env_key: str, default, cast=lambda x: x):
    if flag_value is not None:
        return flag_value
    env = os.environ.get(ENV_PREFIX + env_key)
    if env is not None:
        return cast(env)
    return default


def make_structure(name: str, backend: Optional[str] = None):
    if name == "dtree":
        return make_forest(backend=backend)
    if name == "naive":
        return make_forest(maintain=False, backend=backend)
    if name == "unionfind":
        return UnionFindStructure()
    if name == "oracle":
        return OptForest()
    raise UsageError(f"unknown structure {name!r}")


def load_raw(input_spec: str):
    """Load a raw insertion stream from a file path or a generator spec.

    Generator specs: ``star:k=48,n=480`` or ``random:n=100,m=2000,churn=0.3,seed=1``.
    """
    if input_spec.startswith("star:") or input_spec.startswith("random:"):
        kind, _, rest = input_spec.partition(":")
        params = {}
        for item in filter(None, rest.split(",")):
            if "=" not in item:
                raise UsageError(f"bad generator parameter {item!r} in {input_spec!r}")
            key, _, value = item.partition("=")
            params[key.strip()] = value.strip()
        try:
            if kind == "star":
                _, events = gen_star_of_lines(int(params["k"]), int(params["n"]))
                return events
            return gen_random_dynamic(
                int(params["n"]),
                int(params["m"]),
                churn=float(params.get("churn", 0.0)),
                seed=int(params.get("seed", 0)),
            )
        except KeyError as exc:
            raise UsageError(f"generator spec {input_spec!r} missing parameter {exc}") from None
    if not Path(input_spec).exists():
        raise UsageError(f"input file {input_spec!r} does not exist")
    return parse_stream(input_spec)


def _build_schedule(cfg: RunConfig) -> WorkloadSchedule:
    raw = load_raw(cfg.input_spec)
    sched = schedule(raw, cfg.survival, cfg.snapshots, seed=cfg.seed)
    return sched


def _run_one(cfg: RunConfig, sched: WorkloadSchedule) -> List[MetricsRecord]:
    structure = make_structure(cfg.structure, cfg.backend)
    if cfg.structure == "unionfind" and sched.has_deletes():
        raise UsageError("unionfind is insertion-only; use --survival none")
    return replay(
        sched,
        structure,
        structure_name=cfg.structure,
        battery=cfg.queries,
        seed=cfg.seed,
        verify=cfg.verify,
    )


# -- subcommands ----------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.generator == "star":
        _, events = gen_star_of_lines(args.k, args.n, start_t=args.start_t)
    else:
        events = gen_random_dynamic(args.n, args.m, churn=args.churn,
                                    seed=args.seed, start_t=args.start_t)
    if args.out:
        serialize_stream(events, args.out)
        print(f"wrote {len(events)} insertions to {args.out}")
    else:
        serialize_stream(events, sys.stdout)
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = RunConfig.resolve(args)
    sched = _build_schedule(cfg)
    records = _run_one(cfg, sched)
    if cfg.out:
        write_metrics_csv(records, cfg.out + ".csv")
        write_metrics_jsonl(records, cfg.out + ".jsonl")
    print(f"structure={cfg.structure} events={len(sched.events)} "
          f"snapshots={len(records)} schedule={sched.digest()[:12]}")
    if records:
        last = records[-1]
        print(f"final: t={last.snapshot_t} vertices={last.n_vertices} "
              f"edges={last.n_edges} components={last.n_components} "
              f"s_d={last.s_d_total} s_c={last.s_c_total}")
    if cfg.out:
        print(f"metrics written to {cfg.out}.csv and {cfg.out}.jsonl")
    return EXIT_OK


def cmd_compare(args) -> int:
    structures = args.structure or []
    if len(structures) < 2:
        raise UsageError("compare needs at least two --structure arguments")
    configs = [RunConfig.resolve(args, structure=s) for s in structures]
    sched = _build_schedule(configs[0])
    digest = sched.digest()
    for cfg in configs[1:]:
        other = _build_schedule(cfg)
        if other.digest() != digest:
            raise ScheduleMismatch("structures would replay different schedules")
    with ThreadPoolExecutor(max_workers=len(configs)) as pool:
        results = list(pool.map(lambda cfg: _run_one(cfg, sched), configs))
    table = _comparison_table(structures, results)
    if args.out:
        Path(args.out + ".csv").write_text(table["csv"], encoding="utf-8")
        Path(args.out + ".txt").write_text(table["text"], encoding="utf-8")
        print(f"comparison written to {args.out}.csv and {args.out}.txt")
    print(table["text"], end="")
    return EXIT_OK


def _comparison_table(names: List[str], results: List[List[MetricsRecord]]) -> dict:
    header = ["snapshot_t"]
    for name in names:
        header += [f"{name}_s_d", f"{name}_s_c", f"{name}_us_query"]
    for name in names[1:]:
        header += [f"{name}_s_d_ratio"]
    rows = []
    for i in range(len(results[0])):
        base = results[0][i]
        row = [base.snapshot_t]
        for recs in results:
            r = recs[i]
            row += [r.s_d_total, r.s_c_total, round(r.mean_query_us(), 3)]
        for recs in results[1:]:
            r = recs[i]
            row += [f"{r.s_d_total / base.s_d_total:.4f}" if base.s_d_total else "-"]
        rows.append(row)
    csv_lines = [",".join(header)] + [",".join(str(x) for x in row) for row in rows]
    widths = [max(len(str(h)), *(len(str(row[j])) for row in rows)) if rows else len(str(h))
              for j, h in enumerate(header)]
    text_lines = ["  ".join(str(h).rjust(w) for h, w in zip(header, widths))]
    for row in rows:
        text_lines.append("  ".join(str(x).rjust(w) for x, w in zip(row, widths)))
    return {
        "csv": "\n".join(csv_lines) + "\n",
        "text": "\n".join(text_lines) + "\n",
    }


def cmd_bench(args) -> int:
    """Replay one generated workload on every built core and report throughput."""
    raw = gen_random_dynamic(args.vertices, args.edges, churn=args.churn, seed=args.seed)
    sched = schedule(raw, args.survival, args.snapshots, seed=args.seed)
    print(f"events={len(sched.events)} vertices<={args.vertices} "
          f"snapshots={args.snapshots} backends={sorted(available_backends())}")
    rates = {}
    for name in sorted(available_backends()):
        structure = make_forest(backend=name)
        t0 = time.perf_counter()
        records = replay(sched, structure, structure_name=f"dtree[{name}]",
                         battery="none", histograms=False)
        elapsed = time.perf_counter() - t0
        rates[name] = len(sched.events) / elapsed
        counts: dict = {}
        nanos: dict = {}
        for r in records:
            for c, n in r.op_counts.items():
                counts[c] = counts.get(c, 0) + n
                nanos[c] = nanos.get(c, 0) + r.op_ns.get(c, 0)
        means = "  ".join(
            f"{c}={nanos.get(c, 0) / counts[c] / 1000:.2f}us"
            for c in ("insert_te", "insert_nte", "delete_te", "delete_nte")
            if counts.get(c)
        )
        print(f"{name:>9}: {elapsed:8.3f}s  {rates[name]:12,.0f} events/s  {means}")
    if len(rates) == 2:
        slow, fast = sorted(rates.values())
        print(f"speedup: {fast / slow:.2f}x")
    return EXIT_OK


# -- entry point -------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="dynconn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="replay a workload on one structure")
    run.add_argument("--structure", choices=STRUCTURE_NAMES, default=None)
    run.add_argument("--input", default=None,
                     help="stream file path, or generator spec star:k=..,n=.. / random:n=..,m=..")
    run.add_argument("--survival", default=None,
                     help="edge survival time in stream ticks, or 'none' for insert-only")
    run.add_argument("--snapshots", type=int, default=None, help="number of testing points")
    run.add_argument("--queries", default=None,
                     help="battery per snapshot: allpairs | random:N | auto:N | none")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--verify", action="store_const", const=True, default=None,
                     help="check answers and edge sets against the graph oracle")
    run.add_argument("--out", default=None, help="output prefix for .csv/.jsonl metrics")
    run.add_argument("--backend", choices=("python", "compiled"), default=None)
    run.set_defaults(func=cmd_run)

    comp = sub.add_parser("compare", help="replay one schedule on several structures")
    comp.add_argument("--structure", action="append", choices=STRUCTURE_NAMES,
                      help="repeat for each structure; first is the ratio baseline")
    comp.add_argument("--input", default=None)
    comp.add_argument("--survival", default=None)
    comp.add_argument("--snapshots", type=int, default=None)
    comp.add_argument("--queries", default=None)
    comp.add_argument("--seed", type=int, default=None)
    comp.add_argument("--out", default=None)
    comp.add_argument("--backend", choices=("python", "compiled"), default=None)
    comp.set_defaults(func=cmd_compare, verify=None)

    gen = sub.add_parser("gen", help="write a synthetic edge stream")
    gen_sub = gen.add_subparsers(dest="generator", required=True)
    star = gen_sub.add_parser("star", help="central vertex with k attached paths")
    star.add_argument("--k", type=int, required=True, help="number of paths")
    star.add_argument("--n", type=int, required=True, help="vertices excluding the center")
    star.add_argument("--start-t", type=int, default=0)
    star.add_argument("--out", default=None)
    star.set_defaults(func=cmd_gen)
    rand = gen_sub.add_parser("random", help="uniform random insertions")
    rand.add_argument("--n", type=int, required=True, help="vertex pool size")
    rand.add_argument("--m", type=int, required=True, help="number of insertions")
    rand.add_argument("--churn", type=float, default=0.0,
                      help="probability of re-emitting an earlier edge")
    rand.add_argument("--seed", type=int, default=0)
    rand.add_argument("--start-t", type=int, default=0)
    rand.add_argument("--out", default=None)
    rand.set_defaults(func=cmd_gen)

    bench = sub.add_parser("bench", help="compare the pure and compiled cores")
    bench.add_argument("--vertices", type=int, default=10_000)
    bench.add_argument("--edges", type=int, default=100_000)
    bench.add_argument("--churn", type=float, default=0.3)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--snapshots", type=int, default=4)
    bench.add_argument("--survival", type=int, default=40)
    bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as exc:
        print(f"verification mismatch: {exc}", file=sys.stderr)
        print(f"  first divergence: event index {exc.event_index}, pair {exc.pair}, "
              f"expected {exc.expected}, got {exc.got}", file=sys.stderr)
        return EXIT_MISMATCH
    except DynConnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
