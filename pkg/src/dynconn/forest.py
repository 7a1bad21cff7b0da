"""Backend selection and structure-wide helpers for the forest core.

Two interchangeable cores exist: ``dynconn._core`` (compiled) and
``dynconn._pycore`` (pure Python).  The compiled one is preferred when it
imported successfully; ``DYNCONN_BACKEND=python|compiled`` forces a choice.
"""

from __future__ import annotations

import os

from . import _pycore
from .records import Violation

try:
    from . import _core
except ImportError:
    _core = None

_AVAILABLE: dict = {"python": _pycore.Forest}
if _core is not None:
    _AVAILABLE["compiled"] = _core.Forest


def _select():
    forced = os.environ.get("DYNCONN_BACKEND", "").strip().lower()
    if forced in ("python", "pure", "py"):
        return "python"
    if forced in ("compiled", "cython", "c"):
        if _core is None:
            raise ImportError(
                "DYNCONN_BACKEND=compiled but the dynconn._core extension is not built"
            )
        return "compiled"
    if forced:
        raise ImportError(f"unknown DYNCONN_BACKEND value {forced!r}")
    return "compiled" if _core is not None else "python"


backend_name = _select()
Forest = _AVAILABLE[backend_name]


def available_backends() -> dict:
    """Map backend name -> Forest class, for benchmarks and differential tests."""
    return dict(_AVAILABLE)


def make_forest(maintain: bool = True, backend: str | None = None):
    """Construct a forest, optionally pinning the core implementation."""
    if backend is None:
        return Forest(maintain=maintain)
    try:
        cls = _AVAILABLE[backend]
    except KeyError:
        raise ValueError(f"unknown backend {backend!r}; have {sorted(_AVAILABLE)}") from None
    return cls(maintain=maintain)


# -- invariant validation ------------------------------------------------------


def validate_forest(f) -> list:
    """Check every structural invariant by full traversal; returns violations.

    A healthy forest yields an empty list.  Violations are data, not errors,
    so corrupted structures can be inspected.
    """
    out: list = []
    keys = f.vertices()
    key_set = set(keys)
    roots = set(f.roots())

    for k in keys:
        p = f.parent_of(k)
        children = f.children_of(k)
        nte = f.nte_of(k)
        size = f.size_of(k)

        if p is None and k not in roots:
            out.append(Violation("RootRegistry", k, "parent-less node missing from roots"))
        if p is not None and k in roots:
            out.append(Violation("RootRegistry", k, "node with a parent listed as root"))

        if p is not None and k not in f.children_of(p):
            out.append(Violation("ParentChildMismatch", k, f"not in children of parent {p}"))
        for c in children:
            if f.parent_of(c) != k:
                out.append(Violation("ParentChildMismatch", k, f"child {c} points to {f.parent_of(c)}"))

        expected = 1 + sum(f.size_of(c) for c in children)
        if size != expected:
            out.append(Violation("SizeMismatch", k, f"stored {size}, children imply {expected}"))
        if size < 1:
            out.append(Violation("SizeMismatch", k, f"stored {size} < 1"))

        nte_set = set(nte)
        if k in nte_set:
            out.append(Violation("SelfNte", k, "node lists itself as non-tree neighbor"))
        if len(nte_set) != len(nte):
            out.append(Violation("NteDuplicate", k, "duplicate non-tree neighbor entries"))
        for x in nte:
            if x not in key_set:
                out.append(Violation("NteUnknown", k, f"non-tree neighbor {x} not in forest"))
            elif k not in f.nte_of(x):
                out.append(Violation("NteAsymmetry", k, f"{x} does not list {k} back"))
        overlap = nte_set.intersection(children)
        if p is not None and p in nte_set:
            overlap.add(p)
        if overlap:
            out.append(Violation("EdgeBothKinds", k, f"tree neighbors also in nte: {sorted(overlap)}"))

    # reachability from roots via child pointers: covers acyclicity of parent
    # chains and detects orphaned cycles
    seen: dict = {}
    for r in roots:
        stack = [r]
        while stack:
            k = stack.pop()
            if k in seen:
                out.append(Violation("DoubleReach", k, "reached from two places"))
                continue
            seen[k] = r
            stack.extend(f.children_of(k))
    for k in keys:
        if k not in seen:
            out.append(Violation("Unreachable", k, "not reachable from any root"))

    # non-tree edges must stay inside one component
    for k in keys:
        for x in f.nte_of(k):
            if x in seen and k in seen and seen[k] != seen[x]:
                out.append(Violation("NteAcrossTrees", k, f"non-tree edge to {x} crosses components"))

    return out


# -- fixture construction -------------------------------------------------------


def build_forest(tree_edges, nte_edges=(), *, maintain: bool = True, backend: str | None = None,
                 extra_vertices=()):
    """Build a forest with an exact prescribed shape.

    ``tree_edges`` are (parent, child) pairs in parent-before-child order;
    each attach is raw (no rebalancing) so the result matches the drawing.
    ``nte_edges`` are recorded verbatim afterwards.
    """
    f = make_forest(maintain=maintain, backend=backend)
    for p, c in tree_edges:
        if not f.has_vertex(p):
            f.add_vertex(p)
        if not f.has_vertex(c):
            f.add_vertex(c)
        f._raw_attach(p, c)
    for u, v in nte_edges:
        if not f.has_vertex(u):
            f.add_vertex(u)
        if not f.has_vertex(v):
            f.add_vertex(v)
        f._raw_add_nte(u, v)
    for k in extra_vertices:
        if not f.has_vertex(k):
            f.add_vertex(k)
    return f


def snapshot_structure(f) -> dict:
    """Canonical structural dump for equality assertions in tests."""
    return {
        k: (f.parent_of(k), f.size_of(k), tuple(sorted(f.children_of(k))), tuple(sorted(f.nte_of(k))))
        for k in sorted(f.vertices())
    }
