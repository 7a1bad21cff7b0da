"""dynconn: connectivity queries on fully dynamic undirected graphs.

The core structure is a spanning forest whose nodes carry subtree sizes and
non-tree-edge adjacency (a D-tree forest).  Baseline structures, brute-force
oracles and a workload-replay benchmark CLI are included.
"""

from .errors import DynConnError
from .forest import (
    Forest,
    available_backends,
    backend_name,
    build_forest,
    make_forest,
    snapshot_structure,
    validate_forest,
)
from .records import DeleteOutcome, RootInfo, Violation

__version__ = "0.1.0"

__all__ = [
    "DeleteOutcome",
    "DynConnError",
    "Forest",
    "RootInfo",
    "Violation",
    "available_backends",
    "backend_name",
    "build_forest",
    "make_forest",
    "snapshot_structure",
    "validate_forest",
    "__version__",
]
