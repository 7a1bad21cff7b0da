"""Small result records returned by forest operations.

Kept in a leaf module so both the pure-Python and the compiled core can
construct them without circular imports.
"""

from typing import NamedTuple, Optional, Tuple


class RootInfo(NamedTuple):
    """Result of a root traversal.

    ``gate_child`` is the child of the root through which the walk arrived;
    it is ``None`` exactly when the queried vertex is the root itself.
    """

    root: int
    depth: int
    gate_child: Optional[int]


class DeleteOutcome(NamedTuple):
    """Tagged result of an edge deletion.

    ``kind`` is ``"tree"`` or ``"nontree"``.  ``split`` is True when the
    deletion disconnected the component.  ``roots`` holds the resulting root
    key(s) for tree deletions: one root when reconnected, two when split.
    Non-tree deletions never change the structure, so ``roots`` is empty
    (computing the root would cost a traversal and the operation is O(1)).
    """

    kind: str
    split: bool
    roots: Tuple[int, ...]


class Violation(NamedTuple):
    """One invariant violation found by the validator."""

    kind: str
    key: int
    detail: str
