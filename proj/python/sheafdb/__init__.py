"""Semiring-valued tables, sheaf compatibility and contextuality checks."""

from ._sheafdb import (
    CausalityViolation,
    Family,
    IncompatibleFamily,
    ParseError,
    Patch,
    Relation,
    SheafdbError,
    SnapshotConflict,
    Table,
    bell_family,
    bell_missing_table,
    demo,
    snapshot,
)

__all__ = [
    "CausalityViolation",
    "Family",
    "IncompatibleFamily",
    "ParseError",
    "Patch",
    "Relation",
    "SheafdbError",
    "SnapshotConflict",
    "Table",
    "bell_family",
    "bell_missing_table",
    "demo",
    "snapshot",
]
