"""Stable AR quiver windows, their verification and the tree-class rank ledgers."""

from .emit import emit_dot, emit_json, parse
from .ledger import InfeasibilityProof, RankLedger, ledger_system, solve_ledger, tree_class_ledger
from .verify import CheckResult, VerificationReport, verify_za_infinity
from .window import (
    BuildConfig,
    ComponentWindow,
    QuiverEdge,
    QuiverVertex,
    SequenceRecord,
    build_component,
    d_prime,
)

__all__ = [
    "BuildConfig",
    "CheckResult",
    "ComponentWindow",
    "InfeasibilityProof",
    "QuiverEdge",
    "QuiverVertex",
    "RankLedger",
    "SequenceRecord",
    "VerificationReport",
    "build_component",
    "d_prime",
    "emit_dot",
    "emit_json",
    "ledger_system",
    "parse",
    "solve_ledger",
    "tree_class_ledger",
    "verify_za_infinity",
]
