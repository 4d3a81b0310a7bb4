"""MiniMaple: a typed subset of Maple with a flow-sensitive checker and
contract-checked execution."""

from ._core import (
    CheckReport,
    ContractViolation,
    Diagnostic,
    Procedure,
    ProgramError,
    RunReport,
    RuntimeErrorReport,
    Snapshot,
    SoundnessFailure,
    Symbol,
    check,
    format_source,
    is_subtype,
    lub,
    meet,
    normalize,
    run,
    subtract,
    syntax_tree,
)

__all__ = [
    "CheckReport",
    "ContractViolation",
    "Diagnostic",
    "Procedure",
    "ProgramError",
    "RunReport",
    "RuntimeErrorReport",
    "Snapshot",
    "SoundnessFailure",
    "Symbol",
    "check",
    "format_source",
    "is_subtype",
    "lub",
    "meet",
    "normalize",
    "run",
    "subtract",
    "syntax_tree",
]

__version__ = "0.1.0"
