"""Optimised Table Structure Language (OTSL) toolkit.

Lossless conversion between OTSL and HTML table structure through a shared
grid model, incremental validation, confidence-based repair, TEDs scoring and
dataset conversion.
"""

from .grid import (
    CellSpan,
    GridDims,
    GridError,
    TableGrid,
    build_grid,
    enumerate_grids,
    grids_equal,
)
from .htmlcodec import HtmlToken, html_emit, html_parse, html_text_read, html_text_write
from .lang import (
    Mode,
    OtslToken,
    Rule,
    RuleViolation,
    Validator,
    detokenize,
    encode,
    parse,
    tokenize,
    validate,
)
from .metrics import corpus_stats, teds, to_struct_tree
from .repair import CandidateStep, repair_sequence, repair_stream

__version__ = "0.1.0"

__all__ = [
    "CandidateStep",
    "CellSpan",
    "GridDims",
    "GridError",
    "HtmlToken",
    "Mode",
    "OtslToken",
    "Rule",
    "RuleViolation",
    "TableGrid",
    "Validator",
    "build_grid",
    "corpus_stats",
    "detokenize",
    "encode",
    "enumerate_grids",
    "grids_equal",
    "html_emit",
    "html_parse",
    "html_text_read",
    "html_text_write",
    "parse",
    "repair_sequence",
    "repair_stream",
    "teds",
    "to_struct_tree",
    "tokenize",
    "validate",
]
