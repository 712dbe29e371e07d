"""Structure trees, cut systems and tree-likeness certificates for finitely
presented infinite graphs."""

from .errors import BudgetError, CheckFailure, InputError, PreconditionError, StructreeError
from .labels import VertexId, parse_label
from .presentation import GraphPresentation
from .truncation import Truncation, distance, expand_ball
from .verdict import FALSE, TRUE, UNKNOWN, Trilean

__all__ = [
    "BudgetError",
    "CheckFailure",
    "FALSE",
    "GraphPresentation",
    "InputError",
    "PreconditionError",
    "StructreeError",
    "TRUE",
    "Trilean",
    "Truncation",
    "UNKNOWN",
    "VertexId",
    "distance",
    "expand_ball",
    "parse_label",
]

__version__ = "0.1.0"
