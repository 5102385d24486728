"""Step-wise mathematics tutoring engine with an accessible linear notation."""

__version__ = "0.1.0"

from .terms import (
    Apply,
    Binder,
    Constant,
    Cursor,
    Number,
    Path,
    PathError,
    Term,
    TermError,
    Variable,
    navigate,
    num,
    subterm,
)
from .parse import ParseError, parse
from .render import render_linear, render_pretty

__all__ = [
    "Apply",
    "Binder",
    "Constant",
    "Cursor",
    "Number",
    "ParseError",
    "Path",
    "PathError",
    "Term",
    "TermError",
    "Variable",
    "navigate",
    "num",
    "parse",
    "render_linear",
    "render_pretty",
    "subterm",
]
