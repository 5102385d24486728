"""Immutable term trees, paths, cursors and notation.

Terms carry no notation of their own: the same tree can be shown as a
one-line ASCII string (Braille friendly) or as presentation markup.  Both
renderers and the parser live in their own modules; this one defines the
tree shape, structural equality (alpha for binders), path addressing and
keyboard navigation.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterator, Mapping, Union

Path = tuple[int, ...]

ROOT: Path = ()

# Binder kinds understood by the core.  A theory signature gates which of
# them may actually appear in parsed input.
BINDER_KINDS = ("forall", "derivative", "lambda")


class TermError(Exception):
    """Base class for term-level errors."""


class PathError(TermError):
    """A path does not address a node of the given term."""

    def __init__(self, path: Path, offending: int):
        self.path = path
        self.offending = offending
        super().__init__(f"invalid path {list(path)}: no child {offending}")


@dataclass(frozen=True)
class Number:
    """Exact rational literal.

    ``is_float`` marks values produced after the numeric switch; such
    numbers render as decimals and compare by float value.  Negative
    literals are represented as negative Numbers, never as a unary minus
    applied to a Number.
    """

    value: Fraction
    is_float: bool = False

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Number):
            return NotImplemented
        if self.is_float != other.is_float:
            return False
        if self.is_float:
            return float(self.value) == float(other.value)
        return self.value == other.value

    def __hash__(self) -> int:
        if self.is_float:
            return hash(("num", float(self.value)))
        return hash(("num", self.value))


@dataclass(frozen=True)
class Variable:
    """Free identifier.  Names starting with ``?`` are pattern variables."""

    name: str


@dataclass(frozen=True)
class Constant:
    """Named constant declared by a theory signature (e.g. pi)."""

    name: str


@dataclass(frozen=True)
class Apply:
    op: str
    args: tuple["Term", ...]


@dataclass(frozen=True)
class Binder:
    """One bound identifier over a body; kind is one of BINDER_KINDS."""

    kind: str
    bound: str
    body: "Term"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Binder):
            return NotImplemented
        return alpha_key(self) == alpha_key(other)

    def __hash__(self) -> int:
        return hash(alpha_key(self))


Term = Union[Number, Variable, Constant, Apply, Binder]


def num(value, *, is_float: bool = False) -> Number:
    return Number(Fraction(value), is_float=is_float)


def alpha_key(t: Term, bound: Mapping[str, int] = {}, depth: int = 0):
    """Hashable key invariant under renaming of Binder-bound identifiers.

    Bound occurrences are replaced by their de Bruijn level, so two terms
    have equal keys exactly when they are alpha-equivalent.  Used by
    Binder.__eq__/__hash__; free identifiers compare literally.
    """
    match t:
        case Number():
            return ("n", float(t.value) if t.is_float else t.value, t.is_float)
        case Variable(name):
            if name in bound:
                return ("b", bound[name])
            return ("v", name)
        case Constant(name):
            return ("c", name)
        case Apply(op, args):
            return ("a", op, tuple(alpha_key(a, bound, depth) for a in args))
        case Binder(kind, name, body):
            inner = dict(bound)
            inner[name] = depth
            return ("B", kind, alpha_key(body, inner, depth + 1))
    raise TypeError(f"not a Term: {t!r}")


def children(t: Term) -> tuple[Term, ...]:
    match t:
        case Apply(_, args):
            return args
        case Binder(_, _, body):
            return (body,)
        case _:
            return ()


def subterm(t: Term, path: Path) -> Term:
    """Node addressed by ``path``; the empty path is the term itself."""
    node = t
    for i, index in enumerate(path):
        kids = children(node)
        if index < 0 or index >= len(kids):
            raise PathError(path[: i + 1], index)
        node = kids[index]
    return node


def replace_at(t: Term, path: Path, new: Term) -> Term:
    """Copy of ``t`` with the node at ``path`` replaced by ``new``."""
    if not path:
        return new
    index = path[0]
    kids = children(t)
    if index < 0 or index >= len(kids):
        raise PathError(path[:1], index)
    child = replace_at(kids[index], path[1:], new)
    match t:
        case Apply(op, args):
            return Apply(op, args[:index] + (child,) + args[index + 1 :])
        case Binder(kind, bound, _):
            return Binder(kind, bound, child)
    raise PathError(path[:1], index)


def iter_paths(t: Term, prefix: Path = ()) -> Iterator[tuple[Path, Term]]:
    """All (path, node) pairs in preorder."""
    yield prefix, t
    for i, child in enumerate(children(t)):
        yield from iter_paths(child, prefix + (i,))


def leaves(t: Term) -> list[Term]:
    return [node for _, node in iter_paths(t) if not children(node)]


def free_identifiers(t: Term, bound: frozenset[str] = frozenset()) -> frozenset[str]:
    match t:
        case Variable(name):
            return frozenset() if name in bound else frozenset((name,))
        case Apply(_, args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= free_identifiers(a, bound)
            return out
        case Binder(_, name, body):
            return free_identifiers(body, bound | {name})
        case _:
            return frozenset()


def contains_op(t: Term, op: str) -> bool:
    return any(isinstance(n, Apply) and n.op == op for _, n in iter_paths(t))


def rename_free(t: Term, mapping: Mapping[str, str]) -> Term:
    """Rename free identifiers; binder-bound occurrences are shielded."""
    if not mapping:
        return t
    match t:
        case Variable(name):
            return Variable(mapping.get(name, name))
        case Apply(op, args):
            return Apply(op, tuple(rename_free(a, mapping) for a in args))
        case Binder(kind, bound, body):
            inner = {k: v for k, v in mapping.items() if k != bound}
            return Binder(kind, bound, rename_free(body, inner))
        case _:
            return t


# ---------------------------------------------------------------------------
# Theory signatures


@dataclass(frozen=True)
class Signature:
    """Operators (with arity, -1 = variadic), constants and binder kinds
    admitted by a theory.  The parser rejects anything outside it."""

    operators: Mapping[str, int] = field(default_factory=dict)
    constants: frozenset[str] = frozenset()
    binders: frozenset[str] = frozenset()

    def merged(self, other: "Signature") -> "Signature":
        ops = dict(self.operators)
        ops.update(other.operators)
        return Signature(ops, self.constants | other.constants, self.binders | other.binders)


#: Everything the default notation table knows about.  Tests and the CLI
#: use this; theory-scoped parsing builds narrower signatures.
FULL_SIGNATURE = Signature(
    operators={
        "eq": 2,
        "and": 2,
        "implies": 2,
        "lt": 2,
        "le": 2,
        "plus": 2,
        "minus": 2,
        "times": 2,
        "div": 2,
        "neg": 1,
        "pow": 2,
        "sqrt": 1,
        "sin": 1,
        "cos": 1,
        "list": -1,
        "open_interval": 2,
        "free_of": 2,
        "contains_sqrt": 1,
        "is_polynomial": 1,
        "nonzero": 1,
    },
    constants=frozenset(("pi",)),
    binders=frozenset(BINDER_KINDS),
)


def validate_term(t: Term, signature: Signature) -> list[str]:
    """Arity and availability problems of ``t`` under ``signature``."""
    problems = []
    for path, node in iter_paths(t):
        match node:
            case Apply(op, args):
                arity = signature.operators.get(op)
                if arity is None:
                    problems.append(f"operator '{op}' not declared")
                elif arity >= 0 and len(args) != arity:
                    problems.append(f"operator '{op}' expects {arity} arguments, got {len(args)}")
            case Binder(kind, _, _):
                if kind not in signature.binders:
                    problems.append(f"binder '{kind}' not declared")
            case Constant(name):
                if name not in signature.constants:
                    problems.append(f"constant '{name}' not declared")
    return problems


# ---------------------------------------------------------------------------
# Notation


@dataclass(frozen=True)
class Notation:
    symbol: str
    precedence: int
    assoc: str  # left | right | none
    fixity: str  # infix | prefix | function


@dataclass(frozen=True)
class NotationTable:
    entries: Mapping[str, Notation]

    def __post_init__(self):
        seen: dict[tuple[str, str], str] = {}
        for op, n in self.entries.items():
            if not n.symbol.isascii():
                raise ValueError(f"notation for '{op}' is not ASCII: {n.symbol!r}")
            if n.fixity not in ("infix", "prefix", "function"):
                raise ValueError(f"notation for '{op}': unknown fixity {n.fixity!r}")
            key = (n.fixity, n.symbol)
            if key in seen:
                raise ValueError(f"symbol {n.symbol!r} claimed by both '{seen[key]}' and '{op}'")
            seen[key] = op

    def for_op(self, op: str) -> Notation:
        try:
            return self.entries[op]
        except KeyError:
            raise TermError(f"no notation entry for operator '{op}'") from None


# Precedence levels, loosest first.  `=` sits below the connectives, so a
# conjunction of equations renders as "(a=b) and (c=d)"; comparisons bind
# tighter than both.  ^ and --> associate to the right, everything else to
# the left.
PREC_EQ = 10
PREC_CONNECTIVE = 20
PREC_CMP = 30
PREC_ADD = 40
PREC_MUL = 50
PREC_NEG = 60
PREC_POW = 70
PREC_ATOM = 1000

DEFAULT_TABLE = NotationTable(
    {
        "eq": Notation("=", PREC_EQ, "left", "infix"),
        "and": Notation("and", PREC_CONNECTIVE, "left", "infix"),
        "implies": Notation("-->", PREC_CONNECTIVE, "right", "infix"),
        "lt": Notation("<", PREC_CMP, "left", "infix"),
        "le": Notation("<=", PREC_CMP, "left", "infix"),
        "plus": Notation("+", PREC_ADD, "left", "infix"),
        "minus": Notation("-", PREC_ADD, "left", "infix"),
        "times": Notation("*", PREC_MUL, "left", "infix"),
        "div": Notation("/", PREC_MUL, "left", "infix"),
        "neg": Notation("-", PREC_NEG, "none", "prefix"),
        "pow": Notation("^", PREC_POW, "right", "infix"),
        "sqrt": Notation("sqrt", PREC_ATOM, "none", "function"),
        "sin": Notation("sin", PREC_ATOM, "none", "function"),
        "cos": Notation("cos", PREC_ATOM, "none", "function"),
        "free_of": Notation("free_of", PREC_ATOM, "none", "function"),
        "contains_sqrt": Notation("contains_sqrt", PREC_ATOM, "none", "function"),
        "is_polynomial": Notation("is_polynomial", PREC_ATOM, "none", "function"),
        "nonzero": Notation("nonzero", PREC_ATOM, "none", "function"),
    }
)


def load_notation_table(path: str) -> NotationTable:
    """Read a notation mapping file.

    One entry per line: ``opid TAB symbol TAB precedence TAB assoc TAB
    fixity``.  Lines starting with ``#`` and blank lines are skipped.
    """
    entries: dict[str, Notation] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 tab-separated fields")
            op, symbol, prec, assoc, fixity = parts
            if assoc not in ("left", "right", "none"):
                raise ValueError(f"{path}:{lineno}: unknown associativity {assoc!r}")
            entries[op] = Notation(symbol, int(prec), assoc, fixity)
    return NotationTable(entries)


# ---------------------------------------------------------------------------
# Cursors and navigation

MOVES = ("to-parent", "to-first-child", "to-next-sibling", "to-prev-sibling")


@dataclass(frozen=True)
class Cursor:
    term: Term
    at: Path = ()
    collapsed: frozenset[Path] = frozenset()

    def __post_init__(self):
        subterm(self.term, self.at)  # raises PathError if invalid
        for p in self.collapsed:
            subterm(self.term, p)
        snapped = collapse_root(self.collapsed, self.at)
        if snapped != self.at:
            object.__setattr__(self, "at", snapped)


def collapse_root(collapsed: frozenset[Path], path: Path) -> Path:
    """Shallowest collapsed strict ancestor of ``path``, or ``path``."""
    for k in range(len(path)):
        if path[:k] in collapsed:
            return path[:k]
    return path


def navigate(c: Cursor, move: str) -> tuple[Cursor, bool]:
    """Apply one keyboard move.

    Returns the new cursor and a boundary flag; a move that would leave the
    tree (or descend into a collapsed node) returns the cursor unchanged
    with the flag set.
    """
    if move not in MOVES:
        raise ValueError(f"unknown move {move!r}; expected one of {MOVES}")
    at = c.at
    if move == "to-parent":
        if not at:
            return c, True
        return replace(c, at=at[:-1]), False
    if move == "to-first-child":
        if at in c.collapsed:
            return c, True
        if not children(subterm(c.term, at)):
            return c, True
        return replace(c, at=at + (0,)), False
    step = 1 if move == "to-next-sibling" else -1
    if not at:
        return c, True
    index = at[-1] + step
    siblings = children(subterm(c.term, at[:-1]))
    if index < 0 or index >= len(siblings):
        return c, True
    return replace(c, at=at[:-1] + (index,)), False


def collapse(c: Cursor, path: Path | None = None) -> Cursor:
    p = c.at if path is None else path
    subterm(c.term, p)
    return Cursor(c.term, collapse_root(c.collapsed, p), c.collapsed | {p})


def expand(c: Cursor, path: Path | None = None) -> Cursor:
    p = c.at if path is None else path
    return replace(c, collapsed=c.collapsed - {p})


# ---------------------------------------------------------------------------
# Outline


@dataclass(frozen=True)
class OutlineNode:
    path: Path
    text: str
    child_count: int
    children: tuple["OutlineNode", ...] = ()


def outline(t: Term, depth: int, table: NotationTable = DEFAULT_TABLE, width: int = 40) -> OutlineNode:
    """Summary tree containing exactly the nodes at path length <= depth."""
    from .render import render_linear  # local import, render depends on terms

    def build(node: Term, path: Path, remaining: int) -> OutlineNode:
        text = render_linear(node, table)
        if len(text) > width:
            text = text[: width - 3] + "..."
        kids = children(node)
        out_children = ()
        if remaining > 0:
            out_children = tuple(
                build(kid, path + (i,), remaining - 1) for i, kid in enumerate(kids)
            )
        return OutlineNode(path, text, len(kids), out_children)

    return build(t, (), depth)
