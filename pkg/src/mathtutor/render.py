"""Term rendering: one-line ASCII and presentation markup.

Both views come from the same tree.  The linear form is minimally
parenthesized against the notation table's precedences and is guaranteed
to re-parse to a structurally equal term.  The pretty form is MathML in
which every term node carries a ``data-path`` attribute (dot-separated
child indices, empty string for the root) so a client can map focus and
clicks back to Paths.
"""

from __future__ import annotations

from fractions import Fraction

from .terms import (
    Apply,
    Binder,
    Constant,
    DEFAULT_TABLE,
    NotationTable,
    Number,
    PREC_ATOM,
    PREC_MUL,
    PREC_NEG,
    PREC_POW,
    Path,
    Term,
    TermError,
    Variable,
)

# ---------------------------------------------------------------------------
# Linear rendering

_BINDER_PREC = 1  # binders extend maximally right; parenthesize inside operators


def _number_text(t: Number) -> str:
    if t.is_float:
        return repr(float(t.value))
    return str(t.value)


def _effective_prec(t: Term, table: NotationTable) -> int:
    """How tightly the rendered text binds, for parenthesization."""
    match t:
        case Number(value, is_float):
            negative = value < 0
            fractional = not is_float and value.denominator != 1
            if fractional:
                return PREC_MUL  # renders with a slash
            if negative:
                return PREC_NEG
            return PREC_ATOM
        case Variable() | Constant():
            return PREC_ATOM
        case Apply("list" | "open_interval", _):
            return PREC_ATOM
        case Apply(op, _):
            notation = table.for_op(op)
            if notation.fixity == "function":
                return PREC_ATOM
            return notation.precedence
        case Binder("derivative", _, _):
            return PREC_ATOM  # d/dx(...) is self-delimiting
        case Binder():
            return _BINDER_PREC
    raise TypeError(f"not a Term: {t!r}")


def _left_operand_min(child: Term, notation, table: NotationTable) -> int:
    """Minimum precedence for the left operand of a left-assoc operator.

    Normally equal precedence is fine there (the parser folds left), but a
    right-assoc child printed bare would grab everything to its right on
    re-parse, so it needs parentheses: and(implies(a,b), c) must not render
    as ``a-->b and c``.
    """
    if notation.assoc != "left":
        return notation.precedence + 1
    if isinstance(child, Apply):
        try:
            other = table.for_op(child.op)
        except TermError:
            other = None
        if (
            other is not None
            and other.fixity == "infix"
            and other.precedence == notation.precedence
            and other.assoc == "right"
        ):
            return notation.precedence + 1
    return notation.precedence


def render_linear(t: Term, table: NotationTable = DEFAULT_TABLE) -> str:
    """One ASCII line; parse(render_linear(t)) equals t structurally."""
    return _linear(t, 0, table)


def _linear(t: Term, required: int, table: NotationTable) -> str:
    text = _linear_form(t, table)
    if _effective_prec(t, table) < required:
        return f"({text})"
    return text


def _linear_form(t: Term, table: NotationTable) -> str:
    match t:
        case Number():
            return _number_text(t)
        case Variable(name) | Constant(name):
            return name
        case Apply("list", args):
            return "[" + ",".join(_linear(a, 0, table) for a in args) + "]"
        case Apply("open_interval", (lower, upper)):
            return "{" + _linear(lower, 0, table) + "<..<" + _linear(upper, 0, table) + "}"
        case Apply(op, args):
            notation = table.for_op(op)
            if notation.fixity == "function":
                return notation.symbol + "(" + ",".join(_linear(a, 0, table) for a in args) + ")"
            if notation.fixity == "prefix":
                return notation.symbol + _linear(args[0], notation.precedence, table)
            left_min = _left_operand_min(args[0], notation, table)
            right_min = notation.precedence + (1 if notation.assoc != "right" else 0)
            symbol = notation.symbol
            if symbol[0].isalpha():  # keyword operators need spacing to lex
                symbol = f" {symbol} "
            return _linear(args[0], left_min, table) + symbol + _linear(args[1], right_min, table)
        case Binder("derivative", bound, body):
            return f"d/d{bound}(" + _linear(body, 0, table) + ")"
        case Binder(kind, _, _):
            keyword = "forall" if kind == "forall" else "lam"
            names = []
            body: Term = t
            while isinstance(body, Binder) and body.kind == kind:
                names.append(body.bound)
                body = body.body
            return f"{keyword} {' '.join(names)}. " + _linear(body, 0, table)
    raise TypeError(f"not a Term: {t!r}")


# ---------------------------------------------------------------------------
# Pretty rendering (MathML)

_GREEK = {
    "alpha": "α",
    "beta": "β",
    "gamma": "γ",
    "delta": "δ",
    "phi": "φ",
    "lambda": "λ",
    "pi": "π",
}

_PRETTY_OPS = {
    "eq": "=",
    "and": "∧",
    "implies": "⟹",
    "lt": "&lt;",
    "le": "≤",
    "plus": "+",
    "minus": "−",
    "times": "·",
    "div": "/",
    "neg": "−",
    "pow": "^",
}


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _pretty_name(name: str) -> str:
    primes = len(name) - len(name.rstrip("'"))
    stem = name[: len(name) - primes] if primes else name
    return _GREEK.get(stem, _esc(stem)) + "′" * primes


def _p(path: Path) -> str:
    return ".".join(str(i) for i in path)


def render_pretty(t: Term, table: NotationTable = DEFAULT_TABLE) -> str:
    """Presentation MathML; every term node carries data-path."""
    body = _pretty(t, 0, (), table)
    return f'<math xmlns="http://www.w3.org/1998/Math/MathML">{body}</math>'


def _pretty(t: Term, required: int, path: Path, table: NotationTable) -> str:
    markup = _pretty_form(t, path, table)
    if _effective_prec(t, table) < required:
        return f"<mrow><mo>(</mo>{markup}<mo>)</mo></mrow>"
    return markup


def _pretty_form(t: Term, path: Path, table: NotationTable) -> str:
    attr = f' data-path="{_p(path)}"'
    match t:
        case Number():
            return f"<mn{attr}>{_esc(_number_text(t))}</mn>"
        case Variable(name) | Constant(name):
            return f"<mi{attr}>{_pretty_name(name)}</mi>"
        case Apply("div", (numerator, denominator)):
            top = _pretty(numerator, 0, path + (0,), table)
            bottom = _pretty(denominator, 0, path + (1,), table)
            return f"<mfrac{attr}>{top}{bottom}</mfrac>"
        case Apply("pow", (base, exponent)):
            base_m = _pretty(base, PREC_POW + 1, path + (0,), table)
            exp_m = _pretty(exponent, 0, path + (1,), table)
            return f"<msup{attr}><mrow>{base_m}</mrow><mrow>{exp_m}</mrow></msup>"
        case Apply("sqrt", (radicand,)):
            return f"<msqrt{attr}>{_pretty(radicand, 0, path + (0,), table)}</msqrt>"
        case Apply("list", args):
            parts = [f"<mrow{attr}>", "<mo>[</mo>"]
            for i, a in enumerate(args):
                if i:
                    parts.append("<mo>,</mo>")
                parts.append(_pretty(a, 0, path + (i,), table))
            parts.append("<mo>]</mo></mrow>")
            return "".join(parts)
        case Apply("open_interval", (lower, upper)):
            return (
                f"<mrow{attr}><mo>{{</mo>"
                + _pretty(lower, 0, path + (0,), table)
                + "<mo>&lt;</mo><mo>..</mo><mo>&lt;</mo>"
                + _pretty(upper, 0, path + (1,), table)
                + "<mo>}</mo></mrow>"
            )
        case Apply("neg", (operand,)):
            return f"<mrow{attr}><mo>−</mo>{_pretty(operand, PREC_NEG, path + (0,), table)}</mrow>"
        case Apply(op, args):
            notation = table.for_op(op)
            if notation.fixity == "function":
                parts = [f"<mrow{attr}><mi>{_esc(notation.symbol)}</mi><mo>(</mo>"]
                for i, a in enumerate(args):
                    if i:
                        parts.append("<mo>,</mo>")
                    parts.append(_pretty(a, 0, path + (i,), table))
                parts.append("<mo>)</mo></mrow>")
                return "".join(parts)
            symbol = _PRETTY_OPS.get(op, _esc(notation.symbol))
            left_min = _left_operand_min(args[0], notation, table)
            right_min = notation.precedence + (1 if notation.assoc != "right" else 0)
            left = _pretty(args[0], left_min, path + (0,), table)
            right = _pretty(args[1], right_min, path + (1,), table)
            return f"<mrow{attr}>{left}<mo>{symbol}</mo>{right}</mrow>"
        case Binder("derivative", bound, body):
            frac = f"<mfrac><mi>d</mi><mrow><mi>d</mi><mi>{_pretty_name(bound)}</mi></mrow></mfrac>"
            inner = _pretty(body, 0, path + (0,), table)
            return f"<mrow{attr}>{frac}<mo>(</mo>{inner}<mo>)</mo></mrow>"
        case Binder(kind, bound, body):
            head = "∀" if kind == "forall" else "λ"
            inner = _pretty(body, 0, path + (0,), table)
            return f"<mrow{attr}><mo>{head}</mo><mi>{_pretty_name(bound)}</mi><mo>.</mo>{inner}</mrow>"
    raise TypeError(f"not a Term: {t!r}")


# ---------------------------------------------------------------------------
# Helpers shared by callers


def format_number(value: Fraction | float | int, *, as_float: bool = False) -> Term:
    """Build a Number term from a Python numeric value."""
    if as_float:
        return Number(Fraction(repr(float(value)) if isinstance(value, float) else value), is_float=True)
    return Number(Fraction(value))
