"""Linear-notation parser.

The grammar is conventional infix notation with explicit ``*`` (no
juxtaposition), plus a few structural forms: ``[a,b,...]`` lists,
``{lo<..<hi}`` open intervals, ``forall x y. body`` / ``lam x. body``
binders and ``d/dx(body)`` derivatives.  ``?name`` is a pattern variable
(a Variable whose name starts with ``?``).

Identifiers may end in primes (``A'``).  An identifier applied to an
argument list must be a declared function symbol; unknown identifiers on
their own become Variables.  Integer fractions like ``27/4`` and literal
negations like ``-3`` fold into a single Number so that every exact
rational round-trips through its rendering.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .terms import (
    Apply,
    Binder,
    Constant,
    DEFAULT_TABLE,
    FULL_SIGNATURE,
    Notation,
    NotationTable,
    Number,
    Signature,
    Term,
    TermError,
    Variable,
)


class ParseError(TermError):
    """Syntax error with a character position and expected-token hint."""

    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        self.position = position
        self.expected = expected
        suffix = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at position {position}{suffix}")


@dataclass(frozen=True)
class Token:
    kind: str  # num | ident | pattern | deriv | punct | end
    text: str
    position: int
    value: Fraction | None = None
    is_float: bool = False


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*'*")
_NUMBER_RE = re.compile(r"\d+(\.\d+)?")
_DERIV_RE = re.compile(r"d/d(\??[A-Za-z_][A-Za-z0-9_]*'*)(?=\()")

_KEYWORDS = ("forall", "lam")

# Structural punctuation always understood by the lexer; operator symbols
# come from the notation table.
_CORE_PUNCT = ("<..<", "(", ")", "[", "]", "{", "}", ",", ".")


def _punctuation(table: NotationTable) -> list[str]:
    symbols = {s for s in _CORE_PUNCT}
    for notation in table.entries.values():
        if not notation.symbol[0].isalpha():
            symbols.add(notation.symbol)
    return sorted(symbols, key=len, reverse=True)  # longest match first


def tokenize(text: str, table: NotationTable = DEFAULT_TABLE) -> list[Token]:
    punct = _punctuation(table)
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "d":
            m = _DERIV_RE.match(text, i)
            if m:
                tokens.append(Token("deriv", m.group(1), i))
                i = m.end()
                continue
        if ch.isdigit():
            m = _NUMBER_RE.match(text, i)
            assert m is not None
            literal = m.group(0)
            if "." in literal:
                whole, frac = literal.split(".")
                value = Fraction(int(whole + frac), 10 ** len(frac))
                tokens.append(Token("num", literal, i, value, is_float=True))
            else:
                tokens.append(Token("num", literal, i, Fraction(int(literal))))
            i = m.end()
            continue
        if ch == "?":
            m = _IDENT_RE.match(text, i + 1)
            if not m:
                raise ParseError("'?' must introduce a pattern variable", i, ("identifier",))
            tokens.append(Token("pattern", "?" + m.group(0), i))
            i = m.end()
            continue
        if ch.isalpha() or ch == "_":
            m = _IDENT_RE.match(text, i)
            assert m is not None
            tokens.append(Token("ident", m.group(0), i))
            i = m.end()
            continue
        for symbol in punct:
            if text.startswith(symbol, i):
                tokens.append(Token("punct", symbol, i))
                i += len(symbol)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, signature: Signature, table: NotationTable):
        self.text = text
        self.signature = signature
        self.table = table
        self.tokens = tokenize(text, table)
        self.pos = 0
        self.infix: dict[str, tuple[str, Notation]] = {}
        self.prefix: dict[str, tuple[str, Notation]] = {}
        self.functions: dict[str, str] = {}
        for op, notation in table.entries.items():
            if notation.fixity == "infix":
                self.infix[notation.symbol] = (op, notation)
            elif notation.fixity == "prefix":
                self.prefix[notation.symbol] = (op, notation)
            else:
                self.functions[notation.symbol] = op

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, text: str) -> Token:
        token = self.next()
        if token.text != text:
            raise ParseError(f"unexpected {token.text!r}", token.position, (repr(text),))
        return token

    def _check_available(self, op: str, token: Token) -> None:
        if op not in self.signature.operators:
            raise ParseError(
                f"operator '{token.text}' is not available in this theory", token.position
            )

    def parse(self) -> Term:
        term = self.expression(0)
        token = self.next()
        if token.kind != "end":
            raise ParseError(f"trailing input {token.text!r}", token.position, ("end of input",))
        return term

    def expression(self, min_prec: int) -> Term:
        left = self.primary()
        while True:
            token = self.peek()
            symbol = token.text
            entry = None
            if token.kind == "punct" and symbol in self.infix:
                entry = self.infix[symbol]
            elif token.kind == "ident" and symbol in self.infix:
                entry = self.infix[symbol]
            if entry is None:
                return left
            op, notation = entry
            if notation.precedence < min_prec:
                return left
            self.next()
            self._check_available(op, token)
            next_min = notation.precedence + (0 if notation.assoc == "right" else 1)
            right = self.expression(next_min)
            left = _fold(Apply(op, (left, right)))

    def primary(self) -> Term:
        token = self.next()
        if token.kind == "num":
            assert token.value is not None
            return Number(token.value, is_float=token.is_float)
        if token.kind == "pattern":
            return Variable(token.text)
        if token.kind == "deriv":
            return self.derivative(token)
        if token.kind == "ident":
            return self.identifier(token)
        if token.kind == "punct":
            if token.text in self.prefix:
                op, notation = self.prefix[token.text]
                self._check_available(op, token)
                operand = self.expression(notation.precedence)
                return _fold(Apply(op, (operand,)))
            if token.text == "(":
                inner = self.expression(0)
                self.expect(")")
                return inner
            if token.text == "[":
                return self.list_literal(token)
            if token.text == "{":
                return self.interval(token)
        raise ParseError(f"unexpected {token.text or 'end of input'!r}", token.position, ("expression",))

    def derivative(self, token: Token) -> Term:
        if "derivative" not in self.signature.binders:
            raise ParseError("derivative is not available in this theory", token.position)
        self.expect("(")
        body = self.expression(0)
        self.expect(")")
        return Binder("derivative", token.text, body)

    def identifier(self, token: Token) -> Term:
        name = token.text
        if name in _KEYWORDS:
            return self.binder(token)
        if name in self.infix or (name in self.prefix):
            raise ParseError(f"unexpected operator {name!r}", token.position, ("expression",))
        if self.peek().text == "(":
            op = self.functions.get(name)
            if op is None:
                raise ParseError(f"unknown operator application '{name}(...)'", token.position)
            self._check_available(op, token)
            self.next()
            args = []
            if self.peek().text != ")":
                args.append(self.expression(0))
                while self.peek().text == ",":
                    self.next()
                    args.append(self.expression(0))
            self.expect(")")
            arity = self.signature.operators[op]
            if arity >= 0 and len(args) != arity:
                raise ParseError(
                    f"'{name}' expects {arity} argument(s), got {len(args)}", token.position
                )
            return Apply(op, tuple(args))
        if name in self.signature.constants:
            return Constant(name)
        return Variable(name)

    def binder(self, token: Token) -> Term:
        kind = "forall" if token.text == "forall" else "lambda"
        if kind not in self.signature.binders:
            raise ParseError(f"binder '{token.text}' is not available in this theory", token.position)
        names = []
        while (
            self.peek().kind == "pattern"
            or (self.peek().kind == "ident" and self.peek().text not in self.infix and self.peek().text not in _KEYWORDS)
        ):
            names.append(self.next().text)
        if not names:
            raise ParseError("binder needs at least one identifier", self.peek().position, ("identifier",))
        self.expect(".")
        body = self.expression(0)
        for name in reversed(names):
            body = Binder(kind, name, body)
        return body

    def list_literal(self, token: Token) -> Term:
        if "list" not in self.signature.operators:
            raise ParseError("lists are not available in this theory", token.position)
        items = []
        if self.peek().text != "]":
            items.append(self.expression(0))
            while self.peek().text == ",":
                self.next()
                items.append(self.expression(0))
        self.expect("]")
        return Apply("list", tuple(items))

    def interval(self, token: Token) -> Term:
        if "open_interval" not in self.signature.operators:
            raise ParseError("intervals are not available in this theory", token.position)
        lower = self.expression(0)
        self.expect("<..<")
        upper = self.expression(0)
        self.expect("}")
        return Apply("open_interval", (lower, upper))


def _fold(t: Apply) -> Term:
    """Constant-fold the literal forms the renderer emits for Numbers.

    Exactly two folds, so rationals and negative literals are single
    Number nodes: ``-n`` and ``p/q`` over plain integer literals.  Floats
    and everything else keep their structure.
    """
    match t:
        case Apply("neg", (Number(value, is_float),)):
            return Number(-value, is_float)
        case Apply("div", (Number(a, False), Number(b, False))) if b != 0 and a.denominator == 1 and b.denominator == 1:
            return Number(a / b)
    return t


def parse(
    text: str,
    signature: Signature = FULL_SIGNATURE,
    table: NotationTable = DEFAULT_TABLE,
) -> Term:
    """Parse linear notation into a Term.

    Raises ParseError (with ``.position``) on malformed input, operators
    missing from ``signature``, unknown function applications and arity
    mismatches.
    """
    return _Parser(text, signature, table).parse()
