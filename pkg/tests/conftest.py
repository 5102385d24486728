"""Shared fixtures: the corpus and deterministic term generators.

The generators only emit terms in the parser's image: no neg wrapped
directly around a literal and no div of two plain integers, since the
parser folds both shapes into a single Number.  Everything else in the
language is fair game, including float-marked literals, pattern
variables, primed names, and all three binder kinds.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from mathtutor.knowledge import default_corpus
from mathtutor.terms import Apply, Binder, Constant, Number, Term, Variable

NAMES = ("x", "y", "z", "u", "v", "r", "alpha", "A", "f'")
PATTERN_NAMES = ("?a", "?b", "?u1", "?x")

UNARY = ("neg", "sqrt", "sin", "cos", "nonzero")
BINARY = ("plus", "minus", "times", "div", "pow", "eq", "lt", "le", "and", "implies")
BINDERS = ("forall", "derivative", "lambda")


@pytest.fixture(scope="session")
def kb():
    return default_corpus()


def _folds_away(op: str, args: tuple[Term, ...]) -> bool:
    """Shapes the parser collapses into one Number literal."""
    if op == "neg" and isinstance(args[0], Number):
        return True
    if op == "div" and all(
        isinstance(a, Number) and not a.is_float and a.value.denominator == 1 for a in args
    ):
        return True
    return False


def random_number(rng: random.Random) -> Number:
    kind = rng.randrange(4)
    if kind == 0:
        return Number(Fraction(rng.randint(0, 50)))
    if kind == 1:
        return Number(Fraction(-rng.randint(1, 50)))
    if kind == 2:
        return Number(Fraction(rng.randint(1, 20), rng.randint(2, 9)))
    return Number(Fraction(str(round(rng.uniform(-40, 40), 2))), is_float=True)


def random_term(rng: random.Random, depth: int, pattern_ok: bool = True) -> Term:
    if depth <= 0 or rng.random() < 0.25:
        kind = rng.randrange(4 if pattern_ok else 3)
        if kind == 0:
            return random_number(rng)
        if kind == 1:
            return Variable(rng.choice(NAMES))
        if kind == 2:
            return Constant("pi")
        return Variable(rng.choice(PATTERN_NAMES))
    roll = rng.random()
    if roll < 0.18:
        kind = rng.choice(BINDERS)
        name = rng.choice(NAMES[:6])
        return Binder(kind, name, random_term(rng, depth - 1, pattern_ok))
    if roll < 0.28:
        op = rng.choice(("list", "open_interval"))
        count = 2 if op == "open_interval" else rng.randint(1, 3)
        return Apply(op, tuple(random_term(rng, depth - 1, pattern_ok) for _ in range(count)))
    if roll < 0.5:
        op = rng.choice(UNARY)
        while True:
            arg = random_term(rng, depth - 1, pattern_ok)
            if not _folds_away(op, (arg,)):
                return Apply(op, (arg,))
    op = rng.choice(BINARY)
    while True:
        args = (
            random_term(rng, depth - 1, pattern_ok),
            random_term(rng, depth - 1, pattern_ok),
        )
        if not _folds_away(op, args):
            return Apply(op, args)


@st.composite
def term_strategy(draw, max_depth: int = 4, pattern_ok: bool = True):
    seed = draw(st.integers(0, 2**32 - 1))
    depth = draw(st.integers(0, max_depth))
    return random_term(random.Random(seed), depth, pattern_ok)


@st.composite
def ground_term_strategy(draw, max_depth: int = 4):
    return draw(term_strategy(max_depth=max_depth, pattern_ok=False))
