"""Rule matching, rewriting, canonical forms and predicate evaluation.

Matching is first-order and syntactic: a pattern variable ``?x`` binds
one subterm, repeated occurrences must bind equal subterms, and there is
no associative-commutative matching.  Equational reasoning that needs
commuted or regrouped chains goes through the canonical form instead,
which flattens and sorts plus/times chains while leaving minus, div, pow
and neg intact (several rules are stated on exactly those shapes).

A pattern binder whose bound name is itself a pattern (``d/d?x(?u)``)
binds the name to the subject's bound variable.  Substitution is naive;
rule authors keep binder bodies linear in the bound meta-name, which is
all the shipped corpus needs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .evaluate import EvalError, eval_bool, eval_exact, eval_float
from .render import render_linear
from .terms import (
    Apply,
    Binder,
    Constant,
    Number,
    Path,
    Term,
    TermError,
    Variable,
    contains_op,
    free_identifiers,
    iter_paths,
    replace_at,
    subterm,
)

Bindings = dict[str, Term]
Env = Mapping[str, Union[Fraction, float]]


class RewriteError(TermError):
    """Rewriting failed structurally (bad rule, fuel exhausted)."""


# ---------------------------------------------------------------------------
# Matching and substitution


def is_pattern_var(t: Term) -> bool:
    return isinstance(t, Variable) and t.name.startswith("?")


def match(pattern: Term, subject: Term, bindings: Optional[Bindings] = None) -> Optional[Bindings]:
    """Bindings that make pattern equal subject, or None."""
    out = dict(bindings) if bindings else {}
    if _match(pattern, subject, out):
        return out
    return None


def _match(pattern: Term, subject: Term, bindings: Bindings) -> bool:
    if is_pattern_var(pattern):
        name = pattern.name
        if name in bindings:
            return bindings[name] == subject
        bindings[name] = subject
        return True
    match pattern, subject:
        case (Number(), Number()) | (Variable(), Variable()) | (Constant(), Constant()):
            return pattern == subject
        case Apply(op1, args1), Apply(op2, args2):
            if op1 != op2 or len(args1) != len(args2):
                return False
            return all(_match(p, s, bindings) for p, s in zip(args1, args2))
        case Binder(kind1, bound1, body1), Binder(kind2, bound2, body2):
            if kind1 != kind2:
                return False
            if bound1.startswith("?"):
                if bound1 in bindings:
                    if bindings[bound1] != Variable(bound2):
                        return False
                else:
                    bindings[bound1] = Variable(bound2)
                return _match(body1, body2, bindings)
            return bound1 == bound2 and _match(body1, body2, bindings)
    return False


def substitute(t: Term, bindings: Bindings) -> Term:
    """Instantiate pattern variables in t from bindings."""
    match t:
        case Variable(name) if name in bindings:
            return bindings[name]
        case Number() | Variable() | Constant():
            return t
        case Apply(op, args):
            return Apply(op, tuple(substitute(a, bindings) for a in args))
        case Binder(kind, bound, body):
            if bound.startswith("?"):
                bound_term = bindings.get(bound)
                if not isinstance(bound_term, Variable):
                    raise RewriteError(f"binder meta-name {bound} must bind a variable")
                bound = bound_term.name
            return Binder(kind, bound, substitute(body, bindings))
    raise TypeError(f"not a Term: {t!r}")


# ---------------------------------------------------------------------------
# Rules


@dataclass(frozen=True)
class RewriteRule:
    """Oriented equation lhs -> rhs guarded by zero or more conditions."""

    name: str
    lhs: Term
    rhs: Term
    when: tuple[Term, ...] = ()
    text: str = ""  # display name, e.g. "difference rule"

    def try_at(self, t: Term, path: Path, env: Optional[Env] = None) -> Optional[Term]:
        """Result of applying the rule at path, or None if it doesn't fire."""
        try:
            return apply_rule(self, t, path, env)[0]
        except TermError:
            return None


class NotApplicable(RewriteError):
    """A rule refused to fire; `because` is "match" or "condition"."""

    def __init__(self, because: str, detail: str):
        super().__init__(detail)
        self.because = because


@dataclass(frozen=True)
class Justification:
    """What derives one calculation line from its predecessor."""

    rule: str
    path: Path
    bindings: Mapping[str, Term]


def apply_rule(
    rule: RewriteRule, t: Term, at: Path, env: Optional[Env] = None
) -> tuple[Term, Justification]:
    """Rewrite at a path, with the record needed to replay the step."""
    target = subterm(t, at)
    bindings = match(rule.lhs, target)
    if bindings is None:
        raise NotApplicable("match", f"{rule.name} does not match at {list(at)}")
    for condition in rule.when:
        if eval_pred(substitute(condition, bindings), env or {}) is not True:
            raise NotApplicable("condition", f"{rule.name}: condition not established")
    result = replace_at(t, at, substitute(rule.rhs, bindings))
    return result, Justification(rule.name, at, bindings)


@dataclass(frozen=True)
class RuleSet:
    """Ordered collection of rules; earlier rules win."""

    name: str
    rules: tuple[RewriteRule, ...]

    def __iter__(self):
        return iter(self.rules)


@dataclass(frozen=True)
class RuleApplication:
    """One rewrite step, for step records and feedback."""

    rule: RewriteRule
    ruleset: str
    path: Path
    result: Term


def rewrite_once(
    rulesets: Sequence[RuleSet], t: Term, env: Optional[Env] = None
) -> Optional[RuleApplication]:
    """Leftmost-outermost step: first path in preorder, first rule in order."""
    for path, _ in iter_paths(t):
        for ruleset in rulesets:
            for rule in ruleset:
                result = rule.try_at(t, path, env)
                if result is not None:
                    return RuleApplication(rule, ruleset.name, path, result)
    return None


def normalize(rulesets: Sequence[RuleSet], t: Term, env: Optional[Env] = None, fuel: int = 10000) -> Term:
    """Apply rules to a canonical fixpoint; raises when fuel runs out."""
    current = canonical(t)
    for _ in range(fuel):
        step = rewrite_once(rulesets, current, env)
        if step is None:
            return current
        current = canonical(step.result)
    raise RewriteError(f"no fixpoint within {fuel} steps")


# ---------------------------------------------------------------------------
# Canonical form

_CHAIN_OPS = ("plus", "times")


def _sort_key(t: Term) -> tuple:
    match t:
        case Number(value, _):
            return (0, float(value), "")
        case Variable(name):
            return (1, 0.0, name)
        case Constant(name):
            return (2, 0.0, name)
        case Apply(op, _):
            return (3, 0.0, f"{op}:{render_linear(t)}")
        case Binder(kind, _, _):
            return (4, 0.0, f"{kind}:{render_linear(t)}")
    raise TypeError(f"not a Term: {t!r}")


def _flatten(op: str, t: Term) -> list[Term]:
    if isinstance(t, Apply) and t.op == op:
        return list(itertools.chain.from_iterable(_flatten(op, a) for a in t.args))
    return [t]


def _rebuild(op: str, parts: Sequence[Term]) -> Term:
    acc = parts[0]
    for part in parts[1:]:
        acc = Apply(op, (acc, part))
    return acc


def _fold_chain(op: str, parts: list[Term]) -> Term:
    numeric = [p for p in parts if isinstance(p, Number)]
    rest = sorted((p for p in parts if not isinstance(p, Number)), key=_sort_key)
    is_float = any(n.is_float for n in numeric)
    if op == "plus":
        total = sum((n.value for n in numeric), start=Fraction(0))
        if total != 0 or not rest:
            rest = rest + [Number(total, is_float=is_float)]
        return _rebuild("plus", rest)
    product = Fraction(1)
    for n in numeric:
        product *= n.value
    if product == 0:
        return Number(Fraction(0), is_float=is_float)
    if product == -1 and rest:
        return Apply("neg", (_rebuild("times", rest),))
    if product != 1 or not rest:
        rest = [Number(product, is_float=is_float)] + rest
    return _rebuild("times", rest)


def canonical(t: Term) -> Term:
    """Normal form for equality-up-to-arithmetic checks and tidy display.

    Plus/times chains are flattened, constant-folded and sorted; identity
    elements vanish; literal arithmetic on Numbers is folded.  Minus, div,
    pow and neg keep their structure so shape-specific rules still apply.
    """
    match t:
        case Number() | Variable() | Constant():
            return t
        case Binder(kind, bound, body):
            return Binder(kind, bound, canonical(body))
        case Apply(op, args):
            args = tuple(canonical(a) for a in args)
            if op in _CHAIN_OPS:
                parts = list(itertools.chain.from_iterable(_flatten(op, a) for a in args))
                return _fold_chain(op, parts)
            return _fold_apply(op, args)
    raise TypeError(f"not a Term: {t!r}")


def _as_number(t: Term) -> Optional[Number]:
    return t if isinstance(t, Number) else None


def _fold_apply(op: str, args: tuple[Term, ...]) -> Term:
    zero = Number(Fraction(0))
    match op, args:
        case "minus", (a, b):
            na, nb = _as_number(a), _as_number(b)
            if na and nb:
                return Number(na.value - nb.value, is_float=na.is_float or nb.is_float)
            if nb and nb.value == 0:
                return a
            if na and na.value == 0:
                return canonical(Apply("neg", (b,)))
            if a == b:
                return zero
        case "neg", (a,):
            if isinstance(a, Number):
                return Number(-a.value, is_float=a.is_float)
            if isinstance(a, Apply) and a.op == "neg":
                return a.args[0]
            if isinstance(a, Apply) and a.op == "times" and any(
                isinstance(f, Number) for f in _flatten("times", a)
            ):
                return _fold_chain(
                    "times", [Number(Fraction(-1))] + _flatten("times", a)
                )
        case "div", (a, b):
            na, nb = _as_number(a), _as_number(b)
            if nb and nb.value == 1:
                return a
            if na and nb and nb.value != 0:
                return Number(na.value / nb.value, is_float=na.is_float or nb.is_float)
        case "pow", (a, b):
            nb = _as_number(b)
            if nb and nb.value == 1:
                return a
            if nb and nb.value == 0:
                return Number(Fraction(1), is_float=nb.is_float)
            na = _as_number(a)
            if na and nb and nb.value.denominator == 1 and not (na.value == 0 and nb.value < 0):
                return Number(na.value ** int(nb.value), is_float=na.is_float or nb.is_float)
        case "sqrt", (a,):
            na = _as_number(a)
            if na and na.value >= 0:
                root = _exact_root(na.value)
                if root is not None:
                    return Number(root, is_float=na.is_float)
    return Apply(op, args)


def _exact_root(value: Fraction) -> Optional[Fraction]:
    import math

    rn, rd = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if rn * rn == value.numerator and rd * rd == value.denominator:
        return Fraction(rn, rd)
    return None


def equal_canonical(a: Term, b: Term) -> bool:
    return canonical(a) == canonical(b)


# ---------------------------------------------------------------------------
# Predicates

def _is_polynomial(t: Term) -> bool:
    match t:
        case Number() | Variable() | Constant():
            return True
        case Apply("eq" | "and", args):
            return all(_is_polynomial(a) for a in args)
        case Apply("plus" | "minus" | "times" | "neg", args):
            return all(_is_polynomial(a) for a in args)
        case Apply("pow", (base, Number(value, _))) if value.denominator == 1 and value >= 0:
            return _is_polynomial(base)
        case Apply("div", (numerator, Number(value, _))) if value != 0:
            return _is_polynomial(numerator)
    return False


def eval_pred(t: Term, env: Env) -> Optional[bool]:
    """Three-valued truth of a condition: True, False or None (undecided)."""
    match t:
        case Apply("free_of", (body, Variable(name))):
            return name not in free_identifiers(body)
        case Apply("free_of", _):
            raise RewriteError("free_of needs a variable as its second argument")
        case Apply("contains_sqrt", (body,)):
            return contains_op(body, "sqrt")
        case Apply("is_polynomial", (body,)):
            return _is_polynomial(body)
        case Apply("nonzero", (body,)):
            return _decide_nonzero(body, env)
        case Apply("and", (a, b)):
            left, right = eval_pred(a, env), eval_pred(b, env)
            if left is False or right is False:
                return False
            if left is True and right is True:
                return True
            return None
        case Apply("implies", (a, b)):
            left, right = eval_pred(a, env), eval_pred(b, env)
            if left is False or right is True:
                return True
            if left is True and right is False:
                return False
            return None
        case Apply("eq" | "lt" | "le", _):
            if not free_identifiers(t) <= set(env):
                return None
            try:
                return eval_bool(t, env)
            except EvalError:
                return None
    raise RewriteError(f"not a condition: {render_linear(t)}")


def _decide_nonzero(t: Term, env: Env) -> Optional[bool]:
    if free_identifiers(t) <= set(env):
        try:
            exact = eval_exact(t, env)
            if exact is not None:
                return exact != 0
            return abs(eval_float(t, env)) > 1e-9
        except EvalError:
            return None
    signs = _possible_signs(t)
    if 0 not in signs:
        return True
    if signs == {0}:
        return False
    return None


# ---------------------------------------------------------------------------
# Intervals and sign analysis

_ALL_SIGNS = frozenset((-1, 0, 1))


def _possible_signs(t: Term) -> frozenset[int]:
    """Over-approximation of the sign of t's value over its domain."""
    match t:
        case Number(value, _):
            return frozenset(((value > 0) - (value < 0),))
        case Constant("pi"):
            return frozenset((1,))
        case Apply("sqrt", _):
            return frozenset((0, 1))
        case Apply("neg", (a,)):
            return frozenset(-s for s in _possible_signs(a))
        case Apply("times" | "div", (a, b)):
            sa, sb = _possible_signs(a), _possible_signs(b)
            return frozenset(x * y for x in sa for y in sb)
        case Apply("pow", (a, Number(value, _))) if value.denominator == 1:
            signs = _possible_signs(a)
            if int(value) % 2 == 0:
                return frozenset(s * s for s in signs) | (frozenset((1,)) if -1 in signs else frozenset())
            return signs
        case Apply("plus", (a, b)):
            sa, sb = _possible_signs(a), _possible_signs(b)
            for same in (1, -1):
                if sa <= {0, same} and sb <= {0, same}:
                    out = set()
                    if 0 in sa and 0 in sb:
                        out.add(0)
                    if same in sa or same in sb:
                        out.add(same)
                    return frozenset(out)
            return _ALL_SIGNS
        case Apply("minus", (a, b)):
            return _possible_signs(Apply("plus", (a, Apply("neg", (b,)))))
    return _ALL_SIGNS


@dataclass(frozen=True)
class Interval:
    """Open interval with numerically instantiated bounds."""

    lower: Optional[Union[Fraction, float]]
    upper: Optional[Union[Fraction, float]]
    lower_term: Optional[Term] = None
    upper_term: Optional[Term] = None

    @staticmethod
    def from_term(t: Term, env: Optional[Env] = None) -> "Interval":
        if not (isinstance(t, Apply) and t.op == "open_interval"):
            raise RewriteError(f"not an interval term: {render_linear(t)}")
        lower_t, upper_t = t.args
        return Interval(_bound_value(lower_t, env or {}), _bound_value(upper_t, env or {}), lower_t, upper_t)

    def contains(self, value: Union[Fraction, float]) -> bool:
        if self.lower is not None and not value > self.lower:
            return False
        if self.upper is not None and not value < self.upper:
            return False
        return True


def _bound_value(t: Term, env: Env) -> Union[Fraction, float]:
    exact = eval_exact(t, env)
    if exact is not None:
        return exact
    return eval_float(t, env)


def in_interval(t: Term, interval: Interval, env: Env) -> Optional[bool]:
    """Tri-state membership of t's value in an open interval.

    With a closed environment this is a plain comparison (a domain error
    counts as 'not in').  Otherwise sign analysis may still rule the
    value out; it never rules it in.
    """
    if free_identifiers(t) <= set(env):
        try:
            exact = eval_exact(t, env)
            value: Union[Fraction, float] = exact if exact is not None else eval_float(t, env)
        except EvalError:
            return False
        return interval.contains(value)
    signs = _possible_signs(t)
    if interval.lower is not None and interval.lower >= 0 and signs <= {-1, 0}:
        return False
    if interval.upper is not None and interval.upper <= 0 and signs <= {0, 1}:
        return False
    return None
