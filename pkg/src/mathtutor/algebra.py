"""Closed-form equation solving for a few shapes, and numeric root search.

solve_univariate deliberately knows only what the shipped material needs:
linear equations, pure quadratics (no linear part) and equations with a
single square root around the unknown.  Anything else raises SolveStuck;
the caller turns that into tutoring feedback rather than an answer.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .evaluate import EvalError, eval_bool
from .rewrite import canonical
from .render import render_linear
from .terms import Apply, Binder, Constant, Number, Term, Variable, contains_op, free_identifiers


class SolveStuck(Exception):
    """The equation is outside the solvable fragment."""


def _mentions(t: Term, name: str) -> bool:
    return name in free_identifiers(t)


# ---------------------------------------------------------------------------
# Polynomial coefficient extraction (degrees 0..4, symbolic coefficients)

_MAX_DEGREE = 4

Coeffs = dict[int, Term]


def _c_add(a: Coeffs, b: Coeffs) -> Coeffs:
    out = dict(a)
    for d, t in b.items():
        out[d] = Apply("plus", (out[d], t)) if d in out else t
    return out


def _c_scale(a: Coeffs, factor: Term) -> Coeffs:
    return {d: Apply("times", (factor, t)) for d, t in a.items()}


def _c_mul(a: Coeffs, b: Coeffs) -> Optional[Coeffs]:
    out: Coeffs = {}
    for da, ta in a.items():
        for db, tb in b.items():
            d = da + db
            if d > _MAX_DEGREE:
                return None
            prod = Apply("times", (ta, tb))
            out[d] = Apply("plus", (out[d], prod)) if d in out else prod
    return out


def poly_coeffs(t: Term, name: str) -> Optional[Coeffs]:
    """Coefficients of t as a polynomial in name, or None if it isn't one."""
    if not _mentions(t, name):
        return {0: t}
    match t:
        case Variable(n) if n == name:
            return {1: Number(Fraction(1))}
        case Apply("plus", (a, b)):
            ca, cb = poly_coeffs(a, name), poly_coeffs(b, name)
            return _c_add(ca, cb) if ca is not None and cb is not None else None
        case Apply("minus", (a, b)):
            ca, cb = poly_coeffs(a, name), poly_coeffs(b, name)
            if ca is None or cb is None:
                return None
            return _c_add(ca, _c_scale(cb, Number(Fraction(-1))))
        case Apply("neg", (a,)):
            ca = poly_coeffs(a, name)
            return _c_scale(ca, Number(Fraction(-1))) if ca is not None else None
        case Apply("times", (a, b)):
            ca, cb = poly_coeffs(a, name), poly_coeffs(b, name)
            return _c_mul(ca, cb) if ca is not None and cb is not None else None
        case Apply("div", (a, b)):
            if _mentions(b, name):
                return None
            ca = poly_coeffs(a, name)
            return {d: Apply("div", (t2, b)) for d, t2 in ca.items()} if ca is not None else None
        case Apply("pow", (base, Number(value, _))) if value.denominator == 1 and 0 <= value <= _MAX_DEGREE:
            cb = poly_coeffs(base, name)
            if cb is None:
                return None
            out: Optional[Coeffs] = {0: Number(Fraction(1))}
            for _ in range(int(value)):
                out = _c_mul(out, cb)
                if out is None:
                    return None
            return out
    return None


def _coeff(coeffs: Coeffs, degree: int) -> Term:
    return canonical(coeffs.get(degree, Number(Fraction(0))))


# ---------------------------------------------------------------------------
# Display-friendly construction helpers


def _negated(t: Term) -> Term:
    """Canonical form of -t, preferring a-b over -(b+-a) shapes."""
    t = canonical(t)
    match t:
        case Number(value, is_float):
            return Number(-value, is_float=is_float)
        case Apply("neg", (inner,)):
            return inner
        case Apply("minus", (a, b)):
            return canonical(Apply("minus", (b, a)))
        case Apply("plus", _):
            addends = _plus_chain(t)
            positives = [a for a in addends if not _is_negative(a)]
            negatives = [_strip_neg(a) for a in addends if _is_negative(a)]
            flipped_pos = negatives  # -(a + -b) = b - a
            flipped_neg = positives
            if not flipped_pos:
                return Apply("neg", (t,))
            acc = flipped_pos[0]
            for extra in flipped_pos[1:]:
                acc = Apply("plus", (acc, extra))
            for sub in flipped_neg:
                acc = Apply("minus", (acc, sub))
            return canonical(acc)
    return canonical(Apply("neg", (t,)))


def _plus_chain(t: Term) -> list[Term]:
    if isinstance(t, Apply) and t.op == "plus":
        return _plus_chain(t.args[0]) + _plus_chain(t.args[1])
    return [t]


def _is_negative(t: Term) -> bool:
    return (isinstance(t, Apply) and t.op == "neg") or (isinstance(t, Number) and t.value < 0)


def _strip_neg(t: Term) -> Term:
    if isinstance(t, Apply) and t.op == "neg":
        return t.args[0]
    assert isinstance(t, Number)
    return Number(-t.value, is_float=t.is_float)


def _divided(numerator: Term, denominator: Term) -> Term:
    """numerator/denominator, folding a numeric denominator into a factor."""
    if isinstance(denominator, Number) and denominator.value != 0:
        inverse = Number(1 / denominator.value, is_float=denominator.is_float)
        return canonical(Apply("times", (inverse, numerator)))
    return canonical(Apply("div", (numerator, denominator)))


def _square_factor(value: Fraction) -> tuple[Fraction, Fraction]:
    """value = s^2 * rest with s maximal; both returned as Fractions."""

    def int_part(n: int) -> int:
        s, d = 1, 2
        while d * d <= n:
            while n % (d * d) == 0:
                n //= d * d
                s *= d
            d += 1
        return s

    sn = int_part(value.numerator)
    sd = int_part(value.denominator)
    s = Fraction(sn, sd)
    return s, value / (s * s)


def sqrt_simplify(t: Term) -> Term:
    """Pull perfect-square numeric factors out of square roots."""
    match t:
        case Apply("sqrt", (arg,)):
            arg = canonical(sqrt_simplify(arg))
            coefficient = Fraction(1)
            rest: list[Term] = []
            for factor in _times_chain(arg):
                if isinstance(factor, Number) and not factor.is_float and factor.value > 0:
                    coefficient *= factor.value
                else:
                    rest.append(factor)
            s, remainder = _square_factor(coefficient)
            if s == 1:
                return Apply("sqrt", (arg,))
            inner_parts = ([Number(remainder)] if remainder != 1 else []) + rest
            if not inner_parts:
                return Number(s)
            inner = inner_parts[0]
            for part in inner_parts[1:]:
                inner = Apply("times", (inner, part))
            return canonical(Apply("times", (Number(s), Apply("sqrt", (canonical(inner),)))))
        case Apply(op, args):
            return Apply(op, tuple(sqrt_simplify(a) for a in args))
        case Binder(kind, bound, body):
            return Binder(kind, bound, sqrt_simplify(body))
    return t


def _times_chain(t: Term) -> list[Term]:
    if isinstance(t, Apply) and t.op == "times":
        return _times_chain(t.args[0]) + _times_chain(t.args[1])
    return [t]


# ---------------------------------------------------------------------------
# solve_univariate


def solve_univariate(equation: Term, name: str) -> list[Term]:
    """Solutions of equation for name, each as an equation name = value.

    Supported shapes: linear, pure quadratic (solutions ordered positive
    root first), and a single square root containing the unknown.  Roots
    introduced by squaring are checked against the original equation
    when that check is numeric; symbolic candidates are kept.
    """
    if not (isinstance(equation, Apply) and equation.op == "eq"):
        raise SolveStuck("not an equation")
    lhs, rhs = equation.args
    f = canonical(Apply("minus", (lhs, rhs)))
    if not _mentions(f, name):
        raise SolveStuck(f"the unknown {name} does not occur")

    coeffs = poly_coeffs(f, name)
    if coeffs is not None:
        return _solve_poly(coeffs, name)
    if contains_op(f, "sqrt"):
        return _solve_sqrt(equation, f, name)
    raise SolveStuck(f"cannot solve for {name}: {render_linear(equation)}")


def _solve_poly(coeffs: Coeffs, name: str) -> list[Term]:
    c = {d: _coeff(coeffs, d) for d in range(_MAX_DEGREE + 1)}
    degree = max((d for d, t in c.items() if t != Number(Fraction(0))), default=0)
    if degree == 0:
        raise SolveStuck(f"the unknown {name} cancels out")
    if degree == 1:
        value = _divided(_negated(c[0]), c[1])
        return [Apply("eq", (Variable(name), value))]
    if degree == 2 and c[1] == Number(Fraction(0)):
        radicand = _divided(_negated(c[0]), c[2])
        root = sqrt_simplify(Apply("sqrt", (radicand,)))
        return [
            Apply("eq", (Variable(name), root)),
            Apply("eq", (Variable(name), canonical(Apply("neg", (root,))))),
        ]
    raise SolveStuck(f"polynomial of degree {degree} with a linear part is out of scope")


def _addends(t: Term) -> list[Term]:
    """Top-level sum decomposition, looking through plus, minus and neg."""
    if isinstance(t, Apply) and t.op == "plus":
        return _addends(t.args[0]) + _addends(t.args[1])
    if isinstance(t, Apply) and t.op == "minus":
        negated = [canonical(Apply("neg", (a,))) for a in _addends(t.args[1])]
        return _addends(t.args[0]) + negated
    if isinstance(t, Apply) and t.op == "neg":
        return [canonical(Apply("neg", (a,))) for a in _addends(t.args[0])]
    return [t]


def _solve_sqrt(original: Term, f: Term, name: str) -> list[Term]:
    addends = _addends(f)
    carrying = [a for a in addends if contains_op(a, "sqrt") and _mentions(a, name)]
    rest = [a for a in addends if not (contains_op(a, "sqrt") and _mentions(a, name))]
    if len(carrying) != 1:
        raise SolveStuck("more than one square root around the unknown")
    coefficient, radical = _split_sqrt_addend(carrying[0])
    if radical is None:
        raise SolveStuck("square root is nested too deeply")
    inner = radical.args[0]
    other = _negated(_rebuild_sum(rest)) if rest else Number(Fraction(0))
    # c*sqrt(inner) = other  =>  c^2*inner = other^2
    squared = Apply(
        "eq",
        (
            canonical(Apply("times", (Apply("pow", (coefficient, Number(Fraction(2)))), inner))),
            canonical(Apply("pow", (other, Number(Fraction(2))))),
        ),
    )
    candidates = solve_univariate(squared, name)
    return [s for s in candidates if _check_candidate(original, s, name)]


def _split_sqrt_addend(t: Term) -> tuple[Term, Optional[Apply]]:
    sign = Number(Fraction(1))
    if isinstance(t, Apply) and t.op == "neg":
        sign, t = Number(Fraction(-1)), t.args[0]
    factors = _times_chain(t)
    radicals = [x for x in factors if isinstance(x, Apply) and x.op == "sqrt"]
    others = [x for x in factors if not (isinstance(x, Apply) and x.op == "sqrt")]
    if len(radicals) != 1 or any(contains_op(x, "sqrt") for x in others):
        return sign, None
    coefficient = canonical(_rebuild_product([sign] + others)) if others else sign
    return coefficient, radicals[0]


def _rebuild_sum(parts: Sequence[Term]) -> Term:
    acc = parts[0]
    for p in parts[1:]:
        acc = Apply("plus", (acc, p))
    return canonical(acc)


def _rebuild_product(parts: Sequence[Term]) -> Term:
    acc = parts[0]
    for p in parts[1:]:
        acc = Apply("times", (acc, p))
    return acc


def _check_candidate(original: Term, solution: Term, name: str) -> bool:
    value = solution.args[1]
    if free_identifiers(value):
        return True  # symbolic: cannot decide, keep
    try:
        return eval_bool(original, {name: _as_fraction(value)})
    except EvalError:
        return False


def _as_fraction(t: Term):
    from .evaluate import eval_exact, eval_float

    exact = eval_exact(t, {})
    return exact if exact is not None else eval_float(t, {})


# ---------------------------------------------------------------------------
# Numeric search


def sign_change_brackets(
    f: Callable[[float], float], lo: float, hi: float, steps: int = 512
) -> list[tuple[float, float]]:
    """Subintervals of (lo, hi) across which f changes sign.

    Endpoints are kept strictly inside the open interval; grid points
    where f is undefined are skipped.
    """
    out = []
    previous: Optional[tuple[float, float]] = None
    for i in range(1, steps):
        x = lo + (hi - lo) * i / steps
        try:
            y = f(x)
        except (EvalError, ValueError, ZeroDivisionError, OverflowError):
            previous = None
            continue
        if not math.isfinite(y):
            previous = None
            continue
        if previous is not None:
            x0, y0 = previous
            if y0 == 0.0:
                out.append((x0, x0))
            elif y0 * y < 0:
                out.append((x0, x))
        previous = (x, y)
    return out


def bisect(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-9, limit: int = 200
) -> float:
    """Root of f in [lo, hi] by bisection; needs a sign change."""
    if lo == hi:
        return lo
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError("no sign change on the bracket")
    for _ in range(limit):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0 or (hi - lo) / 2 <= tol:
            return mid
        if flo * fmid < 0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)
