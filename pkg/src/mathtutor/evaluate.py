"""Numeric evaluation of terms.

Two routes.  The exact route stays inside the rationals and answers None
as soon as a subterm leaves them (pi, sin, a non-square radicand), which
callers use to decide when a value can be displayed without rounding.
The float route evaluates over the complex numbers so that derivative
binders can be computed by a complex-step perturbation; results with a
non-negligible imaginary part are rejected.

Domain violations (division by zero, square root of a negative real)
raise EvalError rather than producing NaNs.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Mapping, Optional, Union

from .terms import Apply, Binder, Constant, Number, Term, Variable

Exactish = Mapping[str, Fraction]
Floatish = Mapping[str, Union[float, complex]]

_STEP = 1e-30  # complex-step size for derivative binders
_IMAG_TOL = 1e-9


class EvalError(Exception):
    """Evaluation failed: unbound name, domain violation, non-numeric term."""


def _exact_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        raise EvalError("square root of a negative number")
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def eval_exact(t: Term, env: Exactish) -> Optional[Fraction]:
    """Value of t as a Fraction, or None when the rationals don't suffice."""
    match t:
        case Number(value, _):
            return value
        case Variable(name):
            if name not in env:
                raise EvalError(f"unbound identifier {name!r}")
            return Fraction(env[name])
        case Constant(_):
            return None  # pi
        case Apply("plus", (a, b)):
            return _exact2(a, b, env, lambda x, y: x + y)
        case Apply("minus", (a, b)):
            return _exact2(a, b, env, lambda x, y: x - y)
        case Apply("times", (a, b)):
            return _exact2(a, b, env, lambda x, y: x * y)
        case Apply("div", (a, b)):
            den = eval_exact(b, env)
            if den == 0:
                raise EvalError("division by zero")
            num = eval_exact(a, env)
            if num is None or den is None:
                return None
            return num / den
        case Apply("neg", (a,)):
            inner = eval_exact(a, env)
            return None if inner is None else -inner
        case Apply("pow", (a, b)):
            exponent = eval_exact(b, env)
            if exponent is None or exponent.denominator != 1:
                return None
            base = eval_exact(a, env)
            if base is None:
                return None
            if base == 0 and exponent < 0:
                raise EvalError("zero raised to a negative power")
            return base ** int(exponent)
        case Apply("sqrt", (a,)):
            inner = eval_exact(a, env)
            return None if inner is None else _exact_sqrt(inner)
        case Apply("sin" | "cos", _):
            return None
        case Binder():
            return None
        case Apply(op, _):
            raise EvalError(f"not a numeric operator: {op}")
    raise TypeError(f"not a Term: {t!r}")


def _exact2(a: Term, b: Term, env: Exactish, f) -> Optional[Fraction]:
    x = eval_exact(a, env)
    y = eval_exact(b, env)
    if x is None or y is None:
        return None
    return f(x, y)


def eval_float(t: Term, env: Floatish) -> float:
    """Value of t as a float; EvalError if the result isn't real."""
    value = _eval_complex(t, {name: complex(v) for name, v in env.items()})
    if abs(value.imag) > _IMAG_TOL * max(1.0, abs(value.real)):
        raise EvalError(f"result is not real: {value}")
    return value.real


def _is_real(z: complex) -> bool:
    return z.imag == 0.0


def _eval_complex(t: Term, env: Mapping[str, complex]) -> complex:
    match t:
        case Number(value, _):
            return complex(value)
        case Variable(name):
            if name not in env:
                raise EvalError(f"unbound identifier {name!r}")
            return env[name]
        case Constant("pi"):
            return complex(math.pi)
        case Constant(name):
            raise EvalError(f"unknown constant {name!r}")
        case Apply("plus", (a, b)):
            return _eval_complex(a, env) + _eval_complex(b, env)
        case Apply("minus", (a, b)):
            return _eval_complex(a, env) - _eval_complex(b, env)
        case Apply("times", (a, b)):
            return _eval_complex(a, env) * _eval_complex(b, env)
        case Apply("div", (a, b)):
            den = _eval_complex(b, env)
            if den == 0:
                raise EvalError("division by zero")
            return _eval_complex(a, env) / den
        case Apply("neg", (a,)):
            return -_eval_complex(a, env)
        case Apply("pow", (a, b)):
            base = _eval_complex(a, env)
            exponent = _eval_complex(b, env)
            if _is_real(exponent) and exponent.real == int(exponent.real):
                if base == 0 and exponent.real < 0:
                    raise EvalError("zero raised to a negative power")
                return base ** int(exponent.real)
            if _is_real(base) and base.real < 0:
                raise EvalError("negative base with fractional exponent")
            return base ** exponent
        case Apply("sqrt", (a,)):
            inner = _eval_complex(a, env)
            if inner.real < 0 and abs(inner.imag) <= _IMAG_TOL * abs(inner.real):
                raise EvalError("square root of a negative number")
            return cmath.sqrt(inner)
        case Apply("sin", (a,)):
            return cmath.sin(_eval_complex(a, env))
        case Apply("cos", (a,)):
            return cmath.cos(_eval_complex(a, env))
        case Binder("derivative", bound, body):
            if bound not in env:
                raise EvalError(f"derivative at unbound point {bound!r}")
            point = env[bound]
            if not _is_real(point):
                raise EvalError("nested derivative evaluation is not supported")
            shifted = dict(env)
            shifted[bound] = point + complex(0.0, _STEP)
            return complex(_eval_complex(body, shifted).imag / _STEP)
        case Binder(kind, _, _):
            raise EvalError(f"{kind} binder is not numeric")
        case Apply(op, _):
            raise EvalError(f"not a numeric operator: {op}")
    raise TypeError(f"not a Term: {t!r}")


def eval_bool(t: Term, env: Exactish) -> bool:
    """Truth of a comparison/connective term under a rational environment."""
    match t:
        case Apply("and", (a, b)):
            return eval_bool(a, env) and eval_bool(b, env)
        case Apply("implies", (a, b)):
            return (not eval_bool(a, env)) or eval_bool(b, env)
        case Apply("eq" | "lt" | "le" as op, (a, b)):
            return _compare(op, a, b, env)
        case Binder("forall", _, _):
            raise EvalError("cannot decide a quantified statement numerically")
    raise EvalError("not a boolean term")


def _compare(op: str, a: Term, b: Term, env: Exactish) -> bool:
    xa, xb = eval_exact(a, env), eval_exact(b, env)
    if xa is not None and xb is not None:
        left, right = xa, xb
    else:
        left = eval_float(a, env)
        right = eval_float(b, env)
    if op == "eq":
        return _close(left, right)
    if op == "lt":
        return left < right
    return left <= right or _close(left, right)


def _close(left, right) -> bool:
    if isinstance(left, Fraction) and isinstance(right, Fraction):
        return left == right
    return abs(float(left) - float(right)) <= _IMAG_TOL * max(1.0, abs(float(left)), abs(float(right)))


def make_float(value: float, precision: Optional[int] = None) -> Number:
    """A float-marked Number, optionally rounded to a decimal precision."""
    rounded = float(value) if precision is None else round(float(value), precision)
    return Number(Fraction(repr(rounded)), is_float=True)
