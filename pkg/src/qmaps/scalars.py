"""Exact rational functions of the formal deformation parameter q.

A :class:`QScalar` is stored as a reduced fraction of two integer
polynomials.  Polynomials are tuples of ints, lowest degree first, with no
trailing zeros; the zero polynomial is the empty tuple.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Tuple, Union

from .errors import PoleAtQ

IntPoly = Tuple[int, ...]

# ---------------------------------------------------------------- int polys


def _trim(coeffs) -> tuple:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _pneg(a):
    return tuple(-c for c in a)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _content(a) -> int:
    g = 0
    for c in a:
        g = gcd(g, int(c))
    return g


def _primitive(a):
    """Scale a rational polynomial to a primitive integer polynomial."""
    if not a:
        return ()
    den = 1
    for c in a:
        if isinstance(c, Fraction):
            den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in a]
    g = _content(ints)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return tuple(ints)


def _pdivmod(a, b):
    """Division with remainder over the rationals."""
    a = [Fraction(c) for c in a]
    quot = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = Fraction(b[-1])
    while len(a) >= len(b) and any(a):
        shift = len(a) - len(b)
        factor = a[-1] / lead
        quot[shift] = factor
        for i, c in enumerate(b):
            a[i + shift] -= factor * c
        a = list(_trim(a))
    return _trim(quot), _trim(a)


@lru_cache(maxsize=65536)
def _pgcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Primitive gcd of two integer polynomials (positive leading coeff)."""
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, _primitive(r)
    return _primitive(a) if a else ()


def _exact_div(a, b) -> IntPoly:
    quot, rem = _pdivmod(a, b)
    assert not rem, "inexact polynomial division"
    return tuple(quot)


def _peval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _pstr(a) -> str:
    """Human/DSL representation of an integer polynomial in q."""
    if not a:
        return "0"
    parts = []
    for k in range(len(a) - 1, -1, -1):
        c = a[k]
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            mono = "q" if k == 1 else f"q^{k}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------- QScalar

Number = Union[int, Fraction]


class QScalar:
    """Reduced rational function num(q)/den(q) with integer coefficients."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: IntPoly = (), den: IntPoly = (1,), *, _reduced=False):
        if not _reduced:
            num, den = _normalize(tuple(num), tuple(den))
        self.num = num
        self.den = den
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def const(cls, value: Number) -> "QScalar":
        value = Fraction(value)
        if value == 0:
            return ZERO
        return cls((value.numerator,), (value.denominator,), _reduced=True)

    @classmethod
    def q_power(cls, k: int) -> "QScalar":
        if k >= 0:
            return cls((0,) * k + (1,), (1,), _reduced=True)
        return cls((1,), (0,) * (-k) + (1,), _reduced=True)

    @classmethod
    def coerce(cls, value) -> "QScalar":
        if isinstance(value, QScalar):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.const(value)
        raise TypeError(f"cannot convert {type(value).__name__} to QScalar")

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.num == (1,) and self.den == (1,)

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("scalar depends on q")
        return Fraction(self.num[0] if self.num else 0, self.den[0])

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return QScalar(_padd(self.num, other.num), self.den)
        num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return QScalar(num, _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return QScalar(_pneg(self.num), self.den, _reduced=True)

    def __sub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return ZERO
        if other.is_one():
            return self
        if self.is_one():
            return other
        if self.den == (1,) and other.den == (1,):
            return QScalar(_pmul(self.num, other.num), (1,), _reduced=True)
        return QScalar(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> "QScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero scalar")
        return QScalar(self.den, self.num)

    def __truediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return QScalar.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def conjugate(self) -> "QScalar":
        # coefficients are real rational functions of a real parameter
        return self

    # comparisons --------------------------------------------------------
    def __eq__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # evaluation ---------------------------------------------------------
    def eval(self, q_value: float, tol: float = 1e-14) -> float:
        """Evaluate at a numeric q; raises :class:`PoleAtQ` at a pole."""
        d = _peval(self.den, float(q_value))
        if abs(d) <= tol:
            raise PoleAtQ(f"denominator {_pstr(self.den)} vanishes at q={q_value}")
        return _peval(self.num, float(q_value)) / d

    def at(self, q_value: Number) -> "QScalar":
        """Exact specialization at a rational value of q."""
        x = Fraction(q_value)
        d = _peval(self.den, x)
        if d == 0:
            raise PoleAtQ(f"denominator {_pstr(self.den)} vanishes at q={q_value}")
        return QScalar.const(_peval(self.num, x) / d)

    def abs_bound(self, q_value: float) -> float:
        return abs(self.eval(q_value))

    # printing -----------------------------------------------------------
    def to_text(self) -> str:
        """A string the DSL scalar grammar parses back to the same value."""
        num = _pstr(self.num)
        if self.den == (1,):
            return num
        den = _pstr(self.den)
        if len([c for c in self.num if c]) > 1:
            num = f"({num})"
        if len([c for c in self.den if c]) > 1 or self.den[-1] != 1:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"QScalar({self.to_text()})"

    __str__ = to_text


def _normalize(num: tuple, den: tuple):
    num = _trim(num)
    den = _trim(den)
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return (), (1,)
    if len(den) > 1 and len(num) > 0:
        g = _pgcd(_primitive(num), _primitive(den))
        if len(g) > 1:
            num = _exact_div(num, g)
            den = _exact_div(den, g)
    num = tuple(Fraction(c) for c in num)
    den = tuple(Fraction(c) for c in den)
    # clear rational denominators jointly, then joint content
    lcm = 1
    for c in num + den:
        lcm = lcm * c.denominator // gcd(lcm, c.denominator)
    num = [int(c * lcm) for c in num]
    den = [int(c * lcm) for c in den]
    g = gcd(_content(num), _content(den))
    num = [c // g for c in num]
    den = [c // g for c in den]
    if den[-1] < 0:
        num = [-c for c in num]
        den = [-c for c in den]
    # strip common powers of q that survived (gcd handles it, kept for speed)
    return tuple(num), tuple(den)


def _coerce_or_none(value):
    if isinstance(value, QScalar):
        return value
    if isinstance(value, (int, Fraction)):
        return QScalar.const(value)
    return None


ZERO = QScalar((), (1,), _reduced=True)
ONE = QScalar((1,), (1,), _reduced=True)
Q = QScalar.q_power(1)


def qs(value) -> QScalar:
    """Shorthand coercion used when writing formulas by hand."""
    return QScalar.coerce(value)


def qp(k: int) -> QScalar:
    """The monomial q**k (k may be negative)."""
    return QScalar.q_power(k)


def eval_scalar(s: QScalar, q_value: float) -> float:
    return s.eval(q_value)
