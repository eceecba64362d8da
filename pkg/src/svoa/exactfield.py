"""Exact arithmetic in Q(zeta), zeta a primitive 8th root of unity.

Elements are stored on the power basis {1, z, z^2, z^3} with z^4 = -1, as
four integer numerators over one positive common denominator.  The field
contains i = z^2 and sqrt(2) = z - z^3, which is all the vertex algebra
needs: every phase is e^{i pi k/2} and the only irrational constant is
1/sqrt(2).
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd

__all__ = ["Cyc", "ZERO", "ONE", "I", "SQRT2", "INV_SQRT2", "ZETA",
           "root_of_unity", "arith", "to_cyc"]


def _normalize(a0, a1, a2, a3, d):
    if d < 0:
        a0, a1, a2, a3, d = -a0, -a1, -a2, -a3, -d
    g = gcd(gcd(gcd(a0, a1), gcd(a2, a3)), d)
    if g > 1:
        return a0 // g, a1 // g, a2 // g, a3 // g, d // g
    return a0, a1, a2, a3, d


class Cyc:
    """Immutable element of the 8th cyclotomic field."""

    __slots__ = ("c", "d", "_h")

    def __init__(self, coords=(0, 0, 0, 0), den=1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        fr = [Fraction(x) for x in coords]
        if len(fr) != 4:
            raise ValueError("need four power-basis coordinates")
        lcd = 1
        for x in fr:
            lcd = lcd * x.denominator // gcd(lcd, x.denominator)
        nums = [int(x * lcd) for x in fr]
        *c, d = _normalize(*nums, lcd * int(den))
        self.c = tuple(c)
        self.d = d
        self._h = None

    @classmethod
    def _raw(cls, a0, a1, a2, a3, d):
        obj = object.__new__(cls)
        a0, a1, a2, a3, d = _normalize(a0, a1, a2, a3, d)
        obj.c = (a0, a1, a2, a3)
        obj.d = d
        obj._h = None
        return obj

    @classmethod
    def from_rational(cls, q) -> Cyc:
        q = Fraction(q)
        return cls._raw(q.numerator, 0, 0, 0, q.denominator)

    # ------------------------------------------------------------------
    @property
    def coords(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return tuple(Fraction(x, self.d) for x in self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return self.c[1] == 0 and self.c[2] == 0 and self.c[3] == 0

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.c[0], self.d)

    def __bool__(self):
        return any(self.c)

    def __eq__(self, other):
        if isinstance(other, Cyc):
            return self.c == other.c and self.d == other.d
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return self.c == (q.numerator, 0, 0, 0) and self.d == q.denominator
        return NotImplemented

    def __hash__(self):
        if self._h is None:
            if self.is_rational():
                self._h = hash(Fraction(self.c[0], self.d))
            else:
                self._h = hash((self.c, self.d))
        return self._h

    def __repr__(self):
        return f"Cyc({self})"

    def __str__(self):
        return render(self)

    # ------------------------------------------------------------------
    def __neg__(self):
        a = self.c
        return Cyc._raw(-a[0], -a[1], -a[2], -a[3], self.d)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = to_cyc(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self.c, o.c
        da, db = self.d, o.d
        if da == db:
            return Cyc._raw(a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], da)
        return Cyc._raw(a[0] * db + b[0] * da, a[1] * db + b[1] * da,
                        a[2] * db + b[2] * da, a[3] * db + b[3] * da, da * db)

    __radd__ = __add__

    def __sub__(self, other):
        o = to_cyc(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = to_cyc(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            a = self.c
            return Cyc._raw(a[0] * other, a[1] * other, a[2] * other, a[3] * other, self.d)
        o = to_cyc(other)
        if o is NotImplemented:
            return NotImplemented
        a0, a1, a2, a3 = self.c
        b0, b1, b2, b3 = o.c
        if not (b1 or b2 or b3):
            return Cyc._raw(a0 * b0, a1 * b0, a2 * b0, a3 * b0, self.d * o.d)
        if not (a1 or a2 or a3):
            return Cyc._raw(a0 * b0, a0 * b1, a0 * b2, a0 * b3, self.d * o.d)
        c0 = a0 * b0 - a1 * b3 - a2 * b2 - a3 * b1
        c1 = a0 * b1 + a1 * b0 - a2 * b3 - a3 * b2
        c2 = a0 * b2 + a1 * b1 + a2 * b0 - a3 * b3
        c3 = a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0
        return Cyc._raw(c0, c1, c2, c3, self.d * o.d)

    __rmul__ = __mul__

    def times_zeta(self, k: int) -> Cyc:
        """Multiply by zeta^k (a cyclic shift of coordinates with signs)."""
        k %= 8
        if k == 0:
            return self
        out = [0, 0, 0, 0]
        for j, a in enumerate(self.c):
            e = j + k
            if e >= 8:
                e -= 8
            if e >= 4:
                out[e - 4] -= a
            else:
                out[e] += a
        obj = object.__new__(Cyc)
        obj.c = tuple(out)
        obj.d = self.d
        obj._h = None
        return obj

    def galois(self, k: int) -> Cyc:
        """Apply the automorphism z -> z^k, k odd."""
        out = [0, 0, 0, 0]
        for j, a in enumerate(self.c):
            e = (j * k) % 8
            if e >= 4:
                out[e - 4] -= a
            else:
                out[e] += a
        return Cyc._raw(*out, self.d)

    def conjugate(self) -> Cyc:
        return self.galois(7)

    def norm(self) -> Fraction:
        p = self * self.galois(3) * self.galois(5) * self.galois(7)
        return p.rational()

    def inverse(self) -> Cyc:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta8)")
        if self.is_rational():
            return Cyc._raw(self.d, 0, 0, 0, self.c[0])
        rest = self.galois(3) * self.galois(5) * self.galois(7)
        n = (self * rest).rational()
        return rest * Cyc._raw(n.denominator, 0, 0, 0, n.numerator)

    def __truediv__(self, other):
        o = to_cyc(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = to_cyc(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out


def to_cyc(x):
    if isinstance(x, Cyc):
        return x
    if isinstance(x, int):
        return Cyc._raw(x, 0, 0, 0, 1)
    if isinstance(x, Fraction):
        return Cyc._raw(x.numerator, 0, 0, 0, x.denominator)
    return NotImplemented


ZERO = Cyc._raw(0, 0, 0, 0, 1)
ONE = Cyc._raw(1, 0, 0, 0, 1)
ZETA = Cyc._raw(0, 1, 0, 0, 1)
I = Cyc._raw(0, 0, 1, 0, 1)
SQRT2 = Cyc._raw(0, 1, 0, -1, 1)
INV_SQRT2 = Cyc._raw(0, 1, 0, -1, 2)

_ROOTS = []
for _k in range(8):
    _v = [0, 0, 0, 0]
    _v[_k % 4] = 1 if _k < 4 else -1
    _ROOTS.append(Cyc._raw(*_v, 1))


def root_of_unity(n: int) -> Cyc:
    """Return zeta^n."""
    return _ROOTS[n % 8]


def i_power(k: int) -> Cyc:
    return _ROOTS[(2 * k) % 8]


def arith(a, b, kind: str) -> Cyc:
    a, b = to_cyc(a), to_cyc(b)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"unknown operation {kind!r}")


# ----------------------------------------------------------------------
# text form "a + b*z + c*z^2 + d*z^3"

def render(x: Cyc) -> str:
    parts = []
    for k, q in enumerate(x.coords):
        if q == 0:
            continue
        mag = abs(q)
        basis = ("", "z", "z^2", "z^3")[k]
        if not basis:
            body = str(mag)
        elif mag == 1:
            body = basis
        else:
            body = f"{mag}*{basis}"
        sign = "-" if q < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


_TERM = re.compile(r"^(?:(\d+(?:/\d+)?)\*?)?(z(?:\^([123]))?)?$")


def parse(text: str) -> Cyc:
    t = text.replace(" ", "")
    if not t:
        raise ValueError("empty scalar")
    if t[0] not in "+-":
        t = "+" + t
    coords = [Fraction(0)] * 4
    for sign, body in re.findall(r"([+-])([^+-]+)", t):
        m = _TERM.match(body)
        if not m or not (m.group(1) or m.group(2)):
            raise ValueError(f"bad scalar term {body!r} in {text!r}")
        q = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        k = 0
        if m.group(2):
            k = int(m.group(3)) if m.group(3) else 1
        coords[k] += q if sign == "+" else -q
    return Cyc(coords)
