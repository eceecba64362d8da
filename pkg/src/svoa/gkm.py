"""q-series, roots of II_{9,1} and the fake monster superalgebra denominator identity.

Lorentzian vectors here are 10-tuples of doubled coordinates (the first ten
slots of a lattice vector), with the last coordinate timelike.  Heights are
h(alpha) = -(r, alpha) for a fixed reference vector r of negative norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from . import lattice as lt

DEFAULT_R = (2, 2, 0, 0, 0, 0, 0, 0, 0, 4)      # (1, 1, 0, ..., 0; 2), norm -2
DEFAULT_HEIGHT = 6


# ----------------------------------------------------------------------
# one-variable truncated series

class QSeries:
    """Power series c_0 + c_1 q + ... + c_N q^N with exact rational coefficients."""

    __slots__ = ("N", "coeffs")

    def __init__(self, coeffs, N: int | None = None):
        coeffs = [Fraction(c) for c in coeffs]
        self.N = len(coeffs) - 1 if N is None else N
        coeffs = coeffs[: self.N + 1]
        self.coeffs = coeffs + [Fraction(0)] * (self.N + 1 - len(coeffs))

    @classmethod
    def one(cls, N: int) -> QSeries:
        return cls([1], N)

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n]

    def __len__(self):
        return self.N + 1

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, QSeries):
            n = min(self.N, other.N)
            return self.coeffs[: n + 1] == other.coeffs[: n + 1]
        return NotImplemented

    def __repr__(self):
        return f"QSeries({[str(c) for c in self.coeffs]})"

    def _coerce(self, other) -> QSeries:
        if isinstance(other, QSeries):
            return other
        return QSeries([other], self.N)

    def __add__(self, other):
        o = self._coerce(other)
        n = min(self.N, o.N)
        return QSeries([a + b for a, b in zip(self.coeffs[: n + 1], o.coeffs)], n)

    __radd__ = __add__

    def __neg__(self):
        return QSeries([-a for a in self.coeffs], self.N)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        o = self._coerce(other)
        n = min(self.N, o.N)
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a:
                for j in range(n + 1 - i):
                    b = o.coeffs[j]
                    if b:
                        out[i + j] += a * b
        return QSeries(out, n)

    __rmul__ = __mul__

    def inverse(self) -> QSeries:
        if not self.coeffs[0]:
            raise ZeroDivisionError("constant term is zero")
        inv = [Fraction(0)] * (self.N + 1)
        inv[0] = 1 / self.coeffs[0]
        for n in range(1, self.N + 1):
            s = sum(self.coeffs[k] * inv[n - k] for k in range(1, n + 1))
            inv[n] = -s * inv[0]
        return QSeries(inv, self.N)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = QSeries.one(self.N), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def substitute(self, step: int) -> QSeries:
        """f(q^step)."""
        out = [Fraction(0)] * (self.N + 1)
        for i, c in enumerate(self.coeffs):
            if i * step > self.N:
                break
            out[i * step] = c
        return QSeries(out, self.N)

    def shift(self, k: int) -> QSeries:
        """q^k f(q), truncated."""
        return QSeries([0] * k + self.coeffs[: self.N + 1 - k], self.N)

    def integers(self) -> list[int]:
        if any(c.denominator != 1 for c in self.coeffs):
            raise ValueError("series has non-integral coefficients")
        return [int(c) for c in self.coeffs]


def euler_phi(N: int, step: int = 1) -> QSeries:
    """phi(q^step) = prod_{n >= 1} (1 - q^{n step}) to order N."""
    co = [0] * (N + 1)
    co[0] = 1
    for m in range(step, N + 1, step):
        for k in range(N, m - 1, -1):
            co[k] -= co[k - m]
    return QSeries(co, N)


def _ratio_power(N: int, exponent: int) -> list[int]:
    """prod_{m>=1} ((1+q^m)/(1-q^m))^exponent, exponent may be negative."""
    co = [0] * (N + 1)
    co[0] = 1
    sgn = 1 if exponent > 0 else -1
    for m in range(1, N + 1):
        for _ in range(abs(exponent)):
            # multiply by (1 + q^m)^sgn and (1 - q^m)^(-sgn)
            if sgn > 0:
                for k in range(N, m - 1, -1):
                    co[k] += co[k - m]
                for k in range(m, N + 1):
                    co[k] += co[k - m]
            else:
                for k in range(m, N + 1):
                    co[k] -= co[k - m]
                for k in range(N, m - 1, -1):
                    co[k] -= co[k - m]
    return co


def c_series(N: int) -> QSeries:
    """8 prod ((1+q^m)/(1-q^m))^8: the root multiplicities c(n)."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return QSeries([8 * x for x in _ratio_power(N, 8)], N)


def a_series(N: int) -> QSeries:
    """prod ((1-q^m)/(1+q^m))^8."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return QSeries(_ratio_power(N, -8), N)


# ----------------------------------------------------------------------
# asymptotics (the only floating-point computation in the package)

@dataclass
class AsymptoticReport:
    n: int
    c: int
    approximation: str
    ratio: float
    tolerance: float | None

    @property
    def within(self) -> bool | None:
        if self.tolerance is None:
            return None
        return abs(self.ratio - 1) <= self.tolerance


ASYMPTOTIC_TOLERANCES = {10: 0.15, 100: 0.05}
# leading constant from the modular transformation of c(q): 2^{-15/4}
PREFACTORS = {"half": "1/2", "derived": "2**(-15/4)"}


def asymptotic_ratio(n: int, tolerance: float | None = None, dps: int = 50,
                     prefactor: str = "half") -> AsymptoticReport:
    """c(n) / (K n^{-11/4} e^{2 pi sqrt(2n)}) with K = 1/2 or the derived 2^{-15/4}."""
    import mpmath

    if prefactor not in PREFACTORS:
        raise ValueError(f"prefactor must be one of {sorted(PREFACTORS)}")

    if n < 1:
        raise ValueError("n must be >= 1")
    c = int(c_series(n)[n])
    with mpmath.workdps(dps):
        k = mpmath.mpf(1) / 2 if prefactor == "half" else mpmath.power(2, mpmath.mpf(-15) / 4)
        approx = k * mpmath.power(n, mpmath.mpf(-11) / 4) \
            * mpmath.exp(2 * mpmath.pi * mpmath.sqrt(2 * n))
        ratio = mpmath.mpf(c) / approx
        text = mpmath.nstr(approx, 20)
    if tolerance is None:
        tolerance = ASYMPTOTIC_TOLERANCES.get(n)
    return AsymptoticReport(n, c, text, float(ratio), tolerance)


# ----------------------------------------------------------------------
# trace identity

@dataclass
class TraceReport:
    N: int
    lattice_side: list
    closed_form: list

    @property
    def equal(self) -> bool:
        return self.lattice_side == self.closed_form


def trace_closed_form(N: int) -> QSeries:
    """8 q phi(q^2)^8 / phi(q)."""
    return (euler_phi(N, 2) ** 8 * euler_phi(N).inverse()).shift(1) * 8


def in_class_zero(lam, mu) -> bool:
    """(lam, mu) integral lies in the class-0 coset of L^(psi,phi) iff sum(lam) + mu is even."""
    return (sum(lam) + mu) % 2 == 0


def trace_lattice_side(N: int) -> QSeries:
    """sum (-1)^m q^{lambda^2/2 - p^2/2 + m(m+1)/2 + 1/2} over
    (lambda, -p-1) in the class-0 part of L^(psi,phi) and m >= |p|."""
    out = [0] * (N + 1)
    r = math.isqrt(2 * N)
    # the exponent is at least (lambda^2 + 1)/2
    for lam in product(range(-r, r + 1), repeat=5):
        l2 = sum(x * x for x in lam)
        if l2 + 1 > 2 * N:
            continue
        # the m-sum contributes exponents >= |p|/2, so |p| <= 2N
        for p in range(-2 * N, 2 * N + 1):
            if not in_class_zero(lam, -p - 1):
                continue
            m = abs(p)
            while True:
                twice = l2 - p * p + m * (m + 1) + 1
                if twice > 2 * N:
                    break
                if twice % 2:
                    raise ArithmeticError("non-integral exponent in the trace sum")
                out[twice // 2] += (-1) ** m
                m += 1
    return QSeries(out, N)


def trace_identity_check(N: int = 8) -> TraceReport:
    if N < 1:
        raise ValueError("N must be >= 1")
    return TraceReport(N, trace_lattice_side(N).integers(), trace_closed_form(N).integers())


# ----------------------------------------------------------------------
# II_{9,1} geometry on doubled 10-tuples

def ip4(u, v) -> int:
    """4 (u, v)."""
    return sum(a * b for a, b in zip(u[:9], v[:9])) - u[9] * v[9]


def height(r, v) -> Fraction:
    return Fraction(-ip4(r, v), 4)


def _check_reference(r) -> tuple:
    r = tuple(r)
    if len(r) != 10:
        raise ValueError("reference vector needs 10 coordinates")
    if ip4(r, r) >= 0:
        raise ValueError("reference vector must be timelike (negative norm)")
    return r


def parse_reference(text: str) -> tuple:
    """'1,1,0,0,0,0,0,0,0,2' (actual coordinates) -> doubled tuple."""
    vals = [Fraction(x.strip()) for x in text.split(",")]
    doubled = [2 * x for x in vals]
    if any(x.denominator != 1 for x in doubled):
        raise ValueError("coordinates must lie in (1/2)Z")
    return _check_reference(int(x) for x in doubled)


def is_primitive(v) -> bool:
    """v / k is not in II_{9,1} for any k >= 2."""
    g = 0
    for a in v:
        g = math.gcd(g, a)
    for k in range(2, g + 1):
        if g % k == 0 and lt.in_ii91(tuple(a // k for a in v)):
            return False
    return True


@dataclass
class RootTable:
    r: tuple
    N: int
    roots: list                      # (vector, height, norm) sorted by height then vector
    multiplicity: dict               # -alpha^2/2 -> c
    simple_roots: list = field(default_factory=list)

    def mult(self, alpha) -> tuple[int, int]:
        n = -Fraction(ip4(alpha, alpha), 8)
        c = self.multiplicity[int(n)]
        return c, c

    def by_height(self) -> dict:
        out: dict = {}
        for v, h, _ in self.roots:
            out.setdefault(h, []).append(v)
        return out

    def null_roots(self) -> list:
        return [v for v, _, n in self.roots if n == 0]


def _cone_vectors_at_height(r, h: int, max_norm4: int = 0) -> list:
    """All v in II_{9,1} with 4 v^2 <= max_norm4 and -(r,v) = h, sorted.

    Depth-first over coordinates with a Cauchy-Schwarz prune on the
    linear height constraint; exact checks at the leaves.
    """
    rs, r10 = r[:9], r[9]
    rs_norm = math.sqrt(sum(x * x for x in rs))
    tail = [math.sqrt(sum(x * x for x in rs[i:])) for i in range(10)]
    sgn = 1 if r10 > 0 else -1
    hi_den = abs(r10) - rs_norm
    if hi_den <= 0:
        raise ValueError("reference vector must be timelike")
    # (r,v) = -h  <=>  sum rs_i a_i - r10 A = -4h   (doubled coordinates);
    # |sum rs a| <= |rs| sqrt(A^2 + max_norm4) bounds |A|
    lo = 4 * h / (abs(r10) + rs_norm) - 2
    hi = (4 * h + math.sqrt(max(max_norm4, 0)) * rs_norm) / hi_den + 2
    out: list = []
    for Aabs in range(max(0, math.floor(lo)), math.ceil(hi) + 1):
        A = sgn * Aabs
        budget = A * A + max_norm4          # sum a_i^2 <= budget
        if budget < 0:
            continue
        _dfs(rs, tail, 0, [], budget, -4 * h + r10 * A, A % 2, A, out, h)
    return sorted(v for v, _ in out)


def iter_positive_roots(r=DEFAULT_R, N: int = DEFAULT_HEIGHT):
    """Yield (alpha, height) for the positive roots, by ascending height."""
    r = _check_reference(r)
    for h in range(1, N + 1):
        for v in _cone_vectors_at_height(r, h):
            yield v, h


def level(v) -> int:
    """-v^2/2 for a lattice vector v of II_{9,1}."""
    return -ip4(v, v) // 8


def _dfs(rs, tail, i, acc, budget, T, par, A, out, h):
    if i == 9:
        if T == 0 and (sum(acc) - A) % 4 == 0:
            out.append((tuple(acc) + (A,), h))
        return
    tr = tail[i]
    if tr == 0:
        if T != 0:
            return
    elif abs(T) > tr * math.sqrt(budget) + 1e-9:
        return
    ri = rs[i]
    if i == 8 and ri:
        if T % ri:
            return
        a = T // ri
        if a % 2 == par and a * a <= budget:
            acc.append(a)
            _dfs(rs, tail, 9, acc, budget - a * a, 0, par, A, out, h)
            acc.pop()
        return
    m = math.isqrt(budget)
    start = -m
    if (start - par) % 2:
        start += 1
    for a in range(start, m + 1, 2):
        acc.append(a)
        _dfs(rs, tail, i + 1, acc, budget - a * a, T - ri * a, par, A, out, h)
        acc.pop()


def enumerate_positive_roots(r=DEFAULT_R, N: int = DEFAULT_HEIGHT) -> RootTable:
    r = _check_reference(r)
    roots = [(v, h, Fraction(ip4(v, v), 4)) for v, h in iter_positive_roots(r, N)]
    top = max((level(v) for v, _, _ in roots), default=0)
    cs = c_series(top).integers()
    mult = {n: cs[n] for n in range(top + 1)}
    simple = [v for v, _, n in roots if n == 0]
    return RootTable(r, N, roots, mult, simple)


def box_scan(r, N: int, bound: int, max_norm4: int = 0) -> list:
    """Brute-force oracle: every doubled vector with spatial |a_i| <= bound
    and |A| <= bound, the timelike coordinate A solved from the height."""
    r = _check_reference(r)
    rs, r10 = r[:9], r[9]
    out = []
    for s in product(range(-bound, bound + 1), repeat=9):
        lin = sum(a * b for a, b in zip(rs, s))
        for h in range(1, N + 1):
            num = lin + 4 * h
            if num % r10:
                continue
            v = s + (num // r10,)
            if abs(v[9]) > bound or not lt.in_ii91(v) or ip4(v, v) > max_norm4:
                continue
            out.append(v)
    return sorted(out)


def restrict_to_box(vectors, bound: int) -> list:
    return sorted(v for v in vectors if max(abs(a) for a in v) <= bound)


# ----------------------------------------------------------------------
# graded series over the positive cone

class GradedSeries:
    """Sparse element of the completed group algebra, truncated at height N."""

    def __init__(self, r, N: int, terms: dict | None = None):
        self.r = tuple(r)
        self.N = N
        self.terms: dict = {}
        zero = (0,) * 10
        for k, c in (terms or {}).items():
            k = tuple(k)
            if c and (k == zero or 0 < height(self.r, k) <= N):
                self.terms[k] = Fraction(c)

    @classmethod
    def one(cls, r, N: int) -> GradedSeries:
        return cls(r, N, {(0,) * 10: 1})

    def __getitem__(self, k) -> Fraction:
        return self.terms.get(tuple(k), Fraction(0))

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedSeries) and self.terms == other.terms

    def __add__(self, other: GradedSeries) -> GradedSeries:
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return GradedSeries(self.r, min(self.N, other.N), out)

    def __mul__(self, other: GradedSeries) -> GradedSeries:
        N = min(self.N, other.N)
        out: dict = {}
        for k1, c1 in self.terms.items():
            h1 = height(self.r, k1)
            for k2, c2 in other.terms.items():
                if h1 + height(self.r, k2) > N:
                    continue
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + c1 * c2
        return GradedSeries(self.r, N, out)


def _factor_coefficients(c: int, order: int) -> list[int]:
    """((1-x)/(1+x))^c to order x^order."""
    co = [0] * (order + 1)
    co[0] = 1
    for _ in range(c):
        # multiply by (1 - x)
        for k in range(order, 0, -1):
            co[k] -= co[k - 1]
        # divide by (1 + x)
        for k in range(1, order + 1):
            co[k] -= co[k - 1]
    return co


_BASE = 1 << 10            # balanced base-B digits; |coordinate| < B/2


def encode(v) -> int:
    """Linear injective packing of a small doubled vector into an int."""
    out = 0
    for a in reversed(v):
        if not -_BASE // 2 < a < _BASE // 2:
            raise OverflowError("coordinate too large to encode")
        out = out * _BASE + a
    return out


def decode(k: int) -> tuple:
    out = []
    for _ in range(10):
        d = k % _BASE
        if d >= _BASE // 2:
            d -= _BASE
        out.append(d)
        k = (k - d) // _BASE
    return tuple(out)


@dataclass
class DenominatorReport:
    r: tuple
    N: int
    lhs: dict
    rhs: dict
    mismatches: list
    root_count: int
    primitive_nulls: int

    @property
    def equal(self) -> bool:
        return not self.mismatches

    def coefficient(self, v) -> tuple[int, int]:
        v = tuple(v)
        return self.lhs.get(v, 0), self.rhs.get(v, 0)


def denominator_lhs(roots, N: int) -> dict:
    """prod over positive roots of ((1-e(a))/(1+e(a)))^{c(-a^2/2)}, truncated.

    ``roots`` is any iterable of (alpha, height).  Terms are bucketed by
    height; each factor is multiplied in place, visiting existing keys from
    the top height down so freshly created terms are never reused as sources
    within the same factor.
    """
    buckets: list[dict] = [dict() for _ in range(N + 1)]
    buckets[0][0] = 1
    cs: list = [8]
    fcache: dict = {}
    for alpha, h in roots:
        lv = level(alpha)
        if lv >= len(cs):
            cs = c_series(max(lv, 2 * len(cs))).integers()
        c = cs[lv]
        top = N // h
        f = fcache.get((c, top))
        if f is None:
            f = fcache[(c, top)] = _factor_coefficients(c, top)
        step = encode(alpha)
        for hs in range(N - h, -1, -1):
            src = buckets[hs]
            if not src:
                continue
            jmax = (N - hs) // h
            for lam, val in list(src.items()):
                tgt = lam
                for j in range(1, jmax + 1):
                    tgt += step
                    b = buckets[hs + j * h]
                    nv = b.get(tgt, 0) + f[j] * val
                    if nv:
                        b[tgt] = nv
                    else:
                        del b[tgt]
    out: dict = {}
    for b in buckets:
        for k, c in b.items():
            out[decode(k)] = c
    return out


def denominator_rhs(primitive_nulls, N: int) -> dict:
    """1 + sum a(n) e(n lambda_0) over primitive null lambda_0 given with heights."""
    a = a_series(N).integers()
    out = {(0,) * 10: 1}
    for v, h in primitive_nulls:
        for n in range(1, N // h + 1):
            k = tuple(n * x for x in v)
            out[k] = out.get(k, 0) + a[n]
    return {k: c for k, c in out.items() if c}


def denominator_check(r=DEFAULT_R, N: int = DEFAULT_HEIGHT, table: RootTable | None = None) -> DenominatorReport:
    r = _check_reference(r)
    prim: list = []
    count = 0

    def stream():
        nonlocal count
        src = ((v, h) for v, h, _ in table.roots) if table is not None else iter_positive_roots(r, N)
        for v, h in src:
            count += 1
            if ip4(v, v) == 0 and is_primitive(v):
                prim.append((v, h))
            yield v, h

    lhs = denominator_lhs(stream(), N)
    rhs = denominator_rhs(prim, N)
    mism = sorted(k for k in set(lhs) | set(rhs) if lhs.get(k, 0) != rhs.get(k, 0))
    return DenominatorReport(r, N, lhs, rhs, mism, count, len(prim))


# ----------------------------------------------------------------------
# Cartan matrix of the simple roots

@dataclass
class CartanData:
    simple_roots: list               # distinct norm-zero vectors
    matrix: list                     # (alpha_i, alpha_j), exact
    parities: tuple = (8, 8)         # each simple root occurs 8 times even and 8 times odd
    checks: dict = field(default_factory=dict)

    def expanded(self) -> tuple[list, list]:
        """The matrix with every simple root repeated 8 times even + 8 odd."""
        labels, rows = [], []
        reps = [(i, p) for i in range(len(self.simple_roots)) for p in (0,) * 8 + (1,) * 8]
        for i, p in reps:
            labels.append((self.simple_roots[i], "even" if p == 0 else "odd"))
            rows.append([self.matrix[i][j] for j, _ in reps])
        return labels, rows


def _proportional(u, v) -> bool:
    return all(u[i] * v[j] == u[j] * v[i] for i in range(10) for j in range(i + 1, 10))


def cartan_matrix(r=DEFAULT_R, N: int = 2, table: RootTable | None = None) -> CartanData:
    r = _check_reference(r)
    table = table or enumerate_positive_roots(r, N)
    simple = [v for v, h, n in table.roots if n == 0 and h <= N]
    mat = [[Fraction(ip4(u, v), 4) for v in simple] for u in simple]
    diag = all(mat[i][i] == 0 for i in range(len(simple)))
    nonpos = all(x <= 0 for row in mat for x in row)
    iff = all((mat[i][j] == 0) == _proportional(simple[i], simple[j])
              for i in range(len(simple)) for j in range(len(simple)))
    integral = all(x.denominator == 1 for row in mat for x in row)
    return CartanData(simple, mat, (8, 8),
                      {"diagonal_zero": diag, "off_diagonal_nonpositive": nonpos,
                       "zero_iff_proportional": iff, "integral": integral})
