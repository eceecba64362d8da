"""The 18-dimensional rational lattice L = L^X + L^{psi,phi} + L^{chi,sigma}.

Vectors live in the ambient space R^{9,1} + R^{5,1} + R^2 with a diagonal
metric.  Internally a vector is a tuple of 18 integers holding *twice* the
coordinates, so half-integral spinor weights hash and compare as plain
integer tuples.

Coordinate slots::

    0..9    x^1 .. x^10            (x^10 timelike)
    10..14  phi^1 .. phi^5
    15      phi                    (timelike)
    16      chi
    17      sigma
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .exactfield import Cyc, i_power

DIM = 18
X_SLOTS = range(0, 10)
PSI_SLOTS = range(10, 16)
PHI_SLOT = 15
CHI_SLOT = 16
SIGMA_SLOT = 17
METRIC = (1,) * 9 + (-1,) + (1,) * 5 + (-1,) + (1, 1)

PSI_CLASSES = ("0", "V", "S", "C")
# paper order of Gamma(L) = Gamma(L^{psi,phi}) x Z_2
CLASS_ORDER = tuple((p, s) for s in (0, 1) for p in PSI_CLASSES)

# ψφ classes as elements of Z2 x Z2: V = S + C
_PSI_BITS = {"0": (0, 0), "S": (1, 0), "C": (0, 1), "V": (1, 1)}
_BITS_PSI = {v: k for k, v in _PSI_BITS.items()}

II91 = "II9,1"


class LatticeError(ValueError):
    pass


# ----------------------------------------------------------------------
# vectors (doubled integer coordinates)

def vec(coords: Sequence) -> tuple[int, ...]:
    """Doubled-integer tuple from exact coordinates (length 18)."""
    if len(coords) != DIM:
        raise LatticeError(f"expected {DIM} coordinates, got {len(coords)}")
    out = []
    for x in coords:
        q = Fraction(x) * 2
        if q.denominator != 1:
            raise LatticeError(f"coordinate {x} is not in (1/2)Z")
        out.append(int(q))
    return tuple(out)


def coords(v: tuple[int, ...]) -> tuple[Fraction, ...]:
    return tuple(Fraction(a, 2) for a in v)


def unit(slot: int, scale=1) -> tuple[int, ...]:
    v = [0] * DIM
    v[slot] = int(2 * Fraction(scale))
    return tuple(v)


def add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def neg(u):
    return tuple(-a for a in u)


def scale(u, k):
    return tuple(a * k for a in u)


def ip4(u, v) -> int:
    """4 * (u, v) as an integer."""
    s = 0
    for g, a, b in zip(METRIC, u, v):
        if a and b:
            s += g * a * b
    return s


def ip(u, v) -> Fraction:
    return Fraction(ip4(u, v), 4)


def norm(u) -> Fraction:
    return Fraction(ip4(u, u), 4)


ZERO_VEC = (0,) * DIM
PHI = unit(PHI_SLOT)
CHI = unit(CHI_SLOT)
SIGMA = unit(SIGMA_SLOT)


def phi_i(i: int) -> tuple[int, ...]:
    """phi^i, i = 1..5."""
    return unit(9 + i)


def lx_vector(xcoords: Sequence) -> tuple[int, ...]:
    return vec(list(xcoords) + [0] * 8)


def psi_vector(pcoords: Sequence) -> tuple[int, ...]:
    return vec([0] * 10 + list(pcoords) + [0, 0])


# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CosetClass:
    psi_phi: str
    chi_sigma: int

    def __add__(self, other: CosetClass) -> CosetClass:
        a, b = _PSI_BITS[self.psi_phi], _PSI_BITS[other.psi_phi]
        return CosetClass(_BITS_PSI[(a[0] ^ b[0], a[1] ^ b[1])],
                          (self.chi_sigma + other.chi_sigma) % 2)

    @property
    def index(self) -> int:
        return CLASS_ORDER.index((self.psi_phi, self.chi_sigma))

    @property
    def sector(self) -> str:
        return "NS" if self.psi_phi in ("0", "V") else "R"

    @property
    def gso(self) -> bool:
        return self.psi_phi in ("0", "S")

    @property
    def parity(self) -> int:
        """Parity in the GSO-projected superalgebra: 0 even, 1 odd."""
        if not self.gso:
            raise LatticeError(f"class {self} is outside the GSO sector")
        return 0 if (self.psi_phi, self.chi_sigma) in (("0", 0), ("S", 1)) else 1

    def __str__(self):
        return f"({self.psi_phi},{self.chi_sigma})"


ALL_CLASSES = tuple(CosetClass(p, s) for p, s in CLASS_ORDER)

_REPS = {
    "0": psi_vector([0] * 6),
    "V": psi_vector([0, 0, 0, 0, 0, 1]),
    "S": psi_vector([Fraction(1, 2)] * 6),
    "C": psi_vector([Fraction(1, 2)] * 5 + [Fraction(-1, 2)]),
}


def representative(g: CosetClass) -> tuple[int, ...]:
    r = _REPS[g.psi_phi]
    return add(r, SIGMA) if g.chi_sigma else r


def psi_class(v) -> str:
    p = v[10:16]
    parities = {a % 2 for a in p}
    if len(parities) != 1:
        raise LatticeError(f"{coords(v)[10:16]} is not in L^(psi,phi)")
    if parities == {0}:
        return "0" if (sum(p) // 2) % 2 == 0 else "V"
    # half-integral: subtract s = (1/2,...,1/2)
    d = sum((a - 1) // 2 for a in p)
    return "S" if d % 2 == 0 else "C"


def _chi_sigma_class(v) -> int:
    a, b = v[CHI_SLOT], v[SIGMA_SLOT]
    if a % 2 or b % 2:
        raise LatticeError("L^(chi,sigma) coordinates must be integers")
    return (a // 2 + b // 2) % 2


def class_of(v) -> CosetClass:
    """Coset class in Gamma(L) (no L^X membership check)."""
    return CosetClass(psi_class(v), _chi_sigma_class(v))


def delta(g1: CosetClass, g2: CosetClass) -> Fraction:
    """Delta(g1, g2) = -(d1, d2) mod Z, returned in [0, 1)."""
    return (-ip(representative(g1), representative(g2))) % 1


# η table exactly as printed: rows = second argument, columns = first
_ETA_ROWS = (
    "1 1 1 1 1 1 1 1",
    "1 -1 y -y -1 1 -y y",
    "1 -y -1 y -1 y 1 -y",
    "1 y -y -1 1 y -y -1",
    "1 -1 -1 1 -1 1 1 -1",
    "1 1 -y -y 1 1 -y -y",
    "1 y 1 y 1 y 1 y",
    "1 -y y -1 -1 y -y 1",
)


def eta_table(y: int = 1, transpose: bool = False) -> dict:
    """eta[(first, second)] -> +-1, read with column = first argument."""
    if y not in (1, -1):
        raise LatticeError("y must be +1 or -1")
    sym = {"1": 1, "-1": -1, "y": y, "-y": -y}
    out = {}
    for r, row in enumerate(_ETA_ROWS):
        for c, entry in enumerate(row.split()):
            first, second = ALL_CLASSES[c], ALL_CLASSES[r]
            if transpose:
                first, second = second, first
            out[(first, second)] = sym[entry]
    return out


def eta_grid_text(table: dict) -> str:
    """8x8 grid, columns = first argument, rows = second argument."""
    head = "       " + " ".join(f"{str(g):>6}" for g in ALL_CLASSES)
    lines = [head]
    for r in ALL_CLASSES:
        cells = " ".join(f"{table[(c, r)]:>6}" for c in ALL_CLASSES)
        lines.append(f"{str(r):>6} {cells}")
    return "\n".join(lines)


# ----------------------------------------------------------------------

@dataclass
class QLattice:
    """Rational lattice given by basis vectors in the ambient 18-space."""

    basis: list
    even_sublattice: str = ""

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def gram(self) -> list[list[Fraction]]:
        return [[ip(a, b) for b in self.basis] for a in self.basis]


def _det(m):
    m = [[Fraction(x) for x in row] for row in m]
    n = len(m)
    det = Fraction(1)
    for i in range(n):
        piv = next((r for r in range(i, n) if m[r][i] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != i:
            m[i], m[piv] = m[piv], m[i]
            det = -det
        det *= m[i][i]
        for r in range(i + 1, n):
            f = m[r][i] / m[i][i]
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[i])]
    return det


def _inverse(m):
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for i in range(n):
        piv = next(r for r in range(i, n) if a[r][i] != 0)
        a[i], a[piv] = a[piv], a[i]
        p = a[i][i]
        a[i] = [x / p for x in a[i]]
        for r in range(n):
            if r != i and a[r][i] != 0:
                f = a[r][i]
                a[r] = [x - f * y for x, y in zip(a[r], a[i])]
    return [row[n:] for row in a]


def _hnf_basis(gens: list[list[int]]) -> list[list[int]]:
    """Row-style integer echelon basis of the Z-span of integer vectors."""
    rows = [list(g) for g in gens if any(g)]
    ncol = len(rows[0])
    basis = []
    col = 0
    while rows and col < ncol:
        nz = [r for r in rows if r[col] != 0]
        if not nz:
            col += 1
            continue
        while len([r for r in rows if r[col] != 0]) > 1:
            nz = sorted((r for r in rows if r[col] != 0), key=lambda r: abs(r[col]))
            p = nz[0]
            for r in nz[1:]:
                q = r[col] // p[col]
                for k in range(ncol):
                    r[k] -= q * p[k]
            rows = [r for r in rows if any(r)]
        p = next(r for r in rows if r[col] != 0)
        if p[col] < 0:
            p[:] = [-x for x in p]
        basis.append(p)
        rows = [r for r in rows if r is not p]
        col += 1
    return basis


def ii91_basis() -> list[tuple[int, ...]]:
    """A Z-basis of II_{9,1} in the coordinates of R^{9,1}.

    II_{9,1} = vectors with all coordinates in Z or all in Z + 1/2 whose
    pairing with (1/2, ..., 1/2; 1/2) is an integer.
    """
    gens = []
    for i in range(10):
        for j in range(i + 1, 10):
            for s in (1, -1):
                v = [0] * 10
                v[i], v[j] = 2, 2 * s
                gens.append(v)
    gens.append([1] * 10)
    rows = _hnf_basis(gens)
    return [tuple(r) + (0,) * 8 for r in rows]


def in_ii91(x) -> bool:
    """Membership of a 10-coordinate (doubled) vector in II_{9,1}."""
    par = {a % 2 for a in x}
    if len(par) != 1:
        return False
    w = sum(x[:9]) - x[9]          # 4 * pairing with (1/2,..,1/2;1/2)
    return w % 4 == 0


# ----------------------------------------------------------------------

class SuperstringLattice:
    """L with its ordered basis, eta map and bimultiplicative cocycle."""

    def __init__(self, lx_basis=II91, y: int = 1):
        if isinstance(lx_basis, str):
            if lx_basis != II91:
                raise LatticeError(f"unknown lattice preset {lx_basis!r}")
            lx = ii91_basis()
            self.preset = II91
        else:
            lx = [tuple(v) if len(v) == DIM else lx_vector(v) for v in lx_basis]
            self.preset = None
        if len(lx) != 10:
            raise LatticeError(f"L^X must have rank 10, got {len(lx)}")
        for v in lx:
            if any(v[10:]):
                raise LatticeError("L^X basis vectors must lie in R^{9,1}")
        g = [[ip(a, b) for b in lx] for a in lx]
        for i in range(10):
            for j in range(10):
                if g[i][j].denominator != 1:
                    raise LatticeError("L^X is not integral")
            if g[i][i] % 2:
                raise LatticeError("L^X is not even")
        if _det(g) == 0:
            raise LatticeError("L^X basis is degenerate")
        self.y = y
        self.lx_basis = lx
        half = Fraction(1, 2)
        psi_basis = [phi_i(i) for i in range(1, 6)] + [psi_vector([half] * 6)]
        self.basis = lx + psi_basis + [CHI, SIGMA]
        self.lattice = QLattice(self.basis, "L^X + L_0^(psi,phi) + L_0^(chi,sigma)")
        self.eta = eta_table(y)
        # coordinates -> basis coefficients
        bm = [[Fraction(a, 2) for a in v] for v in self.basis]
        self._binv = _inverse([list(col) for col in zip(*bm)])
        self._lx_inv = _inverse([[Fraction(v[k], 2) for v in lx] for k in range(10)])
        self._k = self._cocycle_exponents()

    # -- membership / classes -------------------------------------------
    def lx_coefficients(self, v) -> list[Fraction]:
        x = [Fraction(a, 2) for a in v[:10]]
        return [sum(r * c for r, c in zip(row, x)) for row in self._lx_inv]

    def contains(self, v) -> bool:
        try:
            class_of(v)
        except LatticeError:
            return False
        return all(c.denominator == 1 for c in self.lx_coefficients(v))

    def coset_class(self, v) -> CosetClass:
        if not self.contains(v):
            raise LatticeError(f"{[str(c) for c in coords(v)]} is not in L")
        return class_of(v)

    def coefficients(self, v) -> tuple[int, ...]:
        return _coefficients(self, v)

    # -- structure maps ---------------------------------------------------
    def eta_value(self, g1: CosetClass, g2: CosetClass) -> int:
        return self.eta[(g1, g2)]

    def B_exp(self, u, v) -> int:
        """B(u, v) = e^{-i pi (u,v)} eta as a power of i."""
        e = -ip4(u, v) // 2 if ip4(u, v) % 2 == 0 else None
        if e is None:
            raise LatticeError("pairing not in (1/2)Z")
        eta = self.eta[(class_of(u), class_of(v))]
        return (e + (0 if eta == 1 else 2)) % 4

    def B(self, u, v) -> Cyc:
        return i_power(self.B_exp(u, v))

    def _cocycle_exponents(self):
        n = len(self.basis)
        k = [[0] * n for _ in range(n)]
        for i in range(n):
            if i < 10:
                half_norm = norm(self.basis[i]) / 2
                k[i][i] = 2 * (int(half_norm) % 2)
        for i in range(n):
            for j in range(i):
                k[i][j] = (self.B_exp(self.basis[i], self.basis[j]) + k[j][i]) % 4
        return k

    def eps_exp(self, u, v) -> int:
        return _eps_exp(self, u, v)

    def epsilon(self, u, v) -> Cyc:
        return i_power(_eps_exp(self, u, v))

    def structure_maps(self, g1: CosetClass, g2: CosetClass, u=None, v=None) -> dict:
        out = {"Delta": delta(g1, g2), "eta": self.eta_value(g1, g2)}
        if u is not None and v is not None:
            out["B"] = self.B(u, v)
            out["epsilon"] = self.epsilon(u, v)
        return out

    def __hash__(self):
        return hash((self.lx_basis[0], self.y, len(self.lx_basis)))


_COEFF_CACHE: dict = {}


def _coefficients(lat: SuperstringLattice, v) -> tuple[int, ...]:
    key = (id(lat), v)
    hit = _COEFF_CACHE.get(key)
    if hit is not None:
        return hit
    x = [Fraction(a, 2) for a in v]
    out = []
    for row in lat._binv:
        c = sum(r * xx for r, xx in zip(row, x) if r and xx)
        if c.denominator != 1:
            raise LatticeError(f"{[str(t) for t in coords(v)]} is not in L")
        out.append(int(c))
    t = tuple(out)
    _COEFF_CACHE[key] = t
    return t


_EPS_CACHE: dict = {}


def _eps_exp(lat: SuperstringLattice, u, v) -> int:
    key = (id(lat), u, v)
    hit = _EPS_CACHE.get(key)
    if hit is not None:
        return hit
    a = _coefficients(lat, u)
    b = _coefficients(lat, v)
    k = lat._k
    s = 0
    for i, ai in enumerate(a):
        if ai:
            row = k[i]
            for j, bj in enumerate(b):
                if bj and row[j]:
                    s += ai * bj * row[j]
    s %= 4
    _EPS_CACHE[key] = s
    return s


def build_superstring_lattice(lx=II91, y: int = 1) -> SuperstringLattice:
    return SuperstringLattice(lx, y)


def gso_lattice_points(max_abs: int):
    """ψφ vectors with coordinates bounded by max_abs (for tests)."""
    rng = range(-2 * max_abs, 2 * max_abs + 1)
    for p in product(rng, repeat=6):
        if len({a % 2 for a in p}) == 1:
            yield psi_vector([Fraction(a, 2) for a in p])
