"""Fock space V = S(h^-) (x) C[L]: monomials, sparse states and gradings.

A monomial is a pair ``(osc, mom)``:

* ``osc`` is a sorted tuple of ``(slot, n)`` pairs, one per factor
  ``e_slot(-n)`` with ``n >= 1`` (repeated pairs encode powers);
* ``mom`` is the doubled-integer momentum tuple from :mod:`svoa.lattice`.

Heisenberg oscillators along the 18 coordinate directions suffice since the
metric is diagonal: ``[e_d(m), e_d'(n)] = m delta_{m+n,0} g_dd' ``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from . import lattice as lt
from .exactfield import ONE, ZERO, Cyc, parse, render, to_cyc

Monomial = tuple  # (osc, mom)

SLOT_NAMES = tuple([f"x{i}" for i in range(1, 11)] + [f"phi{i}" for i in range(1, 6)]
                   + ["phi", "chi", "sigma"])


def monomial(osc: Iterable = (), mom=lt.ZERO_VEC) -> Monomial:
    return (tuple(sorted(osc)), tuple(mom))


VACUUM_MONO = monomial()


class State:
    """Sparse linear combination of monomials with Cyc coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict = {}
        if terms:
            for m, c in dict(terms).items():
                c = to_cyc(c)
                if c:
                    self.terms[m] = c

    @classmethod
    def _wrap(cls, terms: dict) -> State:
        s = object.__new__(cls)
        s.terms = terms
        return s

    @classmethod
    def mono(cls, osc=(), mom=lt.ZERO_VEC, coeff=ONE) -> State:
        return cls({monomial(osc, mom): coeff})

    # container protocol
    def __iter__(self) -> Iterator:
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, m) -> Cyc:
        return self.terms.get(m, ZERO)

    def __eq__(self, other):
        if isinstance(other, State):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # linear structure
    def __add__(self, other: State) -> State:
        if not isinstance(other, State):
            if other == 0:
                return self
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return State._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return State._wrap({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: State) -> State:
        return self + (-other)

    def scale(self, k) -> State:
        k = to_cyc(k)
        if not k:
            return State()
        if k == 1:
            return self
        return State._wrap({m: c * k for m, c in self.terms.items()})

    def __mul__(self, k):
        if isinstance(k, State):
            return NotImplemented
        return self.scale(k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self.scale(ONE / to_cyc(k))

    def momenta(self) -> set:
        return {m[1] for m in self.terms}

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (t[0][1], t[0][0]))

    def __repr__(self):
        if not self.terms:
            return "State(0)"
        parts = [f"({render(c)})*{mono_str(m)}" for m, c in self.sorted_terms()]
        return "State(" + " + ".join(parts) + ")"


def accumulate(out: dict, m, c) -> None:
    """out[m] += c, dropping zeros."""
    v = out.get(m)
    if v is None:
        if c:
            out[m] = c
    else:
        v = v + c
        if v:
            out[m] = v
        else:
            del out[m]


def linear_sum(items: Iterable[tuple]) -> State:
    """Sum of coefficient * State pairs."""
    out: dict = {}
    for k, s in items:
        k = to_cyc(k)
        if not k:
            continue
        for m, c in s.terms.items():
            accumulate(out, m, c * k)
    return State._wrap(out)


VACUUM = State.mono()


def exp_state(mu) -> State:
    return State.mono((), mu)


def mono_str(m: Monomial) -> str:
    osc, mom = m
    parts = [f"{SLOT_NAMES[d]}(-{n})" for d, n in osc]
    mom_nz = [(i, Fraction(a, 2)) for i, a in enumerate(mom) if a]
    if mom_nz:
        parts.append("e^{" + "+".join(f"{q}{SLOT_NAMES[i]}" for i, q in mom_nz) + "}")
    return " ".join(parts) if parts else "1"


# ----------------------------------------------------------------------
# oscillator helpers

def osc_degree(osc) -> int:
    return sum(n for _, n in osc)


def osc_counter(osc) -> Counter:
    return Counter(osc)


def counter_to_osc(cnt) -> tuple:
    out = []
    for key in sorted(cnt):
        out.extend([key] * cnt[key])
    return tuple(out)


def direction_terms(h) -> list[tuple[int, Fraction]]:
    """Expand a direction (18-vector of rationals, or a slot index) onto slots."""
    if isinstance(h, int):
        return [(h, Fraction(1))]
    return [(d, Fraction(x)) for d, x in enumerate(h) if x]


def heis_apply(h, n: int, v: State) -> State:
    """Apply h(n) to v, h a slot index or an 18-vector of coordinates."""
    out: dict = {}
    for d, hd in direction_terms(h):
        g = lt.METRIC[d]
        for (osc, mom), c in v.terms.items():
            if n < 0:
                m = (tuple(sorted(osc + ((d, -n),))), mom)
                accumulate(out, m, c * hd)
            elif n == 0:
                val = hd * g * Fraction(mom[d], 2)
                if val:
                    accumulate(out, (osc, mom), c * val)
            else:
                k = osc.count((d, n))
                if not k:
                    continue
                lst = list(osc)
                lst.remove((d, n))
                accumulate(out, (tuple(lst), mom), c * (hd * g * n * k))
    return State._wrap(out)


# ----------------------------------------------------------------------
# gradings

def l0_of(m: Monomial) -> Fraction:
    """L0 eigenvalue of a monomial for omega = omega^M + omega^Gh."""
    osc, mom = m
    rho4 = 2 * mom[lt.PHI_SLOT] + mom[lt.CHI_SLOT] + 3 * mom[lt.SIGMA_SLOT]  # 4(rho,mu)
    return osc_degree(osc) + Fraction(lt.ip4(mom, mom), 8) - Fraction(rho4, 4)


def ghost_number_of(m: Monomial) -> Fraction:
    mom = m[1]
    return Fraction(-mom[lt.CHI_SLOT] + mom[lt.SIGMA_SLOT], 2)


def picture_of(m: Monomial) -> Fraction:
    mom = m[1]
    return Fraction(mom[lt.PHI_SLOT] + mom[lt.CHI_SLOT], 2)


@dataclass(frozen=True)
class Grading:
    coset: lt.CosetClass
    oscillator_degree: int
    l0: Fraction
    ghost_number: Fraction
    picture: Fraction
    parity: int | None        # None outside the GSO sector


class GradingError(ValueError):
    pass


def grade_monomial(m: Monomial) -> Grading:
    cls = lt.class_of(m[1])
    return Grading(cls, osc_degree(m[0]), l0_of(m), ghost_number_of(m), picture_of(m),
                   cls.parity if cls.gso else None)


def grade(v: State, keys=("coset", "l0", "ghost_number", "picture")) -> Grading:
    """Common grading of all monomials of v (oscillator degree may differ
    only if it is excluded from ``keys``)."""
    if not v:
        raise GradingError("the zero state has no grading")
    grades = {m: grade_monomial(m) for m in v.terms}
    first = next(iter(grades.values()))
    for key in keys:
        vals = {getattr(g, key) for g in grades.values()}
        if len(vals) > 1:
            raise GradingError(f"state is inhomogeneous in {key}: {sorted(map(str, vals))}")
    if "oscillator_degree" not in keys:
        return Grading(first.coset, -1, first.l0, first.ghost_number, first.picture, first.parity)
    return first


def coset_of(v: State) -> lt.CosetClass:
    classes = {lt.class_of(m[1]) for m in v.terms}
    if len(classes) != 1:
        raise GradingError(f"state mixes coset classes {sorted(map(str, classes))}")
    return classes.pop()


def parity(v: State) -> int:
    return coset_of(v).parity


# ----------------------------------------------------------------------
# enumeration

def partitions(n: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of n into parts <= max_part, parts non-increasing."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, max_part), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def colored_oscillators(degree: int, slots: Sequence[int]) -> Iterator[tuple]:
    """All oscillator tuples of total degree ``degree`` over the given slots."""
    slots = tuple(slots)
    # distribute modes: choose a multiset of (slot, n) with sum n == degree
    items = [(d, n) for n in range(1, degree + 1) for d in slots]

    def rec(i, remaining, acc):
        if remaining == 0:
            yield tuple(sorted(acc))
            return
        if i == len(items):
            return
        d, n = items[i]
        maxk = remaining // n
        for k in range(maxk, -1, -1):
            yield from rec(i + 1, remaining - k * n, acc + [(d, n)] * k)

    yield from rec(0, degree, [])


def count_colored(degree: int, colors: int) -> int:
    """Coefficient of q^degree in prod (1-q^n)^(-colors), by a direct recursion."""
    coeffs = [1] + [0] * degree
    for n in range(1, degree + 1):
        for _ in range(colors):
            for k in range(n, degree + 1):
                coeffs[k] += coeffs[k - n]
    return coeffs[degree]


def enumerate_monomials(mom, max_degree: int, slots=range(lt.DIM)) -> list[Monomial]:
    out = []
    for deg in range(max_degree + 1):
        for osc in colored_oscillators(deg, slots):
            out.append((osc, tuple(mom)))
    return out


# ----------------------------------------------------------------------
# JSON form

def state_to_json(v: State) -> list[dict]:
    out = []
    for (osc, mom), c in v.sorted_terms():
        out.append({
            "momentum": [str(x) for x in lt.coords(mom)],
            "oscillators": [[d, n] for d, n in osc],
            "coeff": render(c),
        })
    return out


def state_from_json(items: list[dict]) -> State:
    terms: dict = {}
    for it in items:
        mom = lt.vec([Fraction(x) for x in it["momentum"]])
        osc = tuple(sorted((int(d), int(n)) for d, n in it["oscillators"]))
        c = it["coeff"]
        accumulate(terms, (osc, mom), parse(c) if isinstance(c, str) else to_cyc(c))
    return State._wrap(terms)

