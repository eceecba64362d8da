"""Named states of the superstring vertex algebra and their OPE tables.

Every field is an explicit :class:`~svoa.fock.State` built from the lattice
and mode products.  ``verify_ope`` recomputes singular parts with the kernel
and compares them against the transcribed tables in :data:`OPE_TABLE`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import lattice as lt
from .exactfield import I, INV_SQRT2, ONE, Cyc, to_cyc
from .fock import VACUUM, State, heis_apply, l0_of, linear_sum
from .vertexop import ModeIndexError, VertexAlgebra, default_algebra, mode_index

HALF = Fraction(1, 2)
G_MINKOWSKI = (1,) * 9 + (-1,)


class UnknownFieldError(KeyError):
    pass


def osc_state(slot: int, n: int = 1, mom=lt.ZERO_VEC) -> State:
    return State.mono(((slot, n),), mom)


def e(mu) -> State:
    return State.mono((), mu)


def x_up(mu: int) -> State:
    """x^mu(-1), mu = 1..10."""
    return osc_state(mu - 1)


def g(mu: int) -> int:
    return G_MINKOWSKI[mu - 1]


# ----------------------------------------------------------------------
# field builders; each takes the registry (for dependencies and the algebra)

def _psi_cap(reg, i: int, sign: int) -> State:
    v = lt.phi_i(i)
    return e(v if sign > 0 else lt.neg(v))


def _psi(reg, mu: int) -> State:
    k = (mu + 1) // 2
    p, m = reg.get(f"Psi+{k}"), reg.get(f"Psi-{k}")
    if mu == 10:
        return (p - m).scale(INV_SQRT2)
    if mu % 2:
        return (p + m).scale(INV_SQRT2)
    return (p - m).scale(I * INV_SQRT2)


def _h(reg, i: int, sign: int) -> State:
    """h^{+-i}(-1) as a state."""
    if i <= 4:
        a, b = x_up(2 * i - 1), x_up(2 * i)
        return (a + b.scale(I if sign > 0 else -I)).scale(INV_SQRT2)
    a, b = x_up(9), x_up(10)
    return (a - b if sign > 0 else a + b).scale(INV_SQRT2)


def _tau_m(reg) -> State:
    p = reg.prod
    return linear_sum((g(mu), p(x_up(mu), -1, reg.get(f"psi{mu}"))) for mu in range(1, 11))


def _tau_m_pm(reg, sign: int) -> State:
    p = reg.prod
    s = "+" if sign > 0 else "-"
    return linear_sum((1, p(_h(reg, i, sign), -1, reg.get(f"Psi{s}{i}"))) for i in range(1, 6))


def _omega_m(reg) -> State:
    t = reg.get("tau_M")
    return reg.prod(t, 0, t).scale(HALF)


def _omega_m_free(reg) -> State:
    """1/2 x_nu x^nu + 1/2 sum phi^i phi^i (the bosonized form)."""
    items = [(Fraction(g(mu), 2), State.mono(((mu - 1, 1), (mu - 1, 1)))) for mu in range(1, 11)]
    items += [(HALF, State.mono(((9 + i, 1), (9 + i, 1)))) for i in range(1, 6)]
    return linear_sum(items)


def _j_m(reg) -> State:
    return linear_sum((1, osc_state(9 + i)) for i in range(1, 6))


def _beta(reg) -> State:
    return reg.prod(osc_state(lt.CHI_SLOT), -1, e(lt.add(lt.neg(lt.PHI), lt.CHI)))


def _tau_gh_c(reg) -> State:
    p, D = reg.prod, reg.D
    c, beta = reg.get("c"), reg.get("beta")
    return p(c, -1, D(beta)) + p(D(c), -1, beta).scale(Fraction(3, 2))


def _tau_gh_b(reg) -> State:
    return reg.prod(reg.get("b"), -1, reg.get("gamma")).scale(-2)


def _omega_gh(reg) -> State:
    t = reg.get("tau_Gh")
    return reg.prod(t, 0, t).scale(HALF)


def _omega_bc(reg) -> State:
    p, D = reg.prod, reg.D
    b, c = reg.get("b"), reg.get("c")
    return p(D(c), -1, b).scale(2) - p(D(b), -1, c)


def _omega_betagamma(reg) -> State:
    p, D = reg.prod, reg.D
    beta, gam = reg.get("beta"), reg.get("gamma")
    return p(D(gam), -1, beta).scale(Fraction(-3, 2)) - p(D(beta), -1, gam).scale(HALF)


def _quad(slot: int, a, b) -> State:
    """a * slot(-1)^2 + b * slot(-2)."""
    return linear_sum([(a, State.mono(((slot, 1), (slot, 1)))), (b, osc_state(slot, 2))])


def _j_brst(reg) -> State:
    p = reg.prod
    c, gam = reg.get("c"), reg.get("gamma")
    w = reg.get("omega_M") + reg.get("omega_Gh").scale(HALF)
    t = reg.get("tau_M") + reg.get("tau_Gh").scale(HALF)
    return p(c, -1, w) + p(gam, -1, t)


def _q0_field(reg) -> State:
    w = reg.get("omega_M") + reg.get("omega_betagamma") + reg.get("omega_bc").scale(HALF)
    return reg.prod(reg.get("c"), -1, w)


def _q1_field(reg) -> State:
    return reg.prod(reg.get("gamma"), -1, reg.get("tau_M"))


def _q2_field(reg) -> State:
    gam, b = reg.get("gamma"), reg.get("b")
    return reg.prod(gam, -1, reg.prod(gam, -1, b)).scale(-1)


def _certificate_v(reg) -> State:
    p = reg.prod
    c, b, gam, beta = reg.get("c"), reg.get("b"), reg.get("gamma"), reg.get("beta")
    tm = reg.get("tau_M")
    t1 = p(c, -1, p(gam, -1, tm)).scale(Fraction(1, 4))
    t2 = p(gam, -1, p(gam, -1, p(gam, -1, beta))).scale(Fraction(1, 4))
    t3 = p(gam, -1, p(gam, -1, p(c, -1, b))).scale(Fraction(-1, 2))
    t4 = p(c, -3, c).scale(Fraction(3, 2))
    t5 = p(gam, -2, gam).scale(Fraction(3, 2))
    return t1 + t2 + t3 + t4 + t5


def _x_field(reg) -> State:
    return reg.prod(reg.get("j_BRST"), 0, reg.get("xi"))


def _x_four_term(reg) -> State:
    """c_{-1}(D xi) + tau^M_{-1} e^phi + D(eta_{-1} e^{2phi}_{-1} b) + (D eta)_{-1} e^{2phi}_{-1} b."""
    p, D = reg.prod, reg.D
    c, b, xi, eta = reg.get("c"), reg.get("b"), reg.get("xi"), reg.get("eta")
    e2b = p(e(lt.scale(lt.PHI, 2)), -1, b)
    return (p(c, -1, D(xi)) + p(reg.get("tau_M"), -1, e(lt.PHI))
            + D(p(eta, -1, e2b)) + p(D(eta), -1, e2b))


def spinor_weights(dotted: bool) -> list[tuple[Fraction, ...]]:
    """(+-1/2)^5 with an odd (dotted) or even (undotted) number of minus signs,
    ordered lexicographically with + before -."""
    from itertools import product
    out = []
    for signs in product((1, -1), repeat=5):
        if (signs.count(-1) % 2 == 1) == dotted:
            out.append(tuple(HALF * s for s in signs))
    return out


def spinor_field(index: int, dotted: bool) -> State:
    lam = spinor_weights(dotted)[index]
    ph = Fraction(-1, 2) if dotted else Fraction(-3, 2)
    return e(lt.psi_vector(list(lam) + [ph]))


# ----------------------------------------------------------------------

class FieldRegistry:
    """Lazily built, cached named states for one vertex algebra."""

    def __init__(self, va: VertexAlgebra | None = None):
        self.va = va or default_algebra()
        self._cache: dict[str, State] = {}
        self._builders: dict[str, Callable] = {}
        self._register()

    # helpers used by builders
    def prod(self, a: State, n, b: State) -> State:
        return self.va.mode_product(a, n, b)

    def D(self, a: State) -> State:
        return self.va.derivation_direct(a)

    def names(self) -> list[str]:
        return sorted(self._builders)

    def get(self, name: str) -> State:
        s = self._cache.get(name)
        if s is None:
            b = self._builders.get(name)
            if b is None:
                raise UnknownFieldError(name)
            s = b(self)
            self._cache[name] = s
        return s

    def _register(self):
        B = self._builders
        for mu in range(1, 11):
            B[f"x{mu}"] = lambda r, mu=mu: x_up(mu)
            B[f"psi{mu}"] = lambda r, mu=mu: _psi(r, mu)
        for i in range(1, 6):
            B[f"Psi+{i}"] = lambda r, i=i: _psi_cap(r, i, 1)
            B[f"Psi-{i}"] = lambda r, i=i: _psi_cap(r, i, -1)
            B[f"h+{i}"] = lambda r, i=i: _h(r, i, 1)
            B[f"h-{i}"] = lambda r, i=i: _h(r, i, -1)
        B["vacuum"] = lambda r: VACUUM
        B["tau_M"] = _tau_m
        B["tau_M+"] = lambda r: _tau_m_pm(r, 1)
        B["tau_M-"] = lambda r: _tau_m_pm(r, -1)
        B["omega_M"] = _omega_m
        B["omega_M_free"] = _omega_m_free
        B["j_M"] = _j_m
        B["b"] = lambda r: e(lt.neg(lt.SIGMA))
        B["c"] = lambda r: e(lt.SIGMA)
        B["beta"] = _beta
        B["gamma"] = lambda r: e(lt.sub(lt.PHI, lt.CHI))
        # j_Gh charge decides the label: b_{-1}gamma has charge +1
        B["tau_Gh+"] = _tau_gh_b
        B["tau_Gh-"] = _tau_gh_c
        B["tau_Gh"] = lambda r: r.get("tau_Gh+") + r.get("tau_Gh-")
        B["omega_Gh"] = _omega_gh
        B["omega_phi"] = lambda r: _quad(lt.PHI_SLOT, -HALF, -1)
        B["omega_chi"] = lambda r: _quad(lt.CHI_SLOT, HALF, HALF)
        B["omega_sigma"] = lambda r: _quad(lt.SIGMA_SLOT, HALF, Fraction(3, 2))
        B["omega_bc"] = _omega_bc
        B["omega_betagamma"] = _omega_betagamma
        B["j_Gh"] = lambda r: linear_sum([(-3, osc_state(lt.PHI_SLOT)), (2, osc_state(lt.SIGMA_SLOT))])
        B["omega"] = lambda r: r.get("omega_M") + r.get("omega_Gh")
        B["tau"] = lambda r: r.get("tau_M") + r.get("tau_Gh")
        B["j_N"] = lambda r: linear_sum([(-1, osc_state(lt.CHI_SLOT)), (1, osc_state(lt.SIGMA_SLOT))])
        B["j_P"] = lambda r: linear_sum([(-1, osc_state(lt.PHI_SLOT)), (1, osc_state(lt.CHI_SLOT))])
        B["j_BRST"] = _j_brst
        B["Q0_field"] = _q0_field
        B["Q1_field"] = _q1_field
        B["Q2_field"] = _q2_field
        B["xi"] = lambda r: e(lt.CHI)
        B["eta"] = lambda r: e(lt.neg(lt.CHI))
        B["D_xi"] = lambda r: r.D(r.get("xi"))
        B["X"] = _x_field
        B["X_four_term"] = _x_four_term
        B["v"] = _certificate_v
        for mu in range(1, 11):
            B[f"Ptilde{mu}"] = lambda r, mu=mu: r.prod(r.get(f"psi{mu}"), -1, e(lt.neg(lt.PHI)))
            B[f"P{mu}"] = lambda r, mu=mu: r.prod(r.get(f"Ptilde{mu}"), -1, r.get("c")).scale(-1)
        for k in range(16):
            B[f"Sdot{k}"] = lambda r, k=k: spinor_field(k, True)
            B[f"S{k}"] = lambda r, k=k: spinor_field(k, False)
            B[f"Qdot{k}"] = lambda r, k=k: r.prod(r.get(f"Sdot{k}"), -1, r.get("c"))


_REGISTRIES: dict = {}


def registry(va: VertexAlgebra | None = None) -> FieldRegistry:
    va = va or default_algebra()
    reg = _REGISTRIES.get(id(va))
    if reg is None or reg.va is not va:
        reg = FieldRegistry(va)
        _REGISTRIES[id(va)] = reg
    return reg


def build_field(name: str, va: VertexAlgebra | None = None) -> State:
    return registry(va).get(name)


# ----------------------------------------------------------------------
# OPE tables

@dataclass
class OpeReport:
    pair: tuple[str, str]
    computed: dict
    expected: dict
    equal: bool
    mismatches: list = field(default_factory=list)


def _weight(s: State) -> Fraction:
    ws = {l0_of(m) for m in s.terms}
    if len(ws) != 1:
        raise ModeIndexError("field is not L0-homogeneous")
    return ws.pop()


# expected singular parts: {pole order: spec}; a spec is a list of
# (coefficient, field name or "D:name" or "1") pairs
def _ope_table() -> dict:
    t: dict = {}
    one = "vacuum"
    for mu in (1, 2, 9, 10):
        for nu in (1, 2, 9, 10):
            t[(f"x{mu}", f"x{nu}")] = {2: [(g(mu), one)] if mu == nu else []}
            t[(f"psi{mu}", f"psi{nu}")] = {1: [(g(mu), one)] if mu == nu else []}
    for i in (1, 3, 5):
        for j in (1, 3, 5):
            t[(f"Psi+{i}", f"Psi-{j}")] = {1: [(1, one)] if i == j else []}
    for mu in (1, 4, 10):
        t[("omega_M", f"x{mu}")] = {2: [(1, f"x{mu}")], 1: [(1, f"D:x{mu}")]}
        t[("omega_M", f"psi{mu}")] = {2: [(HALF, f"psi{mu}")], 1: [(1, f"D:psi{mu}")]}
        t[("tau_M", f"x{mu}")] = {2: [(1, f"psi{mu}")], 1: [(1, f"D:psi{mu}")]}
        t[("tau_M", f"psi{mu}")] = {1: [(1, f"x{mu}")]}
    t[("omega_M", "omega_M")] = {4: [(Fraction(15, 2), one)], 2: [(2, "omega_M")], 1: [(1, "D:omega_M")]}
    for s in "+-":
        sg = 1 if s == "+" else -1
        t[("omega_M", f"tau_M{s}")] = {2: [(Fraction(3, 2), f"tau_M{s}")], 1: [(1, f"D:tau_M{s}")]}
        t[("j_M", f"tau_M{s}")] = {1: [(sg, f"tau_M{s}")]}
        t[(f"tau_M{s}", f"tau_M{s}")] = {}
        t[("omega_Gh", f"tau_Gh{s}")] = {2: [(Fraction(3, 2), f"tau_Gh{s}")], 1: [(1, f"D:tau_Gh{s}")]}
        t[("j_Gh", f"tau_Gh{s}")] = {1: [(sg, f"tau_Gh{s}")]}
        t[(f"tau_Gh{s}", f"tau_Gh{s}")] = {}
    t[("omega_M", "j_M")] = {2: [(1, "j_M")], 1: [(1, "D:j_M")]}
    t[("j_M", "j_M")] = {2: [(5, one)]}
    t[("tau_M+", "tau_M-")] = {3: [(5, one)], 2: [(1, "j_M")],
                               1: [(1, "omega_M"), (HALF, "D:j_M")]}
    t[("tau_M-", "tau_M+")] = {3: [(5, one)], 2: [(-1, "j_M")],
                               1: [(1, "omega_M"), (-HALF, "D:j_M")]}
    t[("tau_M", "tau_M")] = {3: [(10, one)], 1: [(2, "omega_M")]}
    # ghosts
    t[("c", "b")] = {1: [(1, one)]}
    t[("gamma", "beta")] = {1: [(1, one)]}
    for a, b in (("b", "b"), ("c", "c"), ("beta", "beta"), ("gamma", "gamma"),
                 ("b", "beta"), ("b", "gamma"), ("c", "beta"), ("c", "gamma"),
                 ("beta", "b"), ("gamma", "b"), ("beta", "c"), ("gamma", "c")):
        t[(a, b)] = {}
    t[("omega_Gh", "omega_Gh")] = {4: [(Fraction(-15, 2), one)], 2: [(2, "omega_Gh")],
                                   1: [(1, "D:omega_Gh")]}
    # printed with j^M at the double pole; j^Gh is what the fields give
    t[("omega_Gh", "j_Gh")] = {2: [(1, "j_Gh")], 1: [(1, "D:j_Gh")]}
    t[("j_Gh", "j_Gh")] = {2: [(-5, one)]}
    t[("tau_Gh+", "tau_Gh-")] = {3: [(-5, one)], 2: [(1, "j_Gh")],
                                 1: [(1, "omega_Gh"), (HALF, "D:j_Gh")]}
    t[("tau_Gh-", "tau_Gh+")] = {3: [(-5, one)], 2: [(-1, "j_Gh")],
                                 1: [(1, "omega_Gh"), (-HALF, "D:j_Gh")]}
    t[("omega_Gh", "b")] = {2: [(2, "b")], 1: [(1, "D:b")]}
    t[("omega_Gh", "c")] = {2: [(-1, "c")], 1: [(1, "D:c")]}
    t[("omega_Gh", "beta")] = {2: [(Fraction(3, 2), "beta")], 1: [(1, "D:beta")]}
    t[("omega_Gh", "gamma")] = {2: [(-HALF, "gamma")], 1: [(1, "D:gamma")]}
    t[("tau_Gh", "b")] = {2: [(Fraction(-3, 2), "beta")], 1: [(-HALF, "D:beta")]}
    t[("tau_Gh", "c")] = {1: [(-2, "gamma")]}
    t[("tau_Gh", "beta")] = {1: [(-2, "b")]}
    t[("tau_Gh", "gamma")] = {2: [(1, "c")], 1: [(-HALF, "D:c")]}
    # small algebra
    t[("xi", "eta")] = {1: [(1, one)]}
    t[("D_xi", "eta")] = {2: [(-1, one)]}
    t[("D_xi", "D_xi")] = {}
    t[("eta", "eta")] = {}
    return t


OPE_TABLE = _ope_table()
MATTER_GHOST_PAIRS = [k for k in OPE_TABLE]


def _expected_state(reg: FieldRegistry, spec) -> State:
    items = []
    for coef, name in spec:
        if name.startswith("D:"):
            items.append((coef, reg.D(reg.get(name[2:]))))
        else:
            items.append((coef, reg.get(name)))
    return linear_sum(items)


def singular_part(a: State, b: State, va: VertexAlgebra) -> dict:
    """{pole order p >= 1: a_{p-1} b} for all nonzero singular terms."""
    top = va.max_mode(a, b)
    out = {}
    if top is None:
        return out
    n = top
    while n >= 0:
        s = va.mode_product(a, n, b)
        if s:
            out[int(n) + 1 if n.denominator == 1 else n + 1] = s
        n -= 1
    return out


def verify_ope(a_name: str, b_name: str, va: VertexAlgebra | None = None) -> OpeReport:
    reg = registry(va)
    if (a_name, b_name) not in OPE_TABLE:
        raise UnknownFieldError(f"no expected table for ({a_name}, {b_name})")
    a, b = reg.get(a_name), reg.get(b_name)
    computed = singular_part(a, b, reg.va)
    exp_spec = OPE_TABLE[(a_name, b_name)]
    expected = {p: _expected_state(reg, s) for p, s in exp_spec.items()}
    expected = {p: s for p, s in expected.items() if s}
    mism = []
    for p in sorted(set(computed) | set(expected), key=lambda q: -Fraction(q)):
        if computed.get(p, State()) != expected.get(p, State()):
            mism.append(p)
    return OpeReport((a_name, b_name), computed, expected, not mism, mism)


def central_charge(w_name: str, va: VertexAlgebra | None = None) -> Cyc:
    reg = registry(va)
    w = reg.get(w_name)
    w3 = reg.prod(w, 3, w)
    if any(m != ((), lt.ZERO_VEC) for m in w3.terms):
        raise ValueError(f"{w_name}_3 {w_name} is not a multiple of the vacuum")
    return w3.coeff(((), lt.ZERO_VEC)) * 2


def mode_operator(name: str, index, v: State, va: VertexAlgebra | None = None) -> State:
    """Apply the conformal mode a_(index) = a_{index - 1 + h}."""
    reg = registry(va)
    a = reg.get(name)
    h = _weight(a)
    n = mode_index(Fraction(index) - 1 + h)
    if not v:
        return State()
    from .fock import coset_of
    d = lt.delta(coset_of(a), coset_of(v))
    if (n - d).denominator != 1:
        raise ModeIndexError(f"mode {index} of {name} is incompatible with the target sector")
    return reg.prod(a, n, v)
