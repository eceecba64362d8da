"""The Lie superalgebra of physical states.

Elements are BRST classes in the canonical pictures: H(alpha)_{-1,1} (even)
and H(alpha)_{-1/2,1} (odd).  An :class:`Element` carries its momentum,
picture and a representative state.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

from . import lattice as lt
from .brst import brst_operator
from .cohomology import (CohomologyError, cohomology_space, gamma_c_dotted, gamma_matrices,
                         is_exact_state)
from .exactfield import ONE, SQRT2, ZERO, Cyc
from .fields import G_MINKOWSKI, registry
from .fock import State, coset_of
from .smallspace import pairing

HALF = Fraction(1, 2)


class NotARepresentative(ValueError):
    pass


@dataclass(frozen=True)
class Element:
    alpha: tuple
    picture: Fraction
    state: State

    @property
    def v_parity(self) -> int:
        """Parity in the vertex algebra."""
        return coset_of(self.state).parity

    @property
    def parity(self) -> int:
        """Parity in the Lie superalgebra."""
        return (self.v_parity + 1) % 2

    def scale(self, k) -> Element:
        return Element(self.alpha, self.picture, self.state.scale(k))


@dataclass
class BracketResult:
    alpha: tuple
    picture: Fraction
    state: State
    coords: list

    @property
    def is_zero(self) -> bool:
        return all(not c for c in self.coords)


def _check_rep(u: Element) -> None:
    reg = registry()
    if reg.va.mode_product(reg.get("b"), 1, u.state):
        raise NotARepresentative("state is not in ker b_1")
    if not brst_operator().apply(u.state).is_zero():
        raise NotARepresentative("state is not Q-closed")


def lz_bracket(u: Element, v: Element) -> Element:
    """{u, v} = (-1)^{|u|} (b_0 u)_0 v."""
    reg = registry()
    va = reg.va
    b0u = va.mode_product(reg.get("b"), 0, u.state)
    s = va.mode_product(b0u, 0, v.state)
    if u.v_parity:
        s = -s
    return Element(lt.add(u.alpha, v.alpha), u.picture + v.picture, s)


def picture_raise(u: Element) -> Element:
    return Element(u.alpha, u.picture + 1, brst_operator().X(u.state))


def reduce_class(u: Element, ghost: int = 1) -> BracketResult:
    if u.state.is_zero():
        sp = cohomology_space(u.alpha, u.picture, ghost)
        return BracketResult(u.alpha, u.picture, u.state, [ZERO] * sp.dim)
    sp = cohomology_space(u.alpha, u.picture, ghost)
    return BracketResult(u.alpha, u.picture, u.state, sp.class_of(u.state))


def bracket_element(u: Element, v: Element, check: bool = True) -> Element:
    if check:
        _check_rep(u)
        _check_rep(v)
    w = lz_bracket(u, v)
    if u.parity == 0 or v.parity == 0:
        w = picture_raise(w)
    return w


def bracket(u: Element, v: Element, check: bool = True) -> BracketResult:
    return reduce_class(bracket_element(u, v, check))


def dot_product_element(u: Element, v: Element) -> Element:
    va = registry().va
    return Element(lt.add(u.alpha, v.alpha), u.picture + v.picture,
                   va.mode_product(u.state, -1, v.state))


def dot_product(u: Element, v: Element) -> BracketResult:
    """Class of u_{-1} v.  The product leaves ker b_1, so it is reduced in
    the complex without the b_1 condition."""
    w = dot_product_element(u, v)
    sp = cohomology_space(w.alpha, w.picture, 2, relative=False)
    coords = sp.class_of(w.state) if not w.state.is_zero() else [ZERO] * sp.dim
    return BracketResult(w.alpha, w.picture, w.state, coords)


def is_exact(w: Element, ghost: int = 1, relative: bool = True) -> bool:
    return is_exact_state(w.alpha, w.picture, ghost, w.state, relative)


# ----------------------------------------------------------------------
# distinguished elements

def p_element(mu: int) -> Element:
    return Element(lt.ZERO_VEC, Fraction(-1), registry().get(f"P{mu}"))


def q_element(k: int) -> Element:
    return Element(lt.ZERO_VEC, Fraction(-1, 2), registry().get(f"Qdot{k}"))


def root_space(alpha, parity: int) -> list[Element]:
    """Representatives of G(alpha)_parity."""
    alpha = tuple(alpha)
    if not any(alpha) and parity == 0:
        return [p_element(mu) for mu in range(1, 11)]
    pic = Fraction(-1) if parity == 0 else Fraction(-1, 2)
    sp = cohomology_space(alpha, pic, 1)
    return [Element(alpha, pic, s) for s in sp.rep_states()]


# ----------------------------------------------------------------------
# invariant form

def _c_pairing(u: State, v: State) -> Cyc:
    return pairing(u, v, "C")


def preimage(u: Element) -> Element:
    """A (-3/2)-picture representative u~ with X_{-1} u~ = u in cohomology."""
    if u.picture != Fraction(-1, 2):
        raise ValueError("preimages are taken from picture -1/2")
    src = cohomology_space(u.alpha, Fraction(-3, 2), 1)
    dst = cohomology_space(u.alpha, Fraction(-1, 2), 1)
    X = brst_operator().X
    images = [dst.class_of(X(s)) for s in src.rep_states()]
    target = dst.class_of(u.state)
    # solve sum x_i images[i] = target
    from .linalg import Echelon
    n = len(images)
    d = dst.dim
    e = Echelon()
    for i, img in enumerate(images):
        e.add({**{j: c for j, c in enumerate(img) if c}, d + i: ONE})
    res = e.reduce({j: c for j, c in enumerate(target) if c})
    if any(k < d for k in res):
        raise CohomologyError("no preimage under X_{-1}")
    coeffs = [-res.get(d + i, ZERO) for i in range(n)]
    state = State()
    for c, s in zip(coeffs, src.rep_states()):
        state = state + s.scale(c)
    return Element(u.alpha, Fraction(-3, 2), state)


def invariant_form(u: Element, v: Element) -> Cyc:
    if u.state.is_zero() or v.state.is_zero():
        return ZERO
    if lt.add(u.alpha, v.alpha) != lt.ZERO_VEC:
        return ZERO
    if u.parity != v.parity:
        return ZERO
    if u.parity == 0:
        return _c_pairing(u.state, v.state)
    if not any(u.alpha):
        raise CohomologyError("the form is not defined on the supersymmetry charges")
    return -_c_pairing(preimage(u).state, v.state)


# ----------------------------------------------------------------------
# checks

def susy_checks() -> dict:
    data = gamma_matrices()
    gcs = [gamma_c_dotted(data, mu) for mu in range(1, 11)]
    inv = ONE / SQRT2
    ps = [p_element(mu) for mu in range(1, 11)]
    qs = [q_element(k) for k in range(16)]
    ok_qq = True
    for a in range(16):
        for b in range(a, 16):
            lhs = bracket_element(qs[a], qs[b])
            rhs = State()
            for mu in range(10):
                rhs = rhs + ps[mu].state.scale(gcs[mu][a][b] * inv)
            diff = Element(lhs.alpha, lhs.picture, lhs.state - rhs)
            ok_qq &= is_exact(diff)
    ok_pq = all(is_exact(bracket_element(p, q)) for p in ps for q in qs)
    ok_pp = all(is_exact(bracket_element(p, r)) for p in ps for r in ps)
    return {"QQ": ok_qq, "PQ": ok_pq, "PP": ok_pp}


def momentum_action_check(x: Element) -> bool:
    """[P^mu, x] = alpha^mu x for every mu.

    Lattice coordinates are the components alpha_mu on the basis x^mu, so
    alpha^mu = (x^mu, alpha) = g^{mu mu} alpha_mu.
    """
    coords = lt.coords(x.alpha)
    for mu in range(1, 11):
        w = bracket_element(p_element(mu), x)
        up = coords[mu - 1] * G_MINKOWSKI[mu - 1]
        diff = Element(w.alpha, w.picture, w.state - x.state.scale(up))
        if not is_exact(diff):
            return False
    return True


def antisymmetry_ok(u: Element, v: Element) -> bool:
    a = lz_bracket(u, v)
    b = lz_bracket(v, u)
    sign = (-1) ** (((u.v_parity + 1) * (v.v_parity + 1)) % 2)
    return is_exact(Element(a.alpha, a.picture, a.state + b.state.scale(sign)))


def jacobi_ok(u: Element, v: Element, w: Element) -> bool:
    def s(x, y):
        return (-1) ** (((x.v_parity + 1) * (y.v_parity + 1)) % 2)
    t1 = lz_bracket(u, lz_bracket(v, w)).state.scale(s(u, w))
    t2 = lz_bracket(v, lz_bracket(w, u)).state.scale(s(v, u))
    t3 = lz_bracket(w, lz_bracket(u, v)).state.scale(s(w, v))
    alpha = lt.add(lt.add(u.alpha, v.alpha), w.alpha)
    pic = u.picture + v.picture + w.picture
    return is_exact(Element(alpha, pic, t1 + t2 + t3))


def _lie_sign(x: Element, y: Element) -> int:
    return -1 if x.parity and y.parity else 1


def _lie(u: Element, v: Element) -> Element | None:
    """[u, v] as a representative, None when it vanishes on the nose."""
    if u is None or v is None:
        return None
    w = bracket_element(u, v, check=False)
    return None if w.state.is_zero() else w


def _sum_state(alpha, picture, terms) -> Element:
    out = State()
    for sign, t in terms:
        if t is not None:
            out = out + t.state.scale(sign)
    return Element(alpha, picture, out)


def _canonical_picture(*els: Element) -> Fraction:
    return Fraction(-1, 2) if sum(e.parity for e in els) % 2 else Fraction(-1)


def lie_antisymmetry_ok(u: Element, v: Element) -> bool:
    """[u,v] + (-1)^{|u||v|} [v,u] is Q-exact (canonical pictures)."""
    alpha = lt.add(u.alpha, v.alpha)
    w = _sum_state(alpha, _canonical_picture(u, v),
                   [(1, _lie(u, v)), (_lie_sign(u, v), _lie(v, u))])
    return is_exact(w)


def lie_jacobi_ok(u: Element, v: Element, w: Element) -> bool:
    """[u,[v,w]] - [[u,v],w] - (-1)^{|u||v|} [v,[u,w]] is Q-exact."""
    alpha = lt.add(lt.add(u.alpha, v.alpha), w.alpha)
    t = _sum_state(alpha, _canonical_picture(u, v, w),
                   [(1, _lie(u, _lie(v, w))), (-1, _lie(_lie(u, v), w)),
                    (-_lie_sign(u, v), _lie(v, _lie(u, w)))])
    return is_exact(t)


@dataclass
class AxiomReport:
    antisymmetry_failures: list
    jacobi_failures: list
    pairs: int
    triples: int

    @property
    def passed(self) -> bool:
        return not self.antisymmetry_failures and not self.jacobi_failures


def axiom_suite(elements: list[Element], lie: bool = True, distinct: bool = True) -> AxiomReport:
    """Antisymmetry on all pairs and Jacobi on all triples of the sample.

    ``lie`` selects the picture-raised bracket [ , ] (results stay in the
    canonical pictures); otherwise the cyclic form of { , } is tested.
    ``distinct`` restricts to pairs/triples of distinct sample members.
    """
    from itertools import combinations
    comb = combinations if distinct else combinations_with_replacement
    anti_ok = lie_antisymmetry_ok if lie else antisymmetry_ok
    jac_ok = lie_jacobi_ok if lie else jacobi_ok
    idx = range(len(elements))
    pairs = list(comb(idx, 2))
    triples = list(comb(idx, 3))
    anti = [(i, j) for i, j in pairs if not anti_ok(elements[i], elements[j])]
    jac = [(i, j, k) for i, j, k in triples
           if not jac_ok(elements[i], elements[j], elements[k])]
    return AxiomReport(anti, jac, len(pairs), len(triples))


def form_matrix_pp() -> list:
    return [[invariant_form(p_element(m), p_element(n)) for n in range(1, 11)] for m in range(1, 11)]


def invariance_ok(u: Element, v: Element, w: Element) -> bool:
    """<[u,v],w> = <u,[v,w]>."""
    uv = bracket_element(u, v)
    vw = bracket_element(v, w)
    lhs = invariant_form(uv, w) if _in_g(uv) else ZERO
    rhs = invariant_form(u, vw) if _in_g(vw) else ZERO
    return lhs == rhs


def _in_g(x: Element) -> bool:
    return any(x.alpha) or x.picture == -1


# two null roots with (a, b) = -1 and c = -(a + b) of norm -2
SAMPLE_A = lt.lx_vector([1, 0, 0, 0, 0, 0, 0, 0, 0, 1])
SAMPLE_B = lt.lx_vector([0, 1, 0, 0, 0, 0, 0, 0, 0, 1])
SAMPLE_C = lt.neg(lt.add(SAMPLE_A, SAMPLE_B))


def axiom_sample() -> list[Element]:
    """Twelve representatives at alpha^2 in {0, -2} for the axiom suite.

    Momenta are drawn from {0, a, b, c}; every sum of two or three distinct
    members then has norm >= -4, which keeps the exactness tests small.
    Only one element sits at c since 2c has norm -8.
    """
    a_even, a_odd = root_space(SAMPLE_A, 0), root_space(SAMPLE_A, 1)
    b_even, b_odd = root_space(SAMPLE_B, 0), root_space(SAMPLE_B, 1)
    c_even = root_space(SAMPLE_C, 0)
    return [p_element(1), p_element(10), q_element(0), q_element(5),
            a_even[0], a_even[1], a_odd[0], a_odd[1],
            b_even[0], b_odd[0], b_odd[1], c_even[0]]
