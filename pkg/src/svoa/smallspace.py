"""The small algebra V_S, sector bases and the invariant bilinear forms.

V = V' (x) V_chi (x) V_sigma as a Fock space, where V_chi holds the chi
oscillators and the e^{m chi} factor.  The xi-eta system lives entirely in
V_chi, so membership in V_S is a question about the chi part alone: it
must lie in the span of the states obtained from the chi vacuum by the
modes eta_{-n} and (D xi)_{-n}, n >= 1.  The kernel of b_1 is likewise a
sigma-sector question.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

from . import lattice as lt
from .exactfield import ONE, Cyc
from .fock import (State, accumulate, colored_oscillators, l0_of, osc_degree)
from .linalg import Echelon, nullspace
from .vertexop import VertexAlgebra, default_algebra

CHI, SIGMA, PHI = lt.CHI_SLOT, lt.SIGMA_SLOT, lt.PHI_SLOT
MATTER_SLOTS = tuple(range(16))           # x^1..x^10, phi^1..phi^5, phi
PSI_SLOTS = tuple(range(10, 15))


class SectorError(ValueError):
    pass


# ----------------------------------------------------------------------
# one-boson pieces: chi and sigma

def _single(slot: int, m: int, osc) -> tuple:
    mom = [0] * lt.DIM
    mom[slot] = 2 * m
    return (tuple(osc), tuple(mom))


def _level_monomials(slot: int, m: int, N: int) -> list:
    return [_single(slot, m, o) for o in colored_oscillators(N, (slot,))]


def _chi_weight(m: int) -> Fraction:
    return Fraction(m * (m - 1), 2)


def _sigma_weight(m: int) -> Fraction:
    return Fraction(m * (m - 3), 2)


def chi_min_weight(m: int) -> Fraction:
    """Lowest L0 of the chi part of V_S at charge m."""
    return Fraction(m * (m + 1), 2) if m >= 0 else Fraction(m * (m - 1), 2)


def sigma_min_weight(m: int, ker_b1: bool = True) -> Fraction:
    if ker_b1 and m >= 2:
        return Fraction(m * (m - 1), 2) - 1
    return _sigma_weight(m)


def _echelon_states(vectors) -> list[tuple]:
    """Echelon basis as (pivot monomial, State) pairs sorted by pivot."""
    e = Echelon()
    for v in vectors:
        e.add(v)
    return [(piv, State._wrap(dict(e.rows[piv]))) for piv in sorted(e.rows)]


@lru_cache(maxsize=None)
def chi_small_basis(m: int, N: int) -> tuple:
    """Echelon basis of the chi part of V_S at charge m and oscillator degree N.

    Built by generation: a state of weight w is in the span iff it is a
    combination of eta_{-n} or (D xi)_{-n} (n >= 1) applied to states of
    weight w - n one step closer to the vacuum.
    """
    va = default_algebra()
    target = _chi_weight(m) + N
    if target < chi_min_weight(m):
        return ()
    vecs = []
    for n in range(1, int(target - 0) + 1):
        # eta_{-n} raises weight by n and lowers the charge by one
        for src_m, field, mode in ((m + 1, "eta", -n), (m - 1, "dxi", -n)):
            src_N = target - n - _chi_weight(src_m)
            if src_N < 0 or src_N.denominator != 1:
                continue
            for _, s in chi_small_basis(src_m, int(src_N)):
                vecs.append(va.mode_product(_xi_eta(field), mode, s).terms)
    if m == 0 and N == 0:
        vecs.append({_single(CHI, 0, ()): ONE})
    return tuple(_echelon_states(vecs))


@lru_cache(maxsize=None)
def _xi_eta(which: str) -> State:
    if which == "eta":
        return State.mono((), _single(CHI, -1, ())[1])
    xi = State.mono((), _single(CHI, 1, ())[1])
    return default_algebra().derivation_direct(xi)


@lru_cache(maxsize=None)
def chi_kernel_basis(m: int, N: int) -> tuple:
    """Echelon basis of ker eta_0 on the chi Fock space at (m, N)."""
    va = default_algebra()
    mons = _level_monomials(CHI, m, N)
    eta = _xi_eta("eta")
    cols = []
    for mo in mons:
        img = va.mode_product(eta, 0, State._wrap({mo: ONE}))
        cols.append(img.terms)
    ns = nullspace(cols)
    return tuple(_echelon_states([{mons[j]: c for j, c in v.items()} for v in ns]))


@lru_cache(maxsize=None)
def sigma_basis(m: int, N: int, ker_b1: bool = True) -> tuple:
    mons = _level_monomials(SIGMA, m, N)
    if not ker_b1:
        return tuple((mo, State._wrap({mo: ONE})) for mo in mons)
    va = default_algebra()
    b = State.mono((), _single(SIGMA, -1, ())[1])
    cols = [va.mode_product(b, 1, State._wrap({mo: ONE})).terms for mo in mons]
    ns = nullspace(cols)
    return tuple(_echelon_states([{mons[j]: c for j, c in v.items()} for v in ns]))


def _split(m_osc, slot):
    """(osc without slot, osc of slot)."""
    return (tuple(o for o in m_osc if o[0] != slot), tuple(o for o in m_osc if o[0] == slot))


def in_small_algebra(v: State) -> bool:
    """Membership of v in V_S via its chi components."""
    groups: dict = {}
    for (osc, mom), c in v.terms.items():
        rest, chi_osc = _split(osc, CHI)
        m2 = mom[CHI]
        if m2 % 2:
            return False
        rest_mom = mom[:CHI] + (0,) + mom[CHI + 1:]
        key = (rest, rest_mom)
        groups.setdefault(key, {})[_single(CHI, m2 // 2, chi_osc)] = c
    cache: dict = {}
    for part in groups.values():
        mo = next(iter(part))
        m, N = mo[1][CHI] // 2, osc_degree(mo[0])
        if any(osc_degree(x[0]) != N for x in part):
            # different chi levels: test each level separately
            by_level: dict = {}
            for x, c in part.items():
                by_level.setdefault(osc_degree(x[0]), {})[x] = c
            parts = list(by_level.values())
        else:
            parts = [part]
        for p in parts:
            N = osc_degree(next(iter(p))[0])
            e = cache.get((m, N))
            if e is None:
                e = Echelon()
                for _, s in chi_small_basis(m, N):
                    e.add(s.terms)
                cache[(m, N)] = e
            if not e.contains(p):
                return False
    return True


# ----------------------------------------------------------------------
# sectors

@dataclass(frozen=True)
class SectorSpec:
    alpha: tuple                 # doubled 18-vector supported on x slots
    picture: Fraction
    ghost: int
    l0: Fraction = Fraction(0)
    gso: bool = True
    ker_b1: bool = True

    def __post_init__(self):
        object.__setattr__(self, "picture", Fraction(self.picture))
        object.__setattr__(self, "l0", Fraction(self.l0))
        if any(self.alpha[10:]):
            raise SectorError("alpha must lie in the x directions")


@dataclass
class SectorBasis:
    spec: SectorSpec
    states: list = field(default_factory=list)
    pivots: list = field(default_factory=list)

    def __len__(self):
        return len(self.states)

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self) -> dict:
        if not hasattr(self, "_index"):
            self._index = {p: i for i, p in enumerate(self.pivots)}
        return self._index

    def coordinates(self, w: State, check: bool = False) -> dict:
        """Coordinates of w (assumed in the span) read off at the pivots."""
        idx = self.index()
        out = {idx[m]: c for m, c in w.terms.items() if m in idx}
        if check:
            back = State()
            for i, c in out.items():
                back = back + self.states[i].scale(c)
            if back != w:
                raise SectorError("state is not in the span of the sector basis")
        return out


def _psi_momenta(half: bool, budget: Fraction):
    """phi^1..phi^5 momenta lam with |lam|^2/2 <= budget."""
    if budget < 0:
        return
    top = int(2 * budget) + 2
    cands = [Fraction(2 * j + 1, 2) for j in range(-top, top)] if half else list(range(-top, top + 1))
    vals = [x for x in cands if Fraction(x) ** 2 / 2 <= budget]
    for lam in product(vals, repeat=5):
        if sum(Fraction(x) ** 2 for x in lam) / 2 <= budget:
            yield lam


def _charge_range(spec: SectorSpec, alpha2: Fraction, limit: int = 60):
    p, n, k = spec.picture, spec.ghost, spec.l0
    half = p.denominator != 1
    out = []
    for m_chi in range(-limit, limit + 1):
        mphi = p - m_chi
        m_sig = n + m_chi
        lam_min = Fraction(5, 8) if half else 0
        w = (alpha2 / 2 + lam_min - mphi * mphi / 2 - mphi
             + chi_min_weight(m_chi) + sigma_min_weight(m_sig, spec.ker_b1))
        if w <= k:
            out.append(m_chi)
    if out and (out[0] == -limit or out[-1] == limit):
        raise SectorError("sector is not finite in the charge window")
    return out


def enumerate_sector(spec: SectorSpec, lattice: lt.SuperstringLattice | None = None) -> SectorBasis:
    lat = lattice or default_algebra().lattice
    alpha = spec.alpha
    alpha2 = Fraction(lt.ip4(alpha, alpha), 4)
    p, n, k = spec.picture, spec.ghost, spec.l0
    half = p.denominator != 1
    basis = SectorBasis(spec)
    for m_chi in _charge_range(spec, alpha2):
        mphi = p - m_chi
        m_sig = n + m_chi
        base = alpha2 / 2 - mphi * mphi / 2 - mphi
        rest = k - base - chi_min_weight(m_chi) - sigma_min_weight(m_sig, spec.ker_b1)
        for lam in _psi_momenta(half, rest):
            mom = list(lt.coords(alpha))
            mom[10:15] = [Fraction(x) for x in lam]
            mom[PHI], mom[CHI], mom[SIGMA] = mphi, Fraction(m_chi), Fraction(m_sig)
            vec = lt.vec(mom)
            if not lat.contains(vec):
                continue
            cls = lt.class_of(vec)
            if spec.gso and not cls.gso:
                continue
            w0 = base + sum(Fraction(x) ** 2 for x in lam) / 2
            budget = k - w0 - _chi_weight(m_chi) - _sigma_weight(m_sig)
            if budget < 0 or budget.denominator != 1:
                continue
            budget = int(budget)
            for n_chi in range(budget + 1):
                chis = chi_small_basis(m_chi, n_chi)
                if not chis:
                    continue
                for n_sig in range(budget - n_chi + 1):
                    sigs = sigma_basis(m_sig, n_sig, spec.ker_b1)
                    if not sigs:
                        continue
                    n_mat = budget - n_chi - n_sig
                    for osc in colored_oscillators(n_mat, MATTER_SLOTS):
                        for cs in chis:
                            for ss in sigs:
                                _append_product(basis, osc, vec, cs, ss)
    return basis


def _append_product(basis: SectorBasis, osc, vec, cpair, spair) -> None:
    (piv_c, _), cs = cpair
    (piv_s, _), ss = spair
    terms: dict = {}
    for (co, _), cc in cs.terms.items():
        for (so, _), sc in ss.terms.items():
            terms[(tuple(sorted(osc + co + so)), vec)] = cc * sc
    basis.states.append(State._wrap(terms))
    basis.pivots.append((tuple(sorted(osc + piv_c + piv_s)), vec))


def sector_dim(alpha, picture, ghost, l0=0, ker_b1=True) -> int:
    return enumerate_sector(SectorSpec(tuple(alpha), Fraction(picture), ghost, Fraction(l0),
                                       True, ker_b1)).dim


# ----------------------------------------------------------------------
# bilinear forms

NORMALIZER = lt.vec([0] * 15 + [-2, 0, 3])      # 3 sigma - 2 phi


def _homogeneous_parts(u: State) -> dict:
    parts: dict = {}
    for m, c in u.terms.items():
        parts.setdefault(l0_of(m), {})[m] = c
    return {h: State._wrap(t) for h, t in parts.items()}


def pairing(u: State, v: State, variant: str = "plain", va: VertexAlgebra | None = None) -> Cyc:
    """(u, v) normalized by (e^{3 sigma - 2 phi}, 1) = 1, or (u, v)_C = (c_{-2}u, v)."""
    va = va or default_algebra()
    if variant == "C":
        c = State.mono((), lt.SIGMA)
        u = va.mode_product(c, -2, u)
    elif variant != "plain":
        raise ValueError(f"unknown pairing variant {variant!r}")
    total = Cyc()
    vparts = _homogeneous_parts(v)
    for h, up in _homogeneous_parts(u).items():
        vp = vparts.get(h)
        if vp is None:
            continue
        w = va.adjoint_mode(up, -1, vp)
        total = total + w.coeff(((), NORMALIZER))
    return total
