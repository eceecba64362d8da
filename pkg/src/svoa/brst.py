"""The BRST operator, its nilpotency certificate and picture changing."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactfield import ONE as _ONE
from .fields import FieldRegistry, registry
from .fock import State, accumulate, ghost_number_of, picture_of
from .vertexop import VertexAlgebra


class SmallAlgebraError(ValueError):
    pass


@dataclass
class CertificateReport:
    equal: bool
    q_j: State
    d_v: State


@dataclass
class LemmaReport:
    hypotheses: dict
    holds: bool
    conclusion: bool


class ZeroModeOperator:
    """The zero mode of a fixed state, applied monomial by monomial with a cache."""

    def __init__(self, va: VertexAlgebra, field: State, n=0):
        self.va, self.field, self.n = va, field, n
        self._cache: dict = {}

    def on_monomial(self, m) -> State:
        r = self._cache.get(m)
        if r is None:
            r = self.va.mode_product(self.field, self.n, State._wrap({m: _ONE}))
            self._cache[m] = r
        return r

    def __call__(self, v: State) -> State:
        out: dict = {}
        for m, c in v.terms.items():
            for m2, c2 in self.on_monomial(m).terms.items():
                accumulate(out, m2, c * c2)
        return State._wrap(out)


class BrstOperator:
    def __init__(self, va: VertexAlgebra | None = None):
        self.reg: FieldRegistry = registry(va)
        self.va = self.reg.va
        self.j = self.reg.get("j_BRST")
        self.Q = ZeroModeOperator(self.va, self.j)
        self.pieces = [ZeroModeOperator(self.va, self.reg.get(f"Q{i}_field")) for i in range(3)]
        self._x = None

    def apply(self, v: State) -> State:
        return self.Q(v)

    def apply_piece(self, i: int, v: State) -> State:
        return self.pieces[i](v)

    def decomposition_holds(self, v: State) -> bool:
        return self.Q(v) == self.pieces[0](v) + self.pieces[1](v) + self.pieces[2](v)

    def squared(self, v: State) -> State:
        return self.Q(self.Q(v))

    def nilpotency_certificate(self) -> CertificateReport:
        qj = self.Q(self.j)
        dv = self.reg.D(self.reg.get("v"))
        return CertificateReport(qj == dv, qj, dv)

    def charge_commutator(self, name: str, v: State) -> State:
        """[J_0, Q] v for J = j_N or j_P."""
        J = self.reg.get(name)
        j0 = lambda s: self.va.mode_product(J, 0, s)  # noqa: E731
        return j0(self.Q(v)) - self.Q(j0(v))

    # -- picture changing ------------------------------------------------
    @property
    def X(self) -> ZeroModeOperator:
        if self._x is None:
            self._x = ZeroModeOperator(self.va, self.reg.get("X"), -1)
        return self._x

    def picture_change(self, v: State, check: bool = True) -> State:
        if check:
            from .smallspace import in_small_algebra
            if not in_small_algebra(v):
                raise SmallAlgebraError("state is not in the small algebra")
        return self.X(v)

    # -- the lemma Q0 v = D(c_{-1} v) --------------------------------------
    def lemma_ecl_check(self, v: State) -> LemmaReport:
        reg, va = self.reg, self.va
        wm = reg.get("omega_M") + reg.get("omega_betagamma")
        wbc = reg.get("omega_bc")
        L = lambda w, n, s: va.mode_product(w, n + 1, s)  # noqa: E731
        hyp = {"L0 v = v": L(wm, 0, v) == v}
        top = va.max_mode(wm, v)
        hyp["Ln v = 0 (n >= 1)"] = all(not L(wm, n, v) for n in range(1, int(top)))
        top = va.max_mode(wbc, v)
        hyp["Lbc_n v = 0 (n >= -1)"] = all(not L(wbc, n, v) for n in range(-1, max(int(top), 0)))
        holds = all(hyp.values())
        lhs = self.pieces[0](v)
        rhs = reg.D(va.mode_product(reg.get("c"), -1, v))
        return LemmaReport(hyp, holds, lhs == rhs)


_OPS: dict = {}


def brst_operator(va: VertexAlgebra | None = None) -> BrstOperator:
    reg = registry(va)
    op = _OPS.get(id(reg.va))
    if op is None or op.va is not reg.va:
        op = BrstOperator(reg.va)
        _OPS[id(reg.va)] = op
    return op


def apply_Q(v: State, va: VertexAlgebra | None = None) -> State:
    return brst_operator(va).apply(v)


def nilpotency_certificate(va: VertexAlgebra | None = None) -> CertificateReport:
    return brst_operator(va).nilpotency_certificate()


def picture_change(v: State, va: VertexAlgebra | None = None, check: bool = True) -> State:
    return brst_operator(va).picture_change(v, check)


def lemma_ecl_check(v: State, va: VertexAlgebra | None = None) -> LemmaReport:
    return brst_operator(va).lemma_ecl_check(v)


def ghost_number(v: State) -> Fraction:
    vals = {ghost_number_of(m) for m in v.terms}
    if len(vals) != 1:
        raise ValueError("state is inhomogeneous in ghost number")
    return vals.pop()


def picture(v: State) -> Fraction:
    vals = {picture_of(m) for m in v.terms}
    if len(vals) != 1:
        raise ValueError("state is inhomogeneous in picture")
    return vals.pop()
