"""Mode products a_n b in the lattice vertex algebra.

For monomials ``a = prod_i e_{d_i}(-n_i) e^alpha`` and
``b = p(x) e^beta`` the field is

    a(z) = e^alpha c_alpha E^-(z) :prod_i d^{(n_i-1)} e_{d_i}(z): z^{alpha(0)} E^+(z)

and a_N b is the coefficient of z^{-N-1} in a(z)b.  The kernel acts on b
directly:

1. every oscillator of ``a`` is split into its annihilation part (mode
   ``l >= 0``, coefficient ``binom(-l-1, n-1) z^{-l-n}``) or its creation
   part (mode ``-(e+n)``, coefficient ``binom(e+n-1, n-1) z^e``);
2. ``E^+`` shifts each oscillator ``x_{d,m}`` of b by ``-g_d alpha_d z^{-m}``;
3. ``E^-`` contributes Schur polynomials ``S_k(alpha) z^k``;
4. ``e^alpha c_alpha z^{alpha(0)}`` gives ``eps(alpha,beta) z^{(alpha,beta)} e^{alpha+beta}``.

Everything except the cocycle phase is rational, so the kernel returns a
rational polynomial together with one power of i.
"""

from __future__ import annotations

import hashlib
import os
import pickle
import threading
import warnings
from fractions import Fraction
from math import comb

from gmpy2 import mpq

from . import lattice as lt
from .exactfield import ONE, ZERO, Cyc, root_of_unity, to_cyc
from .fock import State, accumulate, l0_of, linear_sum, osc_degree

CACHE_VERSION = 1


class ModeIndexError(ValueError):
    pass


def gbinom(x, k: int) -> Fraction:
    """Generalized binomial coefficient binom(x, k), x rational, k >= 0."""
    if k < 0:
        return Fraction(0)
    x = Fraction(x)
    if x.denominator == 1 and x >= 0:
        return Fraction(comb(int(x), k))
    num = Fraction(1)
    for j in range(k):
        num *= x - j
    den = 1
    for j in range(2, k + 1):
        den *= j
    return num / den


def _binom_int(n: int, k: int) -> int:
    """binom(n, k) for integer n (possibly negative), k >= 0."""
    if k < 0:
        return 0
    if n >= 0:
        return comb(n, k)
    # binom(-m, k) = (-1)^k binom(m+k-1, k)
    return (-1) ** k * comb(-n + k - 1, k)


def mode_index(n) -> Fraction:
    q = Fraction(n)
    if q.denominator not in (1, 2):
        raise ModeIndexError(f"mode index {n} is not in (1/2)Z")
    return q


# ----------------------------------------------------------------------
# polynomial helpers: dict osc_tuple -> Fraction

def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(sorted(m1 + m2)) if m1 and m2 else (m1 or m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


class VertexAlgebra:
    """The lattice vertex algebra V_L with a memoized mode-product kernel."""

    def __init__(self, lattice: lt.SuperstringLattice | None = None, cache: bool = True):
        self.lattice = lattice or lt.build_superstring_lattice()
        self.use_cache = cache
        self._kernel_cache: dict = {}
        self._schur_cache: dict = {}
        self._schur_q: dict = {}
        self._lock = threading.Lock()
        self.stats = {"hits": 0, "misses": 0}

    # -- Schur polynomials ------------------------------------------------
    def schur(self, alpha, k: int) -> dict:
        """S_k(alpha) as a dict osc_tuple -> Fraction."""
        key = (alpha, k)
        hit = self._schur_cache.get(key)
        if hit is not None:
            return hit
        if k == 0:
            res = {(): Fraction(1)}
        else:
            comps = [(d, Fraction(a, 2)) for d, a in enumerate(alpha) if a]
            res = {}
            for m in range(1, k + 1):
                prev = self.schur(alpha, k - m)
                if not prev:
                    continue
                lin = {((d, m),): c for d, c in comps}
                for mono, c in _poly_mul(lin, prev).items():
                    v = res.get(mono, 0) + c / k
                    if v:
                        res[mono] = v
                    else:
                        res.pop(mono, None)
        self._schur_cache[key] = res
        return res

    def _schur_mpq(self, alpha, k: int) -> dict:
        key = (alpha, k)
        hit = self._schur_q.get(key)
        if hit is None:
            hit = self._schur_q[key] = {m: mpq(c.numerator, c.denominator)
                                        for m, c in self.schur(alpha, k).items()}
        return hit

    def schur_state(self, alpha, k: int) -> State:
        return State({(osc, tuple(alpha)): c for osc, c in self.schur(tuple(alpha), k).items()})

    # -- the kernel ---------------------------------------------------------
    def kernel(self, am, N: Fraction, bm):
        """Return (phase exponent e, {osc: Fraction}) with a_N b = i^e sum c osc e^{alpha+beta}."""
        key = (am, N, bm)
        if self.use_cache:
            hit = self._kernel_cache.get(key)
            if hit is not None:
                self.stats["hits"] += 1
                return hit
        self.stats["misses"] += 1
        res = self._kernel(am, N, bm)
        if self.use_cache:
            with self._lock:
                self._kernel_cache.setdefault(key, res)
        return res

    def _kernel(self, am, N, bm):
        aosc, alpha = am
        bosc, beta = bm
        ab4 = lt.ip4(alpha, beta)
        # target power of z, relative to z^{(alpha,beta)}
        R = -N - 1 - Fraction(ab4, 4)
        if R.denominator != 1:
            return (0, {})
        R = int(R)
        if R < -(osc_degree(aosc) + osc_degree(bosc)):
            return (0, {})
        metric = lt.METRIC

        # step 1: annihilation / creation split of a's oscillators
        # states: (poly_osc_list, coeff, zpow, creators)
        # rational arithmetic runs on gmpy2 mpq; results are converted back
        states = [(list(bosc), mpq(1), 0, ())]
        for d, n in aosc:
            g = metric[d]
            new = []
            for poly, c, zp, cre in states:
                new.append((poly, c, zp, cre + ((d, n),)))
                bd = beta[d]
                if bd:
                    f = _binom_int(-1, n - 1) * g * mpq(bd, 2)
                    new.append((poly, c * f, zp - n, cre))
                for l in sorted({m for dd, m in poly if dd == d}):
                    cnt = poly.count((d, l))
                    f = _binom_int(-l - 1, n - 1) * l * g * cnt
                    if not f:
                        continue
                    rest = list(poly)
                    rest.remove((d, l))
                    new.append((rest, c * f, zp - l - n, cre))
            states = new

        out: dict = {}
        for poly, c, zp, cre in states:
            # step 2: E^+ substitution on the remaining oscillators of b
            subs = [((), mpq(1), 0)]
            for d, m in poly:
                ad = alpha[d]
                nxt = []
                for kept, cc, zz in subs:
                    nxt.append((kept + ((d, m),), cc, zz))
                    if ad:
                        nxt.append((kept, cc * (-metric[d]) * mpq(ad, 2), zz - m))
                subs = nxt
            merged: dict = {}
            for kept, cc, zz in subs:
                k2 = (tuple(sorted(kept)), zz)
                merged[k2] = merged.get(k2, 0) + cc
            for (kept, zz), cc in merged.items():
                if not cc:
                    continue
                E = R - zp - zz
                if E < 0:
                    continue
                base = {kept: c * cc}
                self._distribute(base, cre, E, alpha, out)
        eps = self.lattice.eps_exp(alpha, beta)
        out = {o: Fraction(int(v.numerator), int(v.denominator)) for o, v in out.items() if v}
        return (eps, out)

    def _distribute(self, base: dict, creators, E: int, alpha, out: dict) -> None:
        """Spread z^E over creators (d, n) and the Schur factor."""

        def rec(i, remaining, poly):
            if i == len(creators):
                sch = self._schur_mpq(alpha, remaining)
                if not sch:
                    return
                for mono, v in _poly_mul(poly, sch).items():
                    w = out.get(mono, 0) + v
                    if w:
                        out[mono] = w
                    else:
                        out.pop(mono, None)
                return
            d, n = creators[i]
            for e in range(remaining + 1):
                f = comb(e + n - 1, n - 1)
                x = (d, e + n)
                rec(i + 1, remaining - e, {tuple(sorted(m + (x,))): c * f for m, c in poly.items()})

        rec(0, E, base)

    # -- public operations --------------------------------------------------
    def mode_product(self, a: State, n, b: State, strict: bool = False) -> State:
        """a_n b, extended bilinearly."""
        N = mode_index(n)
        nn, nd = N.numerator, N.denominator
        out: dict = {}
        compatible = False
        raw = Cyc._raw
        bterms = [(bm, cb, osc_degree(bm[0])) for bm, cb in b.terms.items()]
        for am, ca in a.terms.items():
            adeg = osc_degree(am[0])
            for bm, cb, bdeg in bterms:
                # 4 nd R = -4 nn - nd (4 + ab4), R the target power of z
                r4 = -4 * nn - nd * (4 + lt.ip4(am[1], bm[1]))
                if r4 % (4 * nd):
                    continue
                compatible = True
                if r4 // (4 * nd) < -(adeg + bdeg):
                    continue
                eps, poly = self.kernel(am, N, bm)
                if not poly:
                    continue
                k = (ca * cb).times_zeta(2 * eps)
                (k0, k1, k2, k3), kd = k.c, k.d
                mom = lt.add(am[1], bm[1])
                for osc, v in poly.items():
                    vn, vd = v.numerator, v.denominator
                    accumulate(out, (osc, mom), raw(k0 * vn, k1 * vn, k2 * vn, k3 * vn, kd * vd))
        if a and b and not compatible:
            msg = f"mode index {N} is incompatible with the coset classes (result is zero)"
            if strict:
                raise ModeIndexError(msg)
            warnings.warn(msg, stacklevel=2)
        return State._wrap(out)

    def max_mode(self, a: State, b: State) -> Fraction | None:
        """Largest n with a_n b possibly nonzero (None if a or b is zero)."""
        best = None
        for am in a.terms:
            for bm in b.terms:
                v = osc_degree(am[0]) + osc_degree(bm[0]) - 1 - Fraction(lt.ip4(am[1], bm[1]), 4)
                if best is None or v > best:
                    best = v
        return best

    def derivation(self, a: State) -> State:
        return self.mode_product(a, -2, VACUUM_STATE)

    def derivation_direct(self, a: State) -> State:
        """D as the derivation with D e^alpha = alpha(-1) e^alpha, D h(-n) = n h(-n-1)."""
        out: dict = {}
        for (osc, mom), c in a.terms.items():
            for d, x in enumerate(mom):
                if x:
                    accumulate(out, (tuple(sorted(osc + ((d, 1),))), mom), c * Fraction(x, 2))
            for i, (d, n) in enumerate(osc):
                new = osc[:i] + ((d, n + 1),) + osc[i + 1:]
                accumulate(out, (tuple(sorted(new)), mom), c * n)
        return State._wrap(out)

    def divided_derivative(self, a: State, j: int) -> State:
        """D^{(j)} a = D^j a / j!."""
        out = a
        for i in range(1, j + 1):
            out = self.derivation_direct(out).scale(Fraction(1, i))
        return out

    def classes(self, v: State) -> lt.CosetClass:
        from .fock import coset_of
        return coset_of(v)

    def eta(self, a: State, b: State) -> int:
        return self.lattice.eta_value(self.classes(a), self.classes(b))

    # -- Borcherds identity -------------------------------------------------
    def check_borcherds(self, a: State, b: State, c: State, n, k, m) -> dict:
        n, k, m = mode_index(n), mode_index(k), mode_index(m)
        g1, g2, g3 = self.classes(a), self.classes(b), self.classes(c)
        if (n - lt.delta(g1, g2)).denominator != 1 or (k - lt.delta(g1, g3)).denominator != 1:
            raise ModeIndexError("n or k is incompatible with the coset classes")
        eta12 = self.lattice.eta_value(g1, g2)
        phase = root_of_unity(int(4 * n)) * eta12     # eta e^{i pi n}

        lhs = State()
        j = 0
        while True:
            bc = self.mode_product(b, m + j, c)
            ac = self.mode_product(a, k + j, c)
            if not bc and not ac and self._past(b, c, m + j) and self._past(a, c, k + j):
                break
            coef = gbinom(n, j) * (-1) ** j
            if coef:
                t1 = self.mode_product(a, n + k - j, bc) if bc else State()
                t2 = self.mode_product(b, m + n - j, ac) if ac else State()
                lhs = lhs + (t1 - t2.scale(phase)).scale(coef)
            j += 1
        rhs = State()
        j = 0
        top = self.max_mode(a, b)
        while top is not None and n + j <= top:
            ab = self.mode_product(a, n + j, b)
            coef = gbinom(k, j)
            if ab and coef:
                rhs = rhs + self.mode_product(ab, k + m - j, c).scale(coef)
            j += 1
        return {"lhs": lhs, "rhs": rhs, "equal": lhs == rhs}

    def _past(self, x: State, y: State, idx) -> bool:
        top = self.max_mode(x, y)
        return top is None or idx > top

    # -- adjoint modes ------------------------------------------------------
    def adjoint_mode(self, a: State, n, b: State, omega: State | None = None) -> State:
        """a_n^* b = (-1)^h sum_m (L_1^m a / m!)_{2h-n-m-2} b."""
        if omega is None:
            from .fields import build_field
            omega = build_field("omega", self)
        hs = {l0_of(mm) for mm in a.terms}
        if len(hs) != 1:
            raise ModeIndexError("adjoint needs an L0-homogeneous state")
        h = hs.pop()
        if h.denominator != 1:
            raise ModeIndexError(f"adjoint needs integral weight, got {h}")
        h = int(h)
        N = mode_index(n)
        sign = -1 if h % 2 else 1
        out = State()
        term = a
        mfact = 1
        m = 0
        while term:
            out = out + self.mode_product(term, 2 * h - N - m - 2, b).scale(Fraction(sign, mfact))
            m += 1
            mfact *= m
            term = self.mode_product(omega, 2, term)
        return out

    # -- cache persistence --------------------------------------------------
    def cache_info(self) -> dict:
        return {"entries": len(self._kernel_cache), **self.stats}

    def clear_cache(self) -> None:
        with self._lock:
            self._kernel_cache.clear()
            self.stats = {"hits": 0, "misses": 0}

    def _cache_tag(self) -> str:
        lat = self.lattice
        raw = repr((CACHE_VERSION, lat.y, lat.lx_basis)).encode()
        return hashlib.sha256(raw).hexdigest()[:16]

    def save_cache(self, path: str) -> None:
        payload = pickle.dumps(self._kernel_cache, protocol=pickle.HIGHEST_PROTOCOL)
        digest = hashlib.sha256(payload).hexdigest()
        header = f"svoa-cache {CACHE_VERSION} {self._cache_tag()} {digest}\n".encode()
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(header)
            fh.write(payload)
        os.replace(tmp, path)

    def load_cache(self, path: str) -> bool:
        """Merge a saved cache; returns False (and ignores the file) if it is stale or corrupt."""
        try:
            with open(path, "rb") as fh:
                header = fh.readline().decode().split()
                payload = fh.read()
        except OSError:
            return False
        if len(header) != 4 or header[0] != "svoa-cache" or header[1] != str(CACHE_VERSION):
            return False
        if header[2] != self._cache_tag():
            return False
        if hashlib.sha256(payload).hexdigest() != header[3]:
            return False
        try:
            data = pickle.loads(payload)
        except Exception:
            return False
        with self._lock:
            for k, v in data.items():
                self._kernel_cache.setdefault(k, v)
        return True


VACUUM_STATE = State.mono()

_DEFAULT: dict = {}


def default_algebra(y: int = 1) -> VertexAlgebra:
    va = _DEFAULT.get(y)
    if va is None:
        va = VertexAlgebra(lt.build_superstring_lattice(y=y))
        _DEFAULT[y] = va
    return va


def mode_product(a: State, n, b: State, va: VertexAlgebra | None = None) -> State:
    return (va or default_algebra()).mode_product(a, n, b)


def derivation(a: State, va: VertexAlgebra | None = None) -> State:
    return (va or default_algebra()).derivation(a)


def check_borcherds(a, b, c, n, k, m, va: VertexAlgebra | None = None) -> dict:
    return (va or default_algebra()).check_borcherds(a, b, c, n, k, m)


def adjoint_mode(a, n, b, va: VertexAlgebra | None = None, omega=None) -> State:
    return (va or default_algebra()).adjoint_mode(a, n, b, omega)
