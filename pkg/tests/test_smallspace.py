import random
from fractions import Fraction
from itertools import combinations

import pytest

from svoa import lattice as lt
from svoa.brst import brst_operator
from svoa.cohomology import spinor_state, vector_state
from svoa.fields import registry
from svoa.fock import State, exp_state, parity
from svoa.linalg import Echelon, mat_rank
from svoa.smallspace import (NORMALIZER, SectorError, SectorSpec, chi_kernel_basis, chi_small_basis,
                             enumerate_sector, in_small_algebra, pairing, sector_dim)

HALF = Fraction(1, 2)
NULL = lt.lx_vector([1, 0, 0, 0, 0, 0, 0, 0, 0, 1])


def basis(alpha, p, n, ker_b1=True):
    return enumerate_sector(SectorSpec(alpha, Fraction(p), n, 0, True, ker_b1)).states


def fermion_character(m: int, weight: int) -> int:
    """States of charge m and given weight built from (D xi)_{-n}, eta_{-n} (n >= 1)."""
    def subsets(total, count, smallest=1):
        if count == 0:
            return 1 if total == 0 else 0
        return sum(subsets(total - k, count - 1, k + 1) for k in range(smallest, total + 1))

    out = 0
    for n_eta in range(0, weight + 1):
        n_xi = n_eta + m
        if n_xi < 0:
            continue
        for w_xi in range(0, weight + 1):
            out += subsets(w_xi, n_xi) * subsets(weight - w_xi, n_eta)
    return out


@pytest.mark.parametrize("m", range(-3, 4))
def test_chi_span_matches_character(m):
    for N in range(0, 6):
        w = Fraction(m * (m - 1), 2) + N
        assert len(chi_small_basis(m, N)) == fermion_character(m, int(w))


@pytest.mark.parametrize("m", range(-2, 3))
def test_chi_span_is_kernel_of_eta0(m):
    for N in range(0, 5):
        small, ker = chi_small_basis(m, N), chi_kernel_basis(m, N)
        assert len(small) == len(ker)
        e = Echelon()
        for _, s in small:
            e.add(s.terms)
        assert all(e.contains(s.terms) for _, s in ker)


def test_small_algebra_membership(reg=None):
    reg = registry()
    for name in ("b", "c", "eta", "D_xi", "gamma", "beta", "X"):
        assert in_small_algebra(reg.get(name)), name
    assert not in_small_algebra(reg.get("xi"))


def test_small_algebra_closed_under_generators():
    reg = registry()
    gens = [reg.get(k) for k in ("D_xi", "eta", "b", "c")] + [exp_state(lt.neg(lt.PHI))]
    members = basis(NULL, -1, 1)[:4] + basis(NULL, Fraction(-1, 2), 1)[:4]
    rng = random.Random(3)
    for v in members:
        for g in gens:
            top = reg.va.max_mode(g, v)
            for n in (top, top - 1, top - rng.randint(2, 4)):
                w = reg.prod(g, n, v)
                if w:
                    assert in_small_algebra(w)


def test_sector_examples():
    vec = basis(NULL, -1, 1)
    assert len(vec) == 10
    e = Echelon()
    for s in vec:
        e.add(s.terms)
    assert all(e.contains(vector_state(mu, NULL).terms) for mu in range(1, 11))
    assert sector_dim(NULL, Fraction(-1, 2), 0) == 0
    spin = basis(NULL, Fraction(-3, 2), 1)
    assert len(spin) == 16
    e = Echelon()
    for s in spin:
        e.add(s.terms)
    assert all(e.contains(spinor_state(k, NULL, dotted=False).terms) for k in range(16))


def test_sector_members_are_graded_and_closed_under_b1():
    reg = registry()
    for s in basis(NULL, -1, 1) + basis(NULL, Fraction(-1, 2), 1):
        assert reg.prod(reg.get("b"), 1, s).is_zero()
        assert in_small_algebra(s)


def test_sector_spec_validation():
    with pytest.raises(SectorError):
        SectorSpec(lt.PHI, Fraction(-1), 1)


def test_normalization():
    assert pairing(exp_state(NORMALIZER), exp_state(lt.ZERO_VEC)) == 1
    assert pairing(exp_state(lt.ZERO_VEC), exp_state(NORMALIZER)) == 1


def _exponential_pool():
    pool = []
    for a in range(-3, 2):
        for sp in (None, [HALF] * 5, [HALF, -HALF, -HALF, HALF, HALF]):
            for x in (lt.ZERO_VEC, NULL, lt.neg(NULL)):
                v = lt.add(x, lt.scale(lt.PHI, a) if sp is None else
                           lt.add(lt.psi_vector(sp + [0]), lt.psi_vector([0] * 5 + [Fraction(2 * a + 1, 2)])))
                if lt.class_of(v).psi_phi in ("0", "S"):
                    pool.append(v)
    return pool


def test_pairing_selection_rule():
    rng = random.Random(50)
    pool = _exponential_pool()
    minus2phi = lt.scale(lt.PHI, -2)
    checked = nonzero = 0
    while checked < 50:
        g = rng.choice(pool)
        n = rng.randint(-1, 3)
        if rng.random() < 0.5:
            g2, n2 = lt.sub(minus2phi, g), 3 - n
        else:
            g2, n2 = rng.choice(pool), rng.randint(-1, 3)
        u, v = lt.add(g, lt.scale(lt.SIGMA, n)), lt.add(g2, lt.scale(lt.SIGMA, n2))
        if not (lt.class_of(u).gso and lt.class_of(v).gso):
            continue
        if lt.class_of(u).parity is None:
            continue
        val = pairing(exp_state(u), exp_state(v))
        expected = lt.add(g, g2) == minus2phi and n + n2 == 3
        assert bool(val) == expected
        checked += 1
        nonzero += expected
    assert nonzero >= 10


def _ghost_pool():
    pool = []
    for k in range(-1, 5):
        for j in range(-3, 1):
            for x in (lt.ZERO_VEC, NULL):
                v = lt.add(lt.add(lt.scale(lt.SIGMA, k), lt.scale(lt.PHI, j)), x)
                if lt.class_of(v).gso:
                    pool.append(exp_state(v))
                    pool.append(State.mono([(lt.SIGMA_SLOT, 1)], v))
    return pool


def test_ghost_adjoints_through_pairing():
    """(a_n u, v) = (-1)^{|u|} (u, a_n^* v) for the odd fields b and c."""
    reg = registry()
    b, c = reg.get("b"), reg.get("c")
    pool = _ghost_pool()
    nonzero = 0
    for u in pool:
        sign = (-1) ** parity(u)
        for v in pool:
            for n in range(-3, 4):
                lhs = pairing(reg.prod(b, n, u), v)
                assert lhs == pairing(u, reg.prod(b, 2 - n, v)) * sign
                lhs2 = pairing(reg.prod(c, n, u), v)
                assert lhs2 == -pairing(u, reg.prod(c, -4 - n, v)) * sign
                nonzero += bool(lhs) + bool(lhs2)
    assert nonzero > 50


def test_q_antiselfadjoint():
    op = brst_operator()
    nonzero = 0
    for (p, n, pp, nn) in [(-1, 0, -1, 2), (Fraction(-3, 2), 0, Fraction(-1, 2), 2),
                           (-1, 1, -1, 1)]:
        U = basis(NULL, p, n, False)[:6]
        V = basis(lt.neg(NULL), pp, nn, False)[:6]
        for u in U:
            for v in V:
                val = pairing(op.apply(u), v)
                assert val == -pairing(u, op.apply(v))
                nonzero += bool(val)
    assert nonzero > 0


def test_x_selfadjoint():
    X = brst_operator().X
    # X raises the picture by one: pair (p, n) with (-3 - p, 3 - n)
    for (p, n) in [(Fraction(-3, 2), 1), (-2, 1)]:
        U = basis(NULL, p, n, False)[:8]
        V = basis(lt.neg(NULL), -3 - p, 3 - n, False)[:8]
        nonzero = 0
        for u in U:
            for v in V:
                val = pairing(X(u), v)
                assert val == pairing(u, X(v))
                nonzero += bool(val)
        assert nonzero > 0


@pytest.mark.parametrize("p,m", [(-1, 1), (-1, 0), (Fraction(-1, 2), 1), (Fraction(-3, 2), 1)])
def test_c_pairing_nondegenerate(p, m):
    U = basis(NULL, p, m)
    V = basis(lt.neg(NULL), -2 - p, 2 - m)
    assert len(U) == len(V)
    M = [[pairing(u, v, "C") for v in V] for u in U]
    assert mat_rank(M) == len(U)


def test_pairing_grades_mismatch_vanish():
    U = basis(NULL, -1, 1)
    V = basis(lt.neg(NULL), -1, 2)
    assert all(not pairing(u, v, "C") for u in U for v in V)


def test_unknown_variant():
    with pytest.raises(ValueError):
        pairing(exp_state(lt.ZERO_VEC), exp_state(lt.ZERO_VEC), "D")
