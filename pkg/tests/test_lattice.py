import random
from fractions import Fraction
from itertools import product

import pytest

from svoa import lattice as lt
from svoa.exactfield import ONE, root_of_unity

HALF = Fraction(1, 2)
C = lt.CosetClass


@pytest.fixture(scope="module")
def lat():
    return lt.build_superstring_lattice()


def phase(x: Fraction):
    """e^{i pi x} for x in (1/4)Z."""
    assert (4 * x).denominator == 1
    return root_of_unity(int(4 * x))


def random_vector(lat, rng):
    v = lt.ZERO_VEC
    for b in lat.basis:
        k = rng.randint(-2, 2)
        if k:
            v = lt.add(v, lt.scale(b, k))
    return v


def test_gram_symmetric_and_lx_even_unimodular(lat):
    g = lat.lattice.gram
    assert all(g[i][j] == g[j][i] for i in range(18) for j in range(18))
    lx = [row[:10] for row in g[:10]]
    assert all(x.denominator == 1 for row in lx for x in row)
    assert all(lx[i][i] % 2 == 0 for i in range(10))
    assert lt._det(lx) == -1          # II_{9,1} is unimodular of signature (9,1)


def test_gram_determinant_matches_ii91_oracle(lat):
    # an independent basis of II_{9,1}: D9-type roots plus (1/2,...,1/2)
    oracle = [lt.lx_vector([1 if k == i else -1 if k == i + 1 else 0 for k in range(10)])
              for i in range(8)]
    oracle.append(lt.lx_vector([0] * 7 + [1, 1, 0]))
    oracle.append(lt.lx_vector([HALF] * 10))
    g = [[lt.ip(a, b) for b in oracle] for a in oracle]
    assert abs(lt._det(g)) == 1
    assert all(lt.in_ii91(v[:10]) for v in oracle)
    assert all(lat.contains(v) for v in oracle)


def test_epsilon_presets(lat):
    assert lat.epsilon(lt.PHI, lt.PHI) == -1
    assert lat.epsilon(lt.SIGMA, lt.SIGMA) == 1


def test_class_rules():
    assert lt.class_of(lt.ZERO_VEC) == C("0", 0)
    assert lt.class_of(lt.psi_vector([HALF] * 6)) == C("S", 0)
    assert lt.class_of(lt.SIGMA) == C("0", 1)
    assert lt.class_of(lt.PHI) == C("V", 0)
    with pytest.raises(lt.LatticeError):
        lt.class_of(lt.psi_vector([HALF, 0, 0, 0, 0, 0]))


def test_eta_specific_entries():
    for y in (1, -1):
        eta = lt.eta_table(y)
        assert eta[(C("S", 0), C("V", 0))] == y
        assert eta[(C("V", 0), C("S", 0))] == -y


def test_delta_values():
    for g in lt.ALL_CLASSES:
        assert lt.delta(C("0", 0), g) == 0
    assert lt.delta(C("S", 0), C("V", 0)) == HALF
    # the oracle: (delta_S, delta_V) = -1/2 in signature (5,1)
    assert lt.ip(lt.representative(C("S", 0)), lt.representative(C("V", 0))) == -HALF


@pytest.mark.parametrize("y", [1, -1])
def test_eta_bimultiplicative(y):
    eta = lt.eta_table(y)
    for g1, g2, g3 in product(lt.ALL_CLASSES, repeat=3):
        assert eta[(g1 + g2, g3)] == eta[(g1, g3)] * eta[(g2, g3)]
        assert eta[(g3, g1 + g2)] == eta[(g3, g1)] * eta[(g3, g2)]


def test_eta_condition_nc():
    eta = lt.eta_table()
    for g in lt.ALL_CLASSES:
        d = lt.representative(g)
        assert phase(lt.norm(d)) == eta[(g, g)]


def test_eta_locality_compatibility():
    eta = lt.eta_table()
    for g1, g2 in product(lt.ALL_CLASSES, repeat=2):
        lhs = phase(lt.delta(g1, g2)) * eta[(g1, g2)]
        rhs = phase(-lt.delta(g2, g1)) * eta[(g2, g1)]   # eta values are +-1
        assert lhs == rhs


def test_transposed_reading_also_bimultiplicative():
    # both readings pass, so bimultiplicativity alone does not fix the convention
    eta = lt.eta_table(transpose=True)
    for g1, g2, g3 in product(lt.ALL_CLASSES, repeat=3):
        assert eta[(g1 + g2, g3)] == eta[(g1, g3)] * eta[(g2, g3)]


def test_delta_symmetric_and_bilinear():
    for g1, g2, g3 in product(lt.ALL_CLASSES, repeat=3):
        assert lt.delta(g1, g2) == lt.delta(g2, g1)
        assert lt.delta(g1 + g2, g3) == (lt.delta(g1, g3) + lt.delta(g2, g3)) % 1


def test_cocycle_identities(lat):
    rng = random.Random(17)
    for _ in range(200):
        a, b, c = (random_vector(lat, rng) for _ in range(3))
        assert lat.epsilon(a, b) == lat.B(a, b) * lat.epsilon(b, a)
        lhs = lat.epsilon(a, b) * lat.epsilon(lt.add(a, b), c)
        rhs = lat.epsilon(b, c) * lat.epsilon(a, lt.add(b, c))
        assert lhs == rhs
        assert lat.epsilon(lt.ZERO_VEC, a) == ONE == lat.epsilon(a, lt.ZERO_VEC)


def test_B_diagonal_is_one(lat):
    rng = random.Random(23)
    for _ in range(100):
        a = random_vector(lat, rng)
        assert lat.B(a, a) == ONE


def test_membership(lat):
    assert lat.contains(lt.lx_vector([HALF] * 10))
    assert not lat.contains(lt.lx_vector([1] + [0] * 9))       # odd norm
    with pytest.raises(lt.LatticeError):
        lat.coset_class(lt.lx_vector([1] + [0] * 9))


def test_invalid_configuration():
    with pytest.raises(lt.LatticeError):
        lt.eta_table(y=2)
    with pytest.raises(lt.LatticeError):
        lt.SuperstringLattice("E8")
    with pytest.raises(lt.LatticeError):
        lt.SuperstringLattice([lt.lx_vector([1] + [0] * 9)] * 10)


def test_gso_parity():
    assert C("0", 0).parity == 0 and C("S", 1).parity == 0
    assert C("0", 1).parity == 1 and C("S", 0).parity == 1
    with pytest.raises(lt.LatticeError):
        C("V", 0).parity
