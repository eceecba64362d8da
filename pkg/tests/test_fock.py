import random
from collections import Counter
from fractions import Fraction
from math import comb

import pytest

from svoa import lattice as lt
from svoa.fock import (VACUUM, GradingError, State, colored_oscillators, count_colored, coset_of,
                       enumerate_monomials, exp_state, grade, heis_apply, parity, partitions,
                       state_from_json, state_to_json)

from conftest import random_monomial_state


def test_heisenberg_relation():
    for slot in (0, 9, 15, 16, 17):
        g = lt.METRIC[slot]
        v = heis_apply(slot, -1, VACUUM)
        assert heis_apply(slot, 1, v) == VACUUM.scale(g)


def test_zero_mode_on_exponential():
    alpha = lt.lx_vector([1, 2, 0, 0, 0, 0, 0, 0, 0, 3])
    for mu in range(10):
        expected = lt.ip(lt.unit(mu), alpha)
        assert heis_apply(mu, 0, exp_state(alpha)) == exp_state(alpha).scale(expected)


@pytest.mark.parametrize("n", range(-3, 4))
def test_chi_zero_mode(n):
    v = exp_state(lt.scale(lt.CHI, n))
    assert heis_apply(lt.CHI_SLOT, 0, v) == v.scale(n)


@pytest.mark.parametrize("n", range(-3, 4))
def test_ghost_grading_table(n):
    g = grade(exp_state(lt.scale(lt.PHI, n)))
    assert (g.l0, g.ghost_number, g.picture) == (Fraction(-n * (n + 2), 2), 0, n)
    g = grade(exp_state(lt.scale(lt.SIGMA, n)))
    assert (g.l0, g.ghost_number, g.picture) == (Fraction(n * (n - 3), 2), n, 0)
    g = grade(exp_state(lt.scale(lt.CHI, n)))
    assert (g.l0, g.ghost_number, g.picture) == (Fraction(n * (n - 1), 2), -n, n)


def test_heisenberg_commutator_property():
    rng = random.Random(2)
    slots = [0, 9, 12, 15, 16, 17]
    for _ in range(150):
        v = random_monomial_state(rng) + random_monomial_state(rng)
        d1, d2 = rng.choice(slots), rng.choice(slots)
        m, n = rng.randint(-3, 3), rng.randint(-3, 3)
        lhs = heis_apply(d1, m, heis_apply(d2, n, v)) - heis_apply(d2, n, heis_apply(d1, m, v))
        k = m * lt.METRIC[d1] if (d1 == d2 and m + n == 0) else 0
        assert lhs == v.scale(k)


def test_rational_direction_expands_linearly():
    h = [0] * 18
    h[0], h[9] = Fraction(1, 2), 3
    v = exp_state(lt.lx_vector([1, 0, 0, 0, 0, 0, 0, 0, 0, 1]))
    expected = heis_apply(0, -2, v).scale(Fraction(1, 2)) + heis_apply(9, -2, v).scale(3)
    assert heis_apply(h, -2, v) == expected


def colored_count_oracle(degree, colors):
    """Colored partitions by enumerating ordinary partitions and distributing colors."""
    total = 0
    for lam in partitions(degree):
        ways = 1
        for mult in Counter(lam).values():
            ways *= comb(mult + colors - 1, colors - 1)
        total += ways
    return total


@pytest.mark.parametrize("degree,colors", [(0, 3), (1, 18), (3, 4), (4, 18), (6, 2)])
def test_enumeration_counts(degree, colors):
    slots = list(range(colors))
    found = list(colored_oscillators(degree, slots))
    assert len(found) == len(set(found)) == colored_count_oracle(degree, colors)
    assert count_colored(degree, colors) == len(found)


def test_enumerate_monomials_is_graded():
    mom = lt.lx_vector([1, 0, 0, 0, 0, 0, 0, 0, 0, 1])
    ms = enumerate_monomials(mom, 2, slots=[0, 1])
    assert len(ms) == 1 + 2 + 5
    assert all(m[1] == mom for m in ms)


def test_gso_parity():
    assert parity(VACUUM) == 0
    assert parity(exp_state(lt.SIGMA)) == 1
    spin = lt.psi_vector([Fraction(1, 2)] * 6)
    assert parity(exp_state(spin)) == 1
    assert parity(exp_state(lt.add(spin, lt.SIGMA))) == 0


def test_inhomogeneous_states_rejected():
    v = VACUUM + exp_state(lt.SIGMA)
    with pytest.raises(GradingError):
        coset_of(v)
    with pytest.raises(GradingError):
        grade(State())


def test_state_linear_structure():
    rng = random.Random(9)
    for _ in range(50):
        a, b = random_monomial_state(rng), random_monomial_state(rng)
        assert a + b - b == a
        assert (a - a).is_zero()
        assert a.scale(2) == a + a


def test_json_round_trip_and_stable_order():
    rng = random.Random(4)
    for _ in range(50):
        v = random_monomial_state(rng).scale(Fraction(3, 7)) + random_monomial_state(rng)
        js = state_to_json(v)
        assert state_from_json(js) == v
        assert state_to_json(state_from_json(js)) == js
