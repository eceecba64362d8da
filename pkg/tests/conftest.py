import random
from fractions import Fraction

import pytest

from svoa import lattice as lt
from svoa.fock import State

HALF = Fraction(1, 2)

# momenta that keep random Fock states small but span all coset classes
MOMENTUM_POOL = [
    lt.ZERO_VEC, lt.PHI, lt.neg(lt.PHI), lt.SIGMA, lt.neg(lt.SIGMA), lt.CHI,
    lt.phi_i(1), lt.neg(lt.phi_i(2)),
    lt.psi_vector([HALF, HALF, HALF, HALF, HALF, -HALF]),
    lt.psi_vector([HALF, -HALF, HALF, HALF, HALF, HALF]),
    lt.add(lt.PHI, lt.neg(lt.CHI)),
    lt.lx_vector([1, 0, 0, 0, 0, 0, 0, 0, 0, 1]),
    lt.lx_vector([1, 1, 0, 0, 0, 0, 0, 0, 0, 0]),
]
OSC_SLOTS = [0, 1, 9, 10, 11, 15, 16, 17]


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_momentum(rng, terms=2):
    v = lt.ZERO_VEC
    for _ in range(rng.randint(0, terms)):
        v = lt.add(v, rng.choice(MOMENTUM_POOL))
    return v


def random_monomial_state(rng, max_degree=3):
    mom = random_momentum(rng)
    left = rng.randint(0, max_degree)
    osc = []
    while left > 0:
        n = rng.randint(1, left)
        osc.append((rng.choice(OSC_SLOTS), n))
        left -= n
    return State.mono(osc, mom)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_svoa_acceptance", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
