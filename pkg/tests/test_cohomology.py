from fractions import Fraction

import pytest

from svoa import lattice as lt
from svoa.brst import brst_operator
from svoa.cohomology import (CohomologyError, clifford_report, cohomology_dims, cohomology_space,
                             complex_is_exact_square, euler_poincare_dim, gamma_matrices,
                             is_exact_state, massless_checks, picture_iso_check, susy_ope_check,
                             vector_state)
from svoa.exactfield import ONE, SQRT2
from svoa.fields import G_MINKOWSKI
from svoa.linalg import mat_rank
from svoa.smallspace import pairing

NULL = lt.lx_vector([1, 0, 0, 0, 0, 0, 0, 0, 0, 1])
NULL2 = lt.lx_vector([0, 0, 1, 0, 0, 0, 0, 0, 0, -1])
ZERO = lt.ZERO_VEC
NORM_M2 = lt.lx_vector([1, 1, 0, 0, 0, 0, 0, 0, 0, 2])


@pytest.mark.parametrize("alpha", [NULL, NULL2])
@pytest.mark.parametrize("p", [Fraction(-1), Fraction(-1, 2), Fraction(-3, 2)])
def test_null_momentum_dims(alpha, p):
    assert cohomology_dims(alpha, p) == {-1: 0, 0: 0, 1: 8, 2: 0, 3: 0}


@pytest.mark.parametrize("p,d", [(Fraction(-1), 10), (Fraction(-1, 2), 16), (Fraction(-3, 2), 16)])
def test_zero_momentum_ghost_one(p, d):
    assert cohomology_space(ZERO, p, 1).dim == d


def test_zero_momentum_vectors_are_closed_not_exact():
    Q = brst_operator()
    for mu in range(1, 11):
        v = vector_state(mu, ZERO)
        assert Q.apply(v).is_zero()
        assert not is_exact_state(ZERO, -1, 1, v)


def test_norm_minus_two_dims():
    assert cohomology_dims(NORM_M2, -1) == {-1: 0, 0: 0, 1: 128, 2: 0, 3: 0}


def test_norm_minus_two_half_picture():
    assert cohomology_space(NORM_M2, Fraction(-1, 2), 1).dim == 128


@pytest.mark.parametrize("alpha,c", [(NULL, 8), (NORM_M2, 128)])
def test_euler_poincare(alpha, c):
    r = euler_poincare_dim(alpha)
    assert r["c"] == c and r["alternating_sum"] == c and r["equal"]


def test_euler_poincare_matches_cohomology():
    r = euler_poincare_dim(NORM_M2)
    assert r["alternating_sum"] == sum(cohomology_dims(NORM_M2, -1).values())
    assert r["sectors"] == {-2: 1, -1: 11, 0: 67, 1: 242, 2: 67, 3: 11, 4: 1}


def test_euler_poincare_rejects_positive_norm():
    with pytest.raises(CohomologyError):
        euler_poincare_dim(lt.lx_vector([1, 0, 0, 0, 0, 0, 0, 0, 0, 0]))


@pytest.mark.parametrize("alpha,p", [(NULL, -1), (NULL, Fraction(-1, 2)), (ZERO, -1), (NORM_M2, -1)])
def test_q_squares_to_zero_on_complex(alpha, p):
    assert complex_is_exact_square(alpha, p)


def test_clifford_relations():
    rep = clifford_report()
    flags = {k: v for k, v in rep.items() if k != "gamma11_signs"}
    assert all(flags.values()), flags
    signs = rep["gamma11_signs"]
    # chirality separates the two 16-dimensional blocks
    assert len(set(signs[:16])) == 1 and len(set(signs[16:])) == 1 and signs[0] == -signs[16]


def test_gamma_square_is_metric():
    data = gamma_matrices()
    for mu in range(1, 11):
        g = data.gamma32(mu)
        sq = [[sum(g[i][k] * g[k][j] for k in range(32)) for j in range(32)] for i in range(32)]
        assert all(sq[i][j] == (G_MINKOWSKI[mu - 1] if i == j else 0) for i in range(32) for j in range(32))


def test_susy_ope():
    assert susy_ope_check()


@pytest.mark.parametrize("alpha", [NULL, NULL2])
def test_massless(alpha):
    rep = massless_checks(alpha)
    assert rep.passed, rep.checks
    assert rep.data["X_gamma_factor"] == ONE / SQRT2
    assert rep.data["longitudinal_scalar"]


def test_massless_rejects_bad_momentum():
    with pytest.raises(CohomologyError):
        massless_checks(ZERO)
    with pytest.raises(CohomologyError):
        massless_checks(NORM_M2)


@pytest.mark.parametrize("p", [-1, Fraction(-3, 2)])
def test_picture_changing_bijective_at_null(p):
    r = picture_iso_check(NULL, p)
    assert r.bijective and r.source_dim == 8
    assert r.ptilde_constant == 1


def test_picture_changing_zero_at_origin():
    r = picture_iso_check(ZERO, Fraction(-3, 2), ptilde=False)
    assert r.source_dim == 16 and r.target_dim == 16 and r.zero


def test_picture_changing_norm_minus_two():
    r = picture_iso_check(NORM_M2, -1, ptilde=False)
    assert r.bijective and r.rank == 128


def test_picture_dims_agree():
    for a in (NULL, NULL2):
        assert cohomology_space(a, -1, 1).dim == cohomology_space(a, Fraction(-1, 2), 1).dim


def test_class_reduction():
    H = cohomology_space(NULL, Fraction(-1), 1)
    reps = H.rep_states()
    for i, r in enumerate(reps):
        coords = H.class_of(r)
        assert coords == [ONE if j == i else 0 for j in range(H.dim)]
    # adding an exact state does not change the class
    Q = brst_operator()
    src = cohomology_space(NULL, Fraction(-1), 0).basis.states
    ex = next(Q.apply(s) for s in src if not Q.apply(s).is_zero())
    assert H.is_exact(ex)
    assert H.class_of(reps[0] + ex) == H.class_of(reps[0])


def test_class_of_rejects_open_state():
    H = cohomology_space(NULL, Fraction(-1), 1)
    Q = brst_operator()
    bad = next(s for s in H.basis.states if not Q.apply(s).is_zero())
    with pytest.raises(CohomologyError):
        H.class_of(bad)


@pytest.mark.parametrize("alpha", [NULL, NULL2])
def test_induced_form_nondegenerate(alpha):
    U = cohomology_space(alpha, Fraction(-1), 1).rep_states()
    V = cohomology_space(lt.neg(alpha), Fraction(-1), 1).rep_states()
    M = [[pairing(u, v, "C") for v in V] for u in U]
    assert mat_rank(M) == 8
