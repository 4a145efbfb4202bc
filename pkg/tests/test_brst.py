import pytest

from qvoa.brst import (EXPECTED_DIMS, GHOST_NUMBERS, CapacityError, anticommutator,
                       brst_Q, c_dc_modes, c_mode, cohomology, exactness_witness, ghost_apply,
                       ghost_central_charge, ghost_virasoro, highest_state, identity_failures,
                       is_exact, locality_integral, phi0_ghost_coefficient, phi0_state,
                       phi3_state, singular_vector_residuals, total_virasoro)
from qvoa.coeffs import kappa

FOCK = ("fock", "fock")


def test_ghost_virasoro_weights():
    top = highest_state(0, 6, FOCK)
    assert ghost_virasoro(0, top).is_zero()
    b2 = ghost_apply(((0, -2),), top)
    assert ghost_virasoro(0, b2) == b2 * 2
    c1 = ghost_apply(((1, 1),), top)
    assert ghost_virasoro(0, c1) == c1 * (-1)
    for n in (1, 2):
        assert ghost_virasoro(n, top).is_zero()


@pytest.mark.parametrize("m", [2, 3, 4])
def test_ghost_central_charge(m):
    assert ghost_central_charge(m) == -26


def test_nilpotent_and_homotopy():
    res = identity_failures(1, max_grade=3)
    assert res["checked"] > 100
    assert res["Q^2"] == [] and res["{Q,b_0} - L_0"] == []


def test_q_on_c_modes():
    phi = highest_state(1, 6, FOCK)
    for w in (ghost_apply(((1, 1),), phi), total_virasoro(-1, ghost_apply(((1, 1),), phi))):
        for n in range(-2, 3):
            assert anticommutator(brst_Q, c_mode(n), w) == c_dc_modes(n, w)


@pytest.mark.parametrize("lam", [0, 1, 2])
def test_cohomology_dims(lam):
    got = {g: cohomology(lam, g).dim for g in GHOST_NUMBERS}
    assert got == EXPECTED_DIMS == {-1: 0, 0: 1, 1: 0, 2: 0, 3: 1, 4: 0}
    deeper = {g: cohomology(lam, g, depth=lam + 3).dim for g in GHOST_NUMBERS}
    assert deeper == got


def test_cohomology_capacity():
    with pytest.raises(CapacityError):
        cohomology(1, 0, depth=1)


def test_phi0():
    p0 = phi0_state()
    assert brst_Q(p0).is_zero() and not is_exact(p0)
    assert phi0_ghost_coefficient() == -1 / kappa()
    rep = cohomology(1, 0).representatives[0]
    key = ((1,), (), ())
    assert p0 == rep * (p0.entries[key] / rep.entries[key])


def test_phi3():
    p3 = phi3_state()
    assert not p3.is_zero() and p3.ghost_numbers == {3}
    assert brst_Q(p3).is_zero() and not is_exact(p3)


def test_singular_vectors():
    res = singular_vector_residuals()
    assert set(res) == {1, -1} and all(r.is_zero() for r in res.values())


def test_exactness_witness():
    v = brst_Q(ghost_apply(((0, -2),), highest_state(0, 6, FOCK)))
    assert not v.is_zero()
    psi = exactness_witness(v)
    assert brst_Q(psi) == v
    with pytest.raises(ValueError):
        exactness_witness(phi0_state())


def test_locality():
    assert all(locality_integral(n, n) for n in range(4))
    assert not locality_integral(1, 2)
