from fractions import Fraction

import pytest

from qvoa.coeffs import ONE, ZERO, kappa, partition_count, var
from qvoa.fock import (Charge, FockSpec, braid_phase_q_exponent, central_charge, conformal_weight,
                       correlator_free, delta_nu, delta_nu_alternate, expected_kernel_dim,
                       heisenberg_act, kernel_Qminus, screening_charge_minus, two_point_series,
                       vacuum, vertex_apply, vertex_mode_table, virasoro_act,
                       virasoro_bracket_residual)
from qvoa.uq import GradedVector, TruncationError

k = kappa()


def vec(spec, b):
    return GradedVector(spec, {b: ONE})


def test_heisenberg():
    S = FockSpec(0, 0, 6)
    assert heisenberg_act(1, heisenberg_act(-1, vacuum(S))) == vacuum(S) * (2 * k)
    assert heisenberg_act(2, vacuum(S)).is_zero()
    for b in S.basis():
        if sum(b) > 4:
            continue
        v = vec(S, b)
        comm = heisenberg_act(2, heisenberg_act(-2, v)) - heisenberg_act(-2, heisenberg_act(2, v))
        assert comm == v * (4 * k)


def test_truncation():
    S = FockSpec(0, 0, 2)
    with pytest.raises(TruncationError):
        heisenberg_act(-1, vec(S, (2,)))


@pytest.mark.parametrize("lam", [0, 1, -2, "x"])
def test_highest_weight(lam):
    S = FockSpec(lam, 0, 6)
    assert virasoro_act(0, vacuum(S)) == vacuum(S) * conformal_weight(S.momentum)
    assert virasoro_act(1, vacuum(S)).is_zero() and virasoro_act(2, vacuum(S)).is_zero()


def test_weight_formula():
    x = var("x")
    assert conformal_weight(x) == -x / 2 + x * (x + 2) / (4 * k)


def test_central_charge():
    c = central_charge()
    assert c == 13 - 6 * (k + 1 / k)
    S = FockSpec(0, 0, 4)
    one = vacuum(S)
    lhs = virasoro_act(2, virasoro_act(-2, one)) - virasoro_act(-2, virasoro_act(2, one))
    assert lhs == one * (c / 2)


@pytest.mark.parametrize("lam", [0, 1, "x"])
def test_virasoro_bracket(lam):
    S = FockSpec(lam, 0, 6)
    for m in range(-3, 4):
        for n in range(-3, 4):
            for b in S.basis():
                if sum(b) + max(0, -m) + max(0, -n) + max(0, -m - n) <= 6:
                    assert virasoro_bracket_residual(m, n, vec(S, b)).is_zero()


def test_vertex_leading_element():
    for lam, mu in [(1, 2), (0, 3), (2, (0, 1))]:
        S = FockSpec(lam, 0, 3)
        offset, series = vertex_apply(mu, vacuum(S))
        assert offset == Charge.coerce(mu).value * S.momentum / (2 * k)
        assert series[0].entries == {(): ONE}


def test_vertex_at_origin():
    offset, series = vertex_apply(3, vacuum(FockSpec(0, 0, 4)))
    assert offset.is_zero()
    assert series[0].module == FockSpec(3, 0, 4) and series[0].entries == {(): ONE}
    assert min(series) == 0


def test_mode_table_agrees_with_apply():
    S = FockSpec(1, 0, 3)
    tab = vertex_mode_table(2, S)
    for b in S.basis():
        _, direct = vertex_apply(2, vec(S, b))
        assert tab.apply(vec(S, b)) == direct


def test_two_point_binomial():
    for mu0, mu1, mu2 in [(0, 1, 2), (1, 1, 1), (2, -1, (0, 1))]:
        ser = two_point_series(mu1, mu2, mu0, order=4)
        a = Charge.coerce(mu1).value * Charge.coerce(mu2).value / (2 * k)
        c = ONE
        for d in range(5):
            assert ser.get(d, ZERO) == c
            c = c * (a - d) / (d + 1) * (-1)


def test_correlator_exponents():
    corr = correlator_free(2, [1, -2, 2], mu0=1)
    assert corr.nonzero
    e = corr.exponents
    assert e[(2, 1)] == -1 / k                # x - z
    assert e[(3, 1)] == 1 / k                 # z - z
    assert e[(2, 0)] == -1 / k
    screen = correlator_free(-4, [-2, -2])
    assert screen.exponents[(2, 1)] == 2 / k  # x - x
    assert not correlator_free(5, [1, 1]).nonzero
    assert correlator_free(1, [1]).exponents == {}


def test_braid_phase_exponent():
    assert braid_phase_q_exponent(1, 2) == 1
    assert braid_phase_q_exponent(2, 2) == 2


def test_screening_commutes():
    S = FockSpec(1, 0, 5)
    for n in range(-2, 3):
        for b in S.basis():
            if sum(b) + max(0, -n) > 5:
                continue
            v = vec(S, b)
            assert screening_charge_minus(virasoro_act(n, v)) == virasoro_act(n, screening_charge_minus(v))


def test_screening_special_states():
    assert not screening_charge_minus(vacuum(FockSpec(-1, 0, 3))).is_zero()
    for lam in range(4):
        img = screening_charge_minus(vec(FockSpec(lam, 0, lam + 1), (1,) * (lam + 1)))
        assert set(img.entries) == {()}


def test_kernel_dims():
    assert kernel_Qminus(1, 2)[0] == 1
    assert kernel_Qminus(0, 1)[0] == 0
    for lam in range(4):
        for n in range(7):
            assert kernel_Qminus(lam, n)[0] == partition_count(n) - partition_count(n - lam - 1)
            assert expected_kernel_dim(lam, n) == kernel_Qminus(lam, n)[0]
    for lam in (-1, -2):
        assert [kernel_Qminus(lam, n)[0] for n in range(5)] == [0] * 5


def test_kernel_is_virasoro_stable():
    for lam in (0, 1, 2):
        _, basis = kernel_Qminus(lam, 3, depth=5)
        for w in basis:
            for n in (-2, -1, 1, 2):
                assert screening_charge_minus(virasoro_act(n, w)).is_zero()


def test_screened_weight_shift():
    x, y = var("x"), var("y")
    for s in range(3):
        want = s + x * y / (2 * k) - s * (x + y) / k + Fraction(s * (s - 1)) / k
        assert delta_nu("x", "y", s) == want
    # the alternative closed form carries a stray -(lam + mu)/2kappa
    assert delta_nu("x", "y", 1) != delta_nu_alternate("x", "y", 1)
