from fractions import Fraction

import pytest

from qvoa.coeffs import ONE, Weight, qint, qnum, qpow
from qvoa.uq import (GradedVector, ModuleSpec, TruncationError, act, act_factor, apply_element,
                     apply_tensor_element, apply_word, coproduct_act, coproduct_element,
                     delta_id_r, exact_sequence_dims, id_delta_r, jackson_qderiv, pairing,
                     r13_r12, r13_r23, r_bar_act, r_matrix_act, rcheck_act, realization_residuals,
                     relation_residuals, tau, tau_tensor)

l, m = Weight.formal("l"), Weight.formal("m")
q = qpow(1)


def basis(spec):
    return [GradedVector.basis_vector(spec, b) for b in spec.basis()]


@pytest.mark.parametrize("spec", [ModuleSpec.verma(l, 8), ModuleSpec.contragredient(l, 8),
                                  ModuleSpec.findim(3), ModuleSpec.verma(2, 6),
                                  ModuleSpec.contragredient(2, 6)], ids=str)
def test_relations(spec):
    assert all(r.is_zero() for r in relation_residuals(spec).values())


@pytest.mark.parametrize("w", [l, 0, 3])
def test_realization(w):
    assert all(not r for r in realization_residuals(w, 8).values())


def test_contragredient_actions():
    C = ModuleSpec.contragredient(l, 5)
    assert act("E", GradedVector.basis_vector(C, 0)).is_zero()
    v2 = GradedVector.basis_vector(C, 2)
    assert apply_word(("Ki", "E"), v2) == GradedVector.basis_vector(C, 1) * qint(2)


def test_commutator_on_verma():
    V = ModuleSpec.verma(l, 6)
    for j in range(5):
        v = GradedVector.basis_vector(V, j)
        lhs = apply_word(("E", "F"), v) - apply_word(("F", "E"), v)
        assert lhs == v * qnum(l - 2 * j)


def test_truncation_error():
    V = ModuleSpec.verma(l, 2)
    with pytest.raises(TruncationError):
        act("F", GradedVector.basis_vector(V, 2))


def test_jackson():
    assert jackson_qderiv({1: ONE}) == {0: ONE}
    assert jackson_qderiv({0: ONE}) == {}
    for j in range(1, 7):
        assert jackson_qderiv({j: ONE}) == {j - 1: qint(j)}


def test_coproduct_examples():
    T = ModuleSpec.tensor(ModuleSpec.verma(l, 3), ModuleSpec.verma(m, 3))
    top = GradedVector.basis_vector(T, (0, 0))
    assert coproduct_act("E", top).is_zero()
    e = coproduct_act("E", GradedVector.basis_vector(T, (1, 0)))
    assert e == top * (qnum(l) * qpow(m))
    f = coproduct_act("F", top)
    assert f == GradedVector.basis_vector(T, (1, 0)) + GradedVector.basis_vector(T, (0, 1)) * qpow(-l)


def test_tau():
    assert tau("K") == [(ONE, ("K",))]
    ef = tau([(ONE, ("E", "F"))])[0][1]
    assert ef == tau("F")[0][1] + tau("E")[0][1]
    T = ModuleSpec.tensor(ModuleSpec.findim(1), ModuleSpec.findim(1))
    for x in ("E", "F"):
        lhs = tau_tensor(coproduct_element([(ONE, (x,))]))
        rhs = coproduct_element(tau(x))
        assert all(apply_tensor_element(lhs, v) == apply_tensor_element(rhs, v) for v in basis(T))


def test_pairing():
    C, V = ModuleSpec.contragredient(l, 5), ModuleSpec.verma(l, 5)
    vs = lambda j: GradedVector.basis_vector(C, j)
    fv = lambda j: GradedVector.basis_vector(V, j)
    assert pairing(vs(0), fv(0)) == ONE
    assert pairing(vs(1), act("F", fv(0))) == ONE
    assert pairing(vs(2), fv(3)).is_zero()
    with pytest.raises(ValueError):
        pairing(vs(0), GradedVector.basis_vector(ModuleSpec.verma(m, 2), 0))


def test_pairing_adjoint():
    C, V = ModuleSpec.contragredient(l, 5), ModuleSpec.verma(l, 5)
    for g in ("E", "F", "K", "Ki"):
        for i in range(4):
            for j in range(4):
                vs, v = GradedVector.basis_vector(C, i), GradedVector.basis_vector(V, j)
                assert pairing(act(g, vs), v) == pairing(vs, apply_element(tau(g), v))


def test_r_on_highest_weights():
    T = ModuleSpec.tensor(ModuleSpec.verma(l, 2), ModuleSpec.verma(m, 2))
    top = GradedVector.basis_vector(T, (0, 0))
    assert r_matrix_act(top) == top * r_matrix_act(top).entries[(0, 0)]
    T2 = ModuleSpec.tensor(ModuleSpec.verma(2, 2), ModuleSpec.verma(3, 2))
    top2 = GradedVector.basis_vector(T2, (0, 0))
    assert r_matrix_act(top2) == top2 * qpow(3)


def test_r_fundamental():
    T = ModuleSpec.tensor(ModuleSpec.findim(1), ModuleSpec.findim(1))
    for v in basis(T):
        w = v + act_factor("E", act_factor("F", v, 1), 0) * (q - 1 / q)
        expect = GradedVector(T, {(i, j): c * qpow(ONE_HALF * (1 - 2 * i) * (1 - 2 * j))
                                  for (i, j), c in w.entries.items()})
        assert r_matrix_act(v) == expect


ONE_HALF = Weight(1) / 2


def test_r_bar_is_r_at_inverse_q():
    T = ModuleSpec.tensor(ModuleSpec.findim(1), ModuleSpec.findim(2))
    flip = lambda x: x.subs({"q": qpow(Fraction(-1, 2))})
    for v in basis(T):
        r, rb = r_matrix_act(v), r_bar_act(v)
        assert rb == GradedVector(T, {b: flip(c) for b, c in r.entries.items()})


def test_rcheck_intertwines():
    T = ModuleSpec.tensor(ModuleSpec.findim(1), ModuleSpec.findim(1))
    for v in basis(T):
        for g in ("E", "F", "K"):
            assert rcheck_act(coproduct_act(g, v)) == coproduct_act(g, rcheck_act(v))


def test_quasitriangular():
    T3 = ModuleSpec.tensor(*(ModuleSpec.findim(1),) * 3)
    vecs = basis(T3)
    assert len(vecs) == 8
    assert all(id_delta_r(v) == r13_r12(v) for v in vecs)
    assert all(delta_id_r(v) == r13_r23(v) for v in vecs)


@pytest.mark.parametrize("lam", [0, 1, 3])
def test_exact_sequence(lam):
    rows = exact_sequence_dims(lam, 6)
    for j, total, sub, quot in rows:
        assert total == sub + quot
        assert sub == int(j <= lam)
