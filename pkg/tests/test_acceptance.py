"""One test per acceptance criterion; each prints a PASS/FAIL line with its wall time."""
import itertools
import time
from contextlib import contextmanager

import pytest

from qvoa.coeffs import ONE, ZERO, Weight, kappa, partition_count, qpow

K = kappa()


@pytest.fixture
def criterion(acceptance_log):
    @contextmanager
    def run(number: int, title: str, limit: float):
        t0 = time.perf_counter()
        status = "FAIL"
        try:
            yield
            elapsed = time.perf_counter() - t0
            assert elapsed < limit, f"took {elapsed:.1f} s, limit {limit} s"
            status = "PASS"
        finally:
            elapsed = time.perf_counter() - t0
            line = f"{status} criterion {number:2d}: {title} ({elapsed:.1f} s, limit {limit:g} s)"
            acceptance_log.append((number, line))
            print(line)
    return run


def zero(residuals) -> bool:
    return all(r.is_zero() if hasattr(r, "is_zero") else not r for r in residuals.values())


def test_criterion_01_quantum_group_relations(criterion):
    from qvoa.uq import ModuleSpec, realization_residuals, relation_residuals
    with criterion(1, "quantum group relations and realization, depth 8", 10):
        formal = Weight.formal("l")
        specs = [ModuleSpec.verma(formal, 8), ModuleSpec.contragredient(formal, 8)]
        for lam in range(4):
            specs += [ModuleSpec.verma(lam, 8), ModuleSpec.contragredient(lam, 8), ModuleSpec.findim(lam)]
        for spec in specs:
            assert zero(relation_residuals(spec)), spec
        assert zero(realization_residuals(formal, 8))


def test_criterion_02_quasitriangular(criterion):
    from qvoa.uq import GradedVector, ModuleSpec, delta_id_r, id_delta_r, r13_r12, r13_r23
    with criterion(2, "quasitriangularity on three fundamental factors", 1):
        triple = ModuleSpec.tensor(*(ModuleSpec.findim(1),) * 3)
        vecs = [GradedVector.basis_vector(triple, b) for b in triple.basis()]
        assert len(vecs) == 8
        for v in vecs:
            assert id_delta_r(v) == r13_r12(v)
            assert delta_id_r(v) == r13_r23(v)


def test_criterion_03_braiding(criterion):
    from qvoa.braid import braiding_failures, braiding_matrix, compare_BM_BV
    with criterion(3, "braiding matrices for weights in {1, 2}", 60):
        tuples = [t for t in itertools.product((1, 2), repeat=4) if (sum(t[1:]) - t[0]) % 2 == 0]
        for lams in tuples:
            bm = braiding_matrix(lams, "V")
            assert braiding_failures(bm, raising_depth=2) == [], lams
            assert not bm.det().is_zero()
            assert compare_BM_BV(lams, bm)["mismatches"] == [], lams


def test_criterion_04_chains(criterion):
    from qvoa.chains import (algebra_E_prime, boundary, c_coefficient, coproduct_F_chain,
                             monodromy, monodromy_via_phi, phi_inverse, phi_map)
    from qvoa.uq import GradedVector, ModuleSpec, coproduct_act
    with criterion(4, "chain model conjugacies and coefficient recursion", 30):
        top = 3
        for npts in (2, 3):
            ws = [Weight.formal(n) for n in "abc"[:npts]]
            spec = ModuleSpec.tensor(*(ModuleSpec.verma(w, top + 1) for w in ws))
            for occ in itertools.product(range(top + 1), repeat=npts):
                if sum(occ) > top:
                    continue
                v = GradedVector.basis_vector(spec, occ)
                chain = phi_map(v)
                assert phi_inverse(chain, top + 1) == v
                assert coproduct_F_chain(chain) == phi_map(coproduct_act("F", v))
                assert boundary(chain) == phi_map(algebra_E_prime(v))
                for i in range(npts - 1):
                    assert monodromy(chain, i) == monodromy_via_phi(chain, i)
        lam = Weight.formal("l")
        for n in range(6):
            for k in range(n + 2):
                prev = c_coefficient(n, lam, k) if k <= n else ZERO
                lower = c_coefficient(n, lam, k - 1) if k >= 1 else ZERO
                assert c_coefficient(n + 1, lam, k) == prev - qpow(-2 * lam + 2 * n) * lower


def test_criterion_05_virasoro(criterion):
    from qvoa.fock import (FockSpec, central_charge, conformal_weight, vacuum, virasoro_act,
                           virasoro_bracket_residual)
    from qvoa.uq import GradedVector
    with criterion(5, "Virasoro bracket and conformal weight at cutoff 6", 30):
        assert central_charge() == 13 - 6 * (K + 1 / K)
        for lam in (0, 1, 2, "x"):
            spec = FockSpec(lam, 0, 6)
            assert virasoro_act(0, vacuum(spec)) == vacuum(spec) * conformal_weight(spec.momentum)
            for m, n in itertools.product(range(-3, 4), repeat=2):
                for b in spec.basis():
                    if sum(b) + max(0, -m) + max(0, -n) + max(0, -m - n) <= 6:
                        assert virasoro_bracket_residual(m, n, GradedVector(spec, {b: ONE})).is_zero()
        for lam in range(-1, 4):
            assert conformal_weight(lam) == ONE * (-lam) / 2 + ONE * lam * (lam + 2) / (4 * K)


def test_criterion_06_screening(criterion):
    from qvoa.fock import FockSpec, kernel_Qminus, screening_charge_minus, virasoro_act
    from qvoa.uq import GradedVector
    with criterion(6, "screening charge commutation and kernel dimensions", 60):
        spec = FockSpec(1, 0, 5)
        for n in range(-2, 3):
            for b in spec.basis():
                if sum(b) + max(0, -n) <= 5:
                    v = GradedVector(spec, {b: ONE})
                    assert screening_charge_minus(virasoro_act(n, v)) == virasoro_act(n, screening_charge_minus(v))
        for lam in range(4):
            for n in range(7):
                assert kernel_Qminus(lam, n)[0] == partition_count(n) - partition_count(n - lam - 1)
        for lam in (-1, -2):
            assert all(kernel_Qminus(lam, n)[0] == 0 for n in range(5))


def test_criterion_07_brst_identities(criterion):
    from qvoa.brst import ghost_central_charge, identity_failures
    with criterion(7, "ghost central charge, nilpotency and b0 homotopy", 120):
        assert ghost_central_charge() == -26
        for lam in range(3):
            res = identity_failures(lam, max_grade=4)
            assert res["checked"] > 0
            assert res["Q^2"] == [] and res["{Q,b_0} - L_0"] == []


def test_criterion_08_cohomology(criterion):
    from qvoa.brst import GHOST_NUMBERS, cohomology
    with criterion(8, "cohomology dimensions stable under cutoff + 1", 600):
        want = {-1: 0, 0: 1, 1: 0, 2: 0, 3: 1, 4: 0}
        for lam in range(3):
            base = {g: cohomology(lam, g) for g in GHOST_NUMBERS}
            assert {g: r.dim for g, r in base.items()} == want
            for g, r in base.items():
                assert cohomology(lam, g, depth=r.grade + 3).dim == r.dim


def test_criterion_09_representatives(criterion):
    from qvoa.brst import brst_Q, phi0_state, singular_vector_residuals
    with criterion(9, "closed ghost-number-zero representative and singular vectors", 10):
        assert brst_Q(phi0_state()).is_zero()
        res = singular_vector_residuals()
        assert set(res) == {1, -1} and all(r.is_zero() for r in res.values())


def test_criterion_10_slq2(criterion):
    from qvoa.brst import VACUUM, channel_scalar, determinant_class, slq2_check
    with criterion(10, "quantum coordinate ring relations and determinant", 30):
        rep = slq2_check()
        assert len(rep["relations"]) == 13 and all(c.passed for c in rep["relations"])
        assert all(c.passed for c in rep["algebra"])
        norm = rep["normalization"]

        def scalar(l1, l2, nu):
            return norm if (l1, l2, nu) == (1, 1, 0) else channel_scalar(l1, l2, nu)
        det = determinant_class(scalar)
        assert det.channel(2).is_zero() and det.channel(0) == VACUUM


def test_criterion_11_numeric(criterion):
    from qvoa.corr import (E, SQRT2, beta_closed, braid_check_fock_numeric, deficiency_factor,
                           expected_phase, monodromy_phase, pochhammer_s1)
    with criterion(11, "monodromy phase, Pochhammer identity and numeric braiding", 300):
        for k in (SQRT2, E):
            for lam, mu in itertools.product((1, 2), repeat=2):
                assert abs(monodromy_phase(lam, mu, k) - expected_phase(lam, mu, k)) < 1e-9
                val, est = pochhammer_s1(lam, mu, k)
                a, b = -lam / k, -mu / k
                assert abs(val - deficiency_factor(a, b) * beta_closed(a, b)) < 1e-6 and 10 * est < 1e-6
            for lams in ((1, 1, 1, 1), (2, 2, 1, 1), (2, 1, 1, 2)):
                assert braid_check_fock_numeric(lams, k).residual < 1e-5


def test_criterion_12_lz_laws(criterion):
    from qvoa.brst import associativity_check, commutativity_check, coproduct_checks
    with criterion(12, "braided commutativity, associativity and coproduct transpose", 30):
        assert all(c.passed for c in commutativity_check())
        assert all(c.passed for c in associativity_check())
        assert all(c.passed for c in coproduct_checks())
