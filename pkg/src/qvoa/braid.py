"""Singular vectors, explicit intertwiners between contragredient modules and
braiding matrices solved from the R-matrix action.

Intertwiner coefficients (mu lam nu; m l n) are defined by
Phi(v_{m,mu} (x) v_{l,lam}) = (mu lam nu; m l n) v_{n,nu} with the normalization
(mu lam nu; s 0 0) = 1, s = (mu + lam - nu)/2.  The dual maps
M_nu -> M_mu (x) M_lam are fixed by the pairing <v_m, F^n v> = [m]! delta_mn,
so the singular vector of weight nu has coefficient 1/[s]! on F^s v_mu (x) v_lam.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from . import linalg
from .coeffs import (ONE, ZERO, RatFunc, Weight, qbinom_bracket, qfact, qint,
                     qnum, qpow, specialize_weights)
from .uq import (GradedVector, ModuleSpec, coproduct_act,
                 rcheck_act)


# --------------------------------------------------------- singular vectors

def _tensor(weights: Sequence, depth: int, kind: str = "verma") -> ModuleSpec:
    facs = []
    for w in weights:
        if kind == "findim":
            facs.append(ModuleSpec.findim(int(w)))
        else:
            facs.append(ModuleSpec.verma(w, depth))
    return ModuleSpec.tensor(*facs)


def singular_vectors(weights: Sequence, level: int, kind: str = "verma",
                     depth: int | None = None) -> list[GradedVector]:
    """Basis of the kernel of D(E) on the level-``level`` weight space,
    echelonized with pivots at the lowest basis index."""
    weights = [Weight.coerce(w) for w in weights]
    spec = _tensor(weights, level if depth is None else depth, kind)
    dom = spec.level_basis(level)
    if level == 0:
        return [GradedVector.basis_vector(spec, dom[0])]
    cod = {b: i for i, b in enumerate(spec.level_basis(level - 1))}
    rows: list[dict] = [dict() for _ in cod]
    for j, b in enumerate(dom):
        img = coproduct_act("E", GradedVector.basis_vector(spec, b))
        for k, c in img.entries.items():
            rows[cod[k]][j] = c
    kernel = linalg.nullspace(rows, len(dom))
    return [GradedVector(spec, {dom[j]: c for j, c in vec.items()}) for vec in kernel]


def singular_vector(mu, lam, s: int, kind: str = "verma", depth: int | None = None) -> GradedVector:
    """Normalized singular vector of weight mu + lam - 2s in M_mu (x) M_lam."""
    basis = singular_vectors([mu, lam], s, kind, depth)
    if len(basis) != 1:
        raise ValueError(f"expected a one-dimensional singular space, got {len(basis)}")
    v = basis[0]
    lead = v.entries.get((s, 0))
    if lead is None or lead.is_zero():
        raise ZeroDivisionError("singular vector has no F^s v (x) v component")
    return v * (1 / (lead * qfact(s)))


# ------------------------------------------------------ explicit intertwiner

@dataclass
class IntertwinerTable:
    mu: Weight
    lam: Weight
    nu: Weight
    table: dict = field(default_factory=dict)   # (m, l) -> coefficient, n implied
    normalization: str = "(mu lam nu; s 0 0) = 1"

    @property
    def s(self) -> int:
        return int((self.mu + self.lam - self.nu) / 2)

    def target_index(self, m: int, l: int) -> int:
        return m + l - self.s

    def coeff(self, m: int, l: int) -> RatFunc:
        return self.table.get((m, l), ZERO)

    def weight_conserved(self) -> bool:
        for (m, l) in self.table:
            n = self.target_index(m, l)
            if (self.lam - 2 * l) + (self.mu - 2 * m) != self.nu - 2 * n or n < 0:
                return False
        return True


def _s_of(mu, lam, nu) -> int:
    d = (Weight.coerce(mu) + Weight.coerce(lam) - Weight.coerce(nu)) / 2
    if not d.is_integer() or int(d) < 0:
        raise ValueError(f"(mu + lam - nu)/2 = {d} is not a nonnegative integer")
    return int(d)


def _ftilde(weight: Weight, vec: dict) -> dict:
    """F q^H on {m: coeff} in a contragredient module: v_m -> [weight - m] v_{m+1}."""
    out = {}
    for m, c in vec.items():
        val = c * qnum(weight - m)
        if not val.is_zero():
            out[m + 1] = val
    return out


def _base_map(mu: Weight, s: int, vec: dict) -> dict:
    """zeta^{lam-2s} (Jackson derivative)^s / [s]!  :  v_m -> [m choose s] v_{m-s}."""
    out = {}
    for m, c in vec.items():
        if m >= s:
            out[m - s] = c * qbinom_bracket(m, s)
    return out


def _closed_form_image(mu, lam, nu, s, l, m, twisted_alt=False) -> dict:
    # Sum_k (-1)^k e_k [l choose k] F~^{l-k} X_0 F~^k applied to v_m
    total: dict = {}
    for k in range(l + 1):
        vec = {m: ONE}
        for _ in range(k):
            vec = _ftilde(mu, vec)
        vec = _base_map(mu, s, vec)
        for _ in range(l - k):
            vec = _ftilde(nu, vec)
        if twisted_alt:
            e = qpow(k * (lam - l - 1))
        else:
            e = qpow(k * (lam - l + 1))
        c = e * qbinom_bracket(l, k) * (-1) ** k
        for n, x in vec.items():
            total[n] = total.get(n, ZERO) + c * x
    pref = ONE
    for r in range(l):
        pref = pref * qnum(lam - r)
    pref = pref.inverse()
    if twisted_alt:
        pref = pref * qpow(2 * l)
    return {n: x * pref for n, x in total.items() if not x.is_zero()}


def phi_explicit(mu, lam, nu, l_max: int, m_max: int, variant: str = "intertwiner") -> IntertwinerTable:
    """Coefficient table of the intertwiner M^c_mu (x) M^c_lam -> M^c_nu.

    Closed form: Phi(. (x) v_l) = 1/([lam][lam-1]...[lam-l+1]) *
    Sum_k (-1)^k q^{k(lam-l+1)} [l choose k] F~^{l-k} X_0 F~^k with F~ = F q^H
    and X_0 = zeta^{lam-2s} (Jackson derivative)^s / [s]!.

    ``variant="twisted"`` multiplies each coefficient by q^{2n}; that map
    satisfies E~ Phi = q^2 Phi (q^-H (x) E~ + E~ (x) 1) rather than the plain
    intertwining property.  ``variant="alternate"`` evaluates the closed form
    with the prefactor q^{2l} and the power q^{k(lam-l-1)}.
    """
    mu, lam, nu = Weight.coerce(mu), Weight.coerce(lam), Weight.coerce(nu)
    s = _s_of(mu, lam, nu)
    if lam.is_integer() and l_max > int(lam):
        raise ValueError("l > lam needs phi_extend")
    tab = IntertwinerTable(mu, lam, nu)
    for l in range(l_max + 1):
        for m in range(m_max + 1):
            img = _closed_form_image(mu, lam, nu, s, l, m, variant == "alternate")
            n = m + l - s
            extra = set(img) - {n}
            assert not extra, "weight conservation violated"
            c = img.get(n, ZERO)
            if variant == "twisted":
                c = c * qpow(2 * n)
            if not c.is_zero():
                tab.table[(m, l)] = c
    return tab


def recursion_residuals(tab: IntertwinerTable, twisted: bool = False) -> dict:
    """Residuals of the E-recursion
    (m l n)[n] = q^{2m-mu}[l](m l-1 n-1) + [m](m-1 l n-1)
    (with extra factors q^2 on both right-hand terms when ``twisted``)."""
    out = {}
    extra = qpow(2) if twisted else ONE
    for (m, l) in {k for k in tab.table} | {(m + 1, l) for (m, l) in tab.table}:
        if (m, l) not in tab.table and (m - 1, l) not in tab.table and (m, l - 1) not in tab.table:
            continue
        n = tab.target_index(m, l)
        if n < 1:
            continue
        ms = [k[0] for k in tab.table]
        if m > max(ms):
            continue
        lhs = tab.coeff(m, l) * qint(n)
        rhs = extra * (qpow(2 * m - tab.mu) * qint(l) * tab.coeff(m, l - 1) if l >= 1 else ZERO)
        rhs = rhs + extra * qint(m) * tab.coeff(m - 1, l) if m >= 1 else rhs
        out[(m, l)] = lhs - rhs
    return out


def phi_extend(mu, lam: int, nu, l_max: int, m_max: int) -> IntertwinerTable:
    """Extend the intertwiner from V_lam to M^c_lam (integer lam >= 0).

    The l = lam+1 column is solved from the E-recursion in increasing m; the
    value at n = 0 (present only when s > lam) is the free parameter of the
    extension and is set to 0.  Columns l > lam+1 follow from the F-relation
    [lam - l] Phi(. (x) v_{l+1}) = F~ Phi(. (x) v_l) - q^{lam-2l} Phi(F~ . (x) v_l).
    """
    mu, nu = Weight.coerce(mu), Weight.coerce(nu)
    lam_w = Weight(lam)
    s = _s_of(mu, lam_w, nu)
    m_work = m_max + max(l_max - lam, 0) + 1
    base = phi_explicit(mu, lam_w, nu, lam, m_work)
    tab = IntertwinerTable(mu, lam_w, nu, dict(base.table),
                           normalization=base.normalization + "; free n=0 term of column lam+1 set to 0")
    if l_max <= lam:
        tab.table = {k: v for k, v in tab.table.items() if k[0] <= m_max and k[1] <= l_max}
        return tab
    l = lam + 1
    for m in range(m_work + 1):
        n = m + l - s
        if n < 0:
            continue
        if n == 0:
            continue
        rhs = qpow(2 * m - mu) * qint(l) * tab.coeff(m, l - 1)
        if m >= 1:
            rhs = rhs + qint(m) * tab.coeff(m - 1, l)
        c = rhs / qint(n)
        if not c.is_zero():
            tab.table[(m, l)] = c
    for l in range(lam + 1, l_max):
        den = qint(lam - l)
        for m in range(m_work - (l - lam) + 1):
            n = m + l + 1 - s
            if n < 0:
                continue
            # F~ Phi(v_m (x) v_l): Phi(...) = c v_{n-1}, F~ v_{n-1} = [nu - n + 1] v_n
            term = tab.coeff(m, l) * qnum(nu - (n - 1)) if n >= 1 else ZERO
            if m >= 1:
                term = term - qpow(lam - 2 * l) * qnum(mu - (m - 1)) * tab.coeff(m - 1, l)
            c = term / den
            if not c.is_zero():
                tab.table[(m, l + 1)] = c
    tab.table = {k: v for k, v in tab.table.items() if k[0] <= m_max and k[1] <= l_max}
    return tab


def intertwining_residuals(tab: IntertwinerTable, twist: int = 0) -> dict:
    """Residuals of E~ Phi = q^twist Phi (E~ (x) 1 + K^-1 (x) E~) and
    F~ Phi = q^-twist Phi (F~ (x) K + 1 (x) F~) on every stored pair whose
    neighbours are stored too.  twist=0 is the plain intertwining property."""
    mu, lam, nu = tab.mu, tab.lam, tab.nu
    keys = set(tab.table)
    ms = max((k[0] for k in keys), default=0)
    ls = max((k[1] for k in keys), default=0)
    out = {}
    for m in range(ms + 1):
        for l in range(ls + 1):
            n = tab.target_index(m, l)
            if n < 0:
                continue
            # E~: v_n -> [n] v_{n-1}
            lhs = tab.coeff(m, l) * qint(n)
            rhs = ZERO
            if m >= 1:
                rhs = rhs + qint(m) * tab.coeff(m - 1, l)
            if l >= 1:
                rhs = rhs + qpow(2 * m - mu) * qint(l) * tab.coeff(m, l - 1)
            out[("E", m, l)] = lhs - qpow(twist) * rhs
            if m + 1 <= ms and l + 1 <= ls:
                # F~: v_k -> [w - k] v_{k+1}
                lhs = tab.coeff(m, l) * qnum(nu - n)
                rhs = qnum(mu - m) * qpow(lam - 2 * l) * tab.coeff(m + 1, l) \
                    + qnum(lam - l) * tab.coeff(m, l + 1)
                out[("F", m, l)] = lhs - qpow(-twist) * rhs
    return out


def phi_from_singular(mu, lam, nu, l_max: int, m_max: int) -> IntertwinerTable:
    """Rebuild the contragredient intertwiner by pairing with the dual map
    M_nu -> M_mu (x) M_lam, whose image of v_nu is the normalized singular
    vector:  (m l n) [n]! = <v_m (x) v_l, Phi_dual(F^n v_nu)>."""
    mu, lam, nu = Weight.coerce(mu), Weight.coerce(lam), Weight.coerce(nu)
    s = _s_of(mu, lam, nu)
    depth = m_max + l_max + 1
    sv = singular_vector(mu, lam, s, depth=depth)
    tab = IntertwinerTable(mu, lam, nu)
    cur = sv
    for n in range(0, m_max + l_max - s + 1):
        for (m, l), c in cur.entries.items():
            if m <= m_max and l <= l_max:
                tab.table[(m, l)] = c * qfact(m) * qfact(l) / qfact(n)
        cur = coproduct_act("F", cur)
    return tab


# --------------------------------------------------------- braiding matrices

def channels(lams: Sequence, mode: str) -> tuple[list, list]:
    """Intermediate weights rho (from lam1 (x) lam2) and xi (from lam1 (x) lam3),
    in decreasing order."""
    l0, l1, l2, l3 = [Weight.coerce(x) for x in lams]
    total = (l1 + l2 + l3 - l0) / 2
    if not total.is_integer() or int(total) < 0:
        raise ValueError("lam1 + lam2 + lam3 - lam0 must be a nonnegative even integer")
    L = int(total)
    rhos = [l1 + l2 - 2 * k for k in range(L + 1)]
    xis = [l1 + l3 - 2 * k for k in range(L + 1)]
    if mode == "V":
        a0, a1, a2, a3 = (int(x) for x in (l0, l1, l2, l3))
        rhos = [r for r in rhos if abs(a1 - a2) <= int(r) <= a1 + a2 and abs(int(r) - a3) <= a0 <= int(r) + a3]
        xis = [x for x in xis if abs(a1 - a3) <= int(x) <= a1 + a3 and abs(int(x) - a2) <= a0 <= int(x) + a2]
    return rhos, xis


def _embed(sv_outer: GradedVector, sv_inner: GradedVector, spec3: ModuleSpec,
           inner_first: bool = True) -> GradedVector:
    """Compose: outer singular vector in M_rho (x) M_c, replace F^j v_rho by
    D(F)^j applied to the inner singular vector in M_a (x) M_b."""
    powers = [sv_inner]
    out: dict = {}
    for (j, kc), c in sorted(sv_outer.entries.items()):
        while len(powers) <= j:
            powers.append(coproduct_act("F", powers[-1]))
        for (ka, kb), d in powers[j].entries.items():
            key = (ka, kb, kc)
            out[key] = out.get(key, ZERO) + c * d
    return GradedVector(spec3, out)


def composite(lams: Sequence, inner: Weight, order: tuple, mode: str, L: int) -> GradedVector:
    """(Phi_inner^{a b} (x) 1) Phi_{lam0}^{inner c} v_{lam0} in M_a (x) M_b (x) M_c,
    where (a, b, c) = lams[order]."""
    lams = [Weight.coerce(x) for x in lams]
    a, b, c = (lams[i] for i in order)
    kind = "findim" if mode == "V" else "verma"
    s_in = _s_of(a, b, inner)
    s_out = _s_of(inner, c, lams[0])
    depth = L
    if kind == "findim":
        inner_v = singular_vector(int(a), int(b), s_in, kind="findim")
        outer_v = singular_vector(int(inner), int(c), s_out, kind="findim")
        spec3 = ModuleSpec.tensor(ModuleSpec.findim(int(a)), ModuleSpec.findim(int(b)),
                                  ModuleSpec.findim(int(c)))
    else:
        inner_v = singular_vector(a, b, s_in, depth=depth)
        outer_v = singular_vector(inner, c, s_out, depth=depth)
        spec3 = ModuleSpec.tensor(ModuleSpec.verma(a, depth), ModuleSpec.verma(b, depth),
                                  ModuleSpec.verma(c, depth))
    return _embed(outer_v, inner_v, spec3)


@dataclass
class BraidMatrix:
    lams: tuple
    rhos: list
    xis: list
    entries: list            # entries[i][j] = B_{rho_i, xi_j}
    mode: str

    def det(self) -> RatFunc:
        return linalg.det(self.entries)

    def specialize(self, values: dict) -> "BraidMatrix":
        ent = [[specialize_weights(x, values) for x in row] for row in self.entries]
        sub = lambda w: Weight.coerce(w).substitute(values)
        return BraidMatrix(tuple(sub(x) for x in self.lams), [sub(r) for r in self.rhos],
                           [sub(x) for x in self.xis], ent, self.mode)

    def entry(self, rho, xi) -> RatFunc:
        return self.entries[self.rhos.index(Weight.coerce(rho))][self.xis.index(Weight.coerce(xi))]


def _vector_rows(vectors: Sequence[GradedVector]) -> tuple[list[dict], list]:
    keys = sorted({k for v in vectors for k in v.entries})
    index = {k: i for i, k in enumerate(keys)}
    rows = [dict() for _ in keys]
    for j, v in enumerate(vectors):
        for k, c in v.entries.items():
            rows[index[k]][j] = c
    return rows, keys


def _expand(target: GradedVector, basis: Sequence[GradedVector]) -> list[RatFunc]:
    rows, keys = _vector_rows(list(basis))
    index = {k: i for i, k in enumerate(keys)}
    rhs = [ZERO] * len(keys)
    for k, c in target.entries.items():
        if k not in index:
            raise ValueError("vector lies outside the span of the channel basis")
        rhs[index[k]] = c
    sol = linalg.solve(rows, rhs, len(basis))
    coeffs = [sol.get(j, ZERO) for j in range(len(basis))]
    check = GradedVector(target.module)
    for c, v in zip(coeffs, basis):
        check = check + v * c
    if not check == target:
        raise ValueError("vector lies outside the span of the channel basis")
    return coeffs


def braiding_matrix(lams: Sequence, mode: str = "M", raising_depth: int = 0) -> BraidMatrix:
    """Solve (1 (x) PR) Phi_rho Phi_lam0 = Sum_xi B_{rho xi} Phi_xi Phi_lam0.

    mode "M": Verma modules (formal or integer weights); mode "V":
    finite-dimensional modules with the triangle-inequality channel sets.
    ``raising_depth`` > 0 additionally checks the identity on
    D(F)^j v_lam0 for j <= raising_depth (the map identity on the truncated
    weight spaces); a failure raises AssertionError.
    """
    lams = tuple(Weight.coerce(x) for x in lams)
    rhos, xis = channels(lams, mode)
    L = int((lams[1] + lams[2] + lams[3] - lams[0]) / 2)
    depth = L + raising_depth
    lhs_vecs = []
    for rho in rhos:
        v = composite(lams, rho, (1, 2, 3), mode, depth)
        lhs_vecs.append(rcheck_act(v, 1, 2))
    rhs_vecs = [composite(lams, xi, (1, 3, 2), mode, depth) for xi in xis]
    entries = [_expand(v, rhs_vecs) for v in lhs_vecs]
    bm = BraidMatrix(lams, rhos, xis, entries, mode)
    if raising_depth:
        bad = braiding_failures(bm, raising_depth, first=1)
        assert not bad, f"braiding identity fails: {bad[0]}"
    return bm


def braiding_failures(bm: BraidMatrix, raising_depth: int = 1, first: int = 0) -> list[str]:
    """Check (1 (x) PR) Phi_rho = Sum_xi B_{rho xi} Phi_xi on Delta(F)^j v_lam0
    for first <= j <= raising_depth, for a matrix that may come from storage."""
    lams = bm.lams
    L = int((lams[1] + lams[2] + lams[3] - lams[0]) / 2)
    depth = L + raising_depth
    bad = []
    outer = [composite(lams, rho, (1, 2, 3), bm.mode, depth) for rho in bm.rhos]
    inner = [composite(lams, xi, (1, 3, 2), bm.mode, depth) for xi in bm.xis]
    for j in range(raising_depth + 1):
        if j >= first:
            for i, rho in enumerate(bm.rhos):
                lhs = rcheck_act(outer[i], 1, 2)
                rhs = GradedVector(lhs.module)
                for k, w in enumerate(inner):
                    rhs = rhs + w * bm.entries[i][k]
                if lhs != rhs:
                    bad.append(f"F^{j} at rho={rho}")
        outer = [coproduct_act("F", v) for v in outer]
        inner = [coproduct_act("F", w) for w in inner]
    return bad


@lru_cache(maxsize=None)
def formal_braiding_matrix(L: int) -> BraidMatrix:
    """B^M with formal lam1, lam2, lam3 and lam0 = lam1 + lam2 + lam3 - 2L."""
    l1, l2, l3 = (Weight.formal(n) for n in ("l1", "l2", "l3"))
    return braiding_matrix((l1 + l2 + l3 - 2 * L, l1, l2, l3), "M")


def compare_BM_BV(lams: Sequence[int], bv: BraidMatrix | None = None) -> dict:
    """Specialize the formal B^M at integer weights and compare with B^V on
    the channels allowed by the triangle inequalities (B^V may be supplied)."""
    lams = tuple(int(x) for x in lams)
    L = (lams[1] + lams[2] + lams[3] - lams[0]) // 2
    bv = braiding_matrix(lams, "V") if bv is None else bv
    bm = formal_braiding_matrix(L)
    values = {"l1": lams[1], "l2": lams[2], "l3": lams[3]}
    rhos_m = [int(r.substitute(values)) for r in bm.rhos]
    xis_m = [int(x.substitute(values)) for x in bm.xis]
    mismatches = []
    flagged = []
    compared = 0
    for i, r in enumerate(rhos_m):
        for j, x in enumerate(xis_m):
            if Weight(r) not in bv.rhos or Weight(x) not in bv.xis:
                flagged.append((r, x))
                continue
            got = specialize_weights(bm.entries[i][j], values)
            want = bv.entry(r, x)
            compared += 1
            if got != want:
                mismatches.append((r, x, str(got), str(want)))
    return {"lams": lams, "compared": compared, "mismatches": mismatches,
            "not_compared": flagged, "BV": bv, "BM": bm}


def dual_braiding_matrix(lams: Sequence[int]) -> list[list[RatFunc]]:
    """Solve phi^{lam0}_{rho lam3} phi^rho_{lam1 lam2} (1 (x) PR)
    = Sum_xi D_{rho xi} phi^{lam0}_{xi lam2} phi^xi_{lam1 lam3}
    using the explicit contragredient intertwiners restricted to V's.
    Returns D indexed like B (rows rho, columns xi)."""
    lams = tuple(int(x) for x in lams)
    rhos, xis = channels(lams, "V")
    l0, l1, l2, l3 = lams
    spec132 = ModuleSpec.tensor(*(ModuleSpec.contragredient(w, w) for w in (l1, l3, l2)))

    def dual_composite(inner, a, b, c):
        t_in = phi_explicit(a, b, inner, b, a)
        t_out = phi_explicit(inner, c, l0, c, int(inner))
        # functional on M_a (x) M_b (x) M_c: coefficient of v_0 of lam0
        func = {}
        for (m1, m2), c1 in t_in.table.items():
            n = t_in.target_index(m1, m2)
            for m3 in range(c + 1):
                c2 = t_out.coeff(n, m3)
                if t_out.target_index(n, m3) == 0 and not c2.is_zero():
                    func[(m1, m2, m3)] = func.get((m1, m2, m3), ZERO) + c1 * c2
        return func

    def as_functional_on_132(func123):
        # precompose with (1 (x) PR): V1 (x) V3 (x) V2 -> V1 (x) V2 (x) V3
        out = {}
        for idx in spec132.basis():
            img = rcheck_act(GradedVector.basis_vector(spec132, idx), 1, 2)
            val = ZERO
            for k, c in img.entries.items():
                if k in func123:
                    val = val + c * func123[k]
            if not val.is_zero():
                out[idx] = val
        return out

    lhs = [as_functional_on_132(dual_composite(r, l1, l2, l3)) for r in rhos]
    rhs = [dual_composite(x, l1, l3, l2) for x in xis]
    rows_keys = sorted({k for f in rhs + lhs for k in f})
    index = {k: i for i, k in enumerate(rows_keys)}
    out = []
    for f in lhs:
        rows = [dict() for _ in rows_keys]
        for j, g in enumerate(rhs):
            for k, c in g.items():
                rows[index[k]][j] = c
        b = [f.get(k, ZERO) for k in rows_keys]
        sol = linalg.solve(rows, b, len(rhs))
        out.append([sol.get(j, ZERO) for j in range(len(rhs))])
    return out
