"""Formal chain model for tensor products of Verma modules.

A chain is a linear combination of symbols G^l_{r_1..r_n} attached to points
with weights lam_1..lam_n; ``order`` records which original point sits at each
position after braiding.  The identification ``phi_map`` sends
F^{r_1} v (x) ... (x) F^{r_n} v to G^l_{r_1..r_n}.  Every chain operation
has a rewriting rule and is checked against the conjugate of the matching
algebra operation through ``phi_map``.

Relative chains (``relative=True``) model the finite-dimensional quotients:
their symbols are annihilated once some r_i exceeds lam_i.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .coeffs import ONE, ZERO, RatFunc, Weight, qbinom_round, qint, qnum, qpow, qpow_product
from .uq import GradedVector, ModuleSpec, coproduct_act, rcheck_act


class Chain:
    __slots__ = ("weights", "order", "terms", "relative")

    def __init__(self, weights: Sequence, terms: dict | None = None,
                 order: Sequence[int] | None = None, relative: bool = False):
        self.weights = tuple(Weight.coerce(w) for w in weights)
        self.order = tuple(order) if order is not None else tuple(range(1, len(self.weights) + 1))
        if len(self.order) != len(self.weights):
            raise ValueError("order tag and weights differ in length")
        self.relative = relative
        self.terms = {}
        for occ, c in (terms or {}).items():
            occ = tuple(int(r) for r in occ)
            if len(occ) != len(self.weights) or min(occ, default=0) < 0:
                raise ValueError(f"bad occupation {occ}")
            c = RatFunc.coerce(c)
            if relative and any(r > int(w) for r, w in zip(occ, self.weights)):
                continue
            if not c.is_zero():
                self.terms[occ] = self.terms.get(occ, ZERO) + c
                if self.terms[occ].is_zero():
                    del self.terms[occ]

    @classmethod
    def symbol(cls, weights: Sequence, occ: Sequence[int], coeff=1, **kw) -> "Chain":
        return cls(weights, {tuple(occ): coeff}, **kw)

    @property
    def n(self) -> int:
        return len(self.weights)

    def _like(self, terms: dict) -> "Chain":
        return Chain(self.weights, terms, self.order, self.relative)

    def _check(self, other: "Chain"):
        if (self.weights, self.order, self.relative) != (other.weights, other.order, other.relative):
            raise ValueError("chains live on different configurations")

    def __add__(self, other: "Chain") -> "Chain":
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return self._like(out)

    def __sub__(self, other: "Chain") -> "Chain":
        return self + other * (-1)

    def __mul__(self, c) -> "Chain":
        c = RatFunc.coerce(c)
        return self._like({k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        if (self.weights, self.order, self.relative) != (other.weights, other.order, other.relative):
            return False
        keys = set(self.terms) | set(other.terms)
        return all(self.terms.get(k, ZERO) == other.terms.get(k, ZERO) for k in keys)

    def is_zero(self) -> bool:
        return not self.terms

    def levels(self) -> set:
        return {sum(k) for k in self.terms}

    def __repr__(self):
        name = "Gt" if self.relative else "G"
        body = " + ".join(f"({c})*{name}{list(k)}" for k, c in sorted(self.terms.items()))
        return f"Chain[{body or '0'}; order={self.order}]"


# ---------------------------------------------------------- identification

def phi_map(v: GradedVector, order: Sequence[int] | None = None) -> Chain:
    spec = v.module
    if spec.kind == "verma":
        return Chain([spec.weight], {(m,): c for m, c in v.entries.items()}, order)
    if spec.kind != "tensor" or any(f.kind != "verma" for f in spec.factors):
        raise ValueError("phi_map needs a tensor product of Verma modules")
    return Chain([f.weight for f in spec.factors], dict(v.entries), order)


def phi_inverse(c: Chain, depth: int | None = None) -> GradedVector:
    if c.relative:
        raise ValueError("phi_inverse acts on absolute chains; use phi_tilde_inverse")
    top = max((max(k) for k in c.terms), default=0)
    depth = top if depth is None else depth
    if depth < top:
        raise ValueError("depth below the occupations present in the chain")
    spec = ModuleSpec.tensor(*(ModuleSpec.verma(w, depth) for w in c.weights))
    return GradedVector(spec, dict(c.terms))


# --------------------------------------------------------------- coproduct

def _block(c: Chain, block) -> list[int]:
    if block is None:
        return list(range(c.n))
    i, j = block
    if not 0 <= i <= j < c.n:
        raise ValueError(f"block {block} outside 0..{c.n - 1}")
    return list(range(i, j + 1))


def coproduct_F_chain(c: Chain, block: tuple[int, int] | None = None) -> Chain:
    """Raise one occupation inside the block; each point to the left of the
    raised one (inside the block) contributes q^{-(lam_j - 2 r_j)}."""
    pos = _block(c, block)
    out: dict = {}
    for occ, coeff in c.terms.items():
        factor = coeff
        for i in pos:
            new = occ[:i] + (occ[i] + 1,) + occ[i + 1:]
            if c.relative:
                # relative symbols carry the normalization of phi_tilde
                step = 1 - qpow(2 * (c.weights[i] - occ[i]))
                out[new] = out.get(new, ZERO) + factor * step
            else:
                out[new] = out.get(new, ZERO) + factor
            factor = factor * qpow(2 * occ[i] - c.weights[i])
    return Chain(c.weights, out, c.order, c.relative)


# ---------------------------------------------------------------- boundary

def boundary_alpha(lam, r: int, twist: int = 1) -> RatFunc:
    """One-point coefficient of E' = (q - q^-1) q^{twist H} E on F^r v_lam."""
    if r == 0:
        return ZERO
    lam = Weight.coerce(lam)
    return (qpow(1) - qpow(-1)) * qpow(twist * (lam - 2 * r + 2)) * qint(r) * qnum(lam - r + 1)


def boundary(c: Chain, twist: int = 1) -> Chain:
    """phi D(E') phi^-1 by rewriting, E' = (q - q^-1) q^{twist H} E.

    D(q^{tH} E) = q^{tH} E (x) K^{t+1} + K^t (x) q^{tH} E, so lowering point i
    picks up q^{t h_j} from the left and q^{(t+1) h_j} from the right.
    """
    if c.relative:
        raise ValueError("boundary is defined on absolute chains")
    out: dict = {}
    for occ, coeff in c.terms.items():
        h = [w - 2 * r for w, r in zip(c.weights, occ)]
        for i in range(c.n):
            a = boundary_alpha(c.weights[i], occ[i], twist)
            if a.is_zero():
                continue
            left = sum((h[j] for j in range(i)), Weight(0))
            right = sum((h[j] for j in range(i + 1, c.n)), Weight(0))
            new = occ[:i] + (occ[i] - 1,) + occ[i + 1:]
            term = coeff * a * qpow(twist * left) * qpow((twist + 1) * right)
            out[new] = out.get(new, ZERO) + term
    return Chain(c.weights, out, c.order)


def one_point_boundary_sum(lam, level: int, sign: int) -> RatFunc:
    """Sum_{k<l} q^{2(l-k-1)} (1 - q^{2 sign lam + 4k}) as a closed expression."""
    lam = Weight.coerce(lam)
    total = ZERO
    for k in range(level):
        total = total + qpow(2 * (level - k - 1)) * (ONE - qpow(2 * sign * lam + 4 * k))
    return total


def resolve_boundary_sign(max_level: int = 5, lam="l") -> dict:
    """Match the two candidate one-point sums against the boundary coefficient
    for both twists of E'; returns {(twist, sign): bool}."""
    lam = Weight.formal(lam) if isinstance(lam, str) else Weight.coerce(lam)
    out = {}
    for twist in (1, -1):
        for sign in (1, -1):
            out[(twist, sign)] = all(
                one_point_boundary_sum(lam, l, sign) == boundary_alpha(lam, l, twist)
                for l in range(1, max_level + 1))
    return out


def algebra_E_prime(v: GradedVector, twist: int = 1) -> GradedVector:
    """Delta^(n)(E') on a tensor vector, computed in the algebra."""
    w = coproduct_act("E", v)
    out = {}
    for idx, c in w.entries.items():
        h = v.module.weight_of(idx)
        out[idx] = c * qpow(twist * h) * (qpow(1) - qpow(-1))
    return GradedVector(v.module, out)


# --------------------------------------------------------------- monodromy

def c_coefficient(n: int, lam, k: int) -> RatFunc:
    """C^n_lam(k) = (-1)^k q^{-2k lam + k(k-1)} binom(n, k)_{q^2}."""
    lam = Weight.coerce(lam)
    sign = -1 if k % 2 else 1
    return qpow(-2 * k * lam + k * (k - 1)) * qbinom_round(n, k, "q2") * sign


def monodromy(c: Chain, i: int = 0) -> Chain:
    """Half-turn exchange of the points at positions i, i+1 by rewriting."""
    if not 0 <= i < c.n - 1:
        raise ValueError("adjacent pair out of range")
    if c.relative:
        # lift each relative symbol, rewrite, and shrink back
        total = None
        for occ, coeff in c.terms.items():
            norm = ONE
            for lam, r in zip(c.weights, occ):
                norm = norm * shrink_factor(int(lam), r)
            piece = shrink_to_relative(monodromy(Chain(c.weights, {occ: coeff / norm}, c.order), i))
            total = piece if total is None else total + piece
        if total is None:
            w = list(c.weights)
            w[i], w[i + 1] = w[i + 1], w[i]
            order = list(c.order)
            order[i], order[i + 1] = order[i + 1], order[i]
            total = Chain(w, {}, order, relative=True)
        return total
    w = list(c.weights)
    w[i], w[i + 1] = w[i + 1], w[i]
    order = list(c.order)
    order[i], order[i + 1] = order[i + 1], order[i]
    l1, l2 = c.weights[i], c.weights[i + 1]
    total = Chain(w, {}, order)
    for occ, coeff in c.terms.items():
        n1, n2 = occ[i], occ[i + 1]
        pref = coeff * qpow_product(l1, l2 - 2 * n2, Fraction(1, 2))
        for k in range(n1 + 1):
            start = occ[:i] + (n2 + k, 0) + occ[i + 2:]
            piece = Chain(w, {start: pref * c_coefficient(n1, l1, k)}, order)
            for _ in range(n1 - k):
                piece = coproduct_F_chain(piece, (i, i + 1))
            total = total + piece
    return total


def monodromy_via_phi(c: Chain, i: int = 0) -> Chain:
    """phi R-check phi^-1 (or its relative analogue) on positions (i, i+1)."""
    order = list(c.order)
    order[i], order[i + 1] = order[i + 1], order[i]
    if c.relative:
        return phi_tilde(rcheck_act(phi_tilde_inverse(c), i, i + 1), order)
    depth = max((sum(k) for k in c.terms), default=0)
    v = phi_inverse(c, depth)
    return phi_map(rcheck_act(v, i, i + 1), order)


# --------------------------------------------------------------- shrinking

def shrink_factor(lam: int, r: int) -> RatFunc:
    """Prod_{k<r} (1 - q^{2(lam - k)}); zero once r > lam."""
    out = ONE
    for k in range(r):
        out = out * (ONE - qpow(2 * (lam - k)))
    return out


def _int_weights(weights) -> list[int]:
    out = []
    for w in weights:
        w = Weight.coerce(w)
        if not w.is_integer() or int(w) < 0:
            raise ValueError("shrinking needs nonnegative integer weights")
        out.append(int(w))
    return out


def shrink_to_relative(c: Chain) -> Chain:
    lams = _int_weights(c.weights)
    out = {}
    for occ, coeff in c.terms.items():
        f = coeff
        for lam, r in zip(lams, occ):
            f = f * shrink_factor(lam, r)
        if not f.is_zero():
            out[occ] = f
    return Chain(lams, out, c.order, relative=True)


def project(v: GradedVector) -> GradedVector:
    """p: tensor of Verma modules onto the tensor of their simple quotients."""
    lams = _int_weights([f.weight for f in v.module.factors])
    spec = ModuleSpec.tensor(*(ModuleSpec.findim(l) for l in lams))
    return GradedVector(spec, {k: c for k, c in v.entries.items()
                               if all(r <= l for r, l in zip(k, lams))})


def phi_tilde(v: GradedVector, order=None) -> Chain:
    """Finite-dimensional tensor vectors to relative chains; F^r v goes to
    the shrink factor times the relative symbol."""
    lams = [int(f.weight) for f in v.module.factors]
    out = {}
    for occ, c in v.entries.items():
        f = c
        for lam, r in zip(lams, occ):
            f = f * shrink_factor(lam, r)
        out[occ] = f
    return Chain(lams, out, order, relative=True)


def phi_tilde_inverse(c: Chain) -> GradedVector:
    lams = _int_weights(c.weights)
    spec = ModuleSpec.tensor(*(ModuleSpec.findim(l) for l in lams))
    out = {}
    for occ, coeff in c.terms.items():
        norm = ONE
        for lam, r in zip(lams, occ):
            norm = norm * shrink_factor(lam, r)
        out[occ] = coeff / norm
    return GradedVector(spec, out)


# ------------------------------------------------ geometric intertwiners

def transported_braiding(lams: Sequence, mode: str = "M") -> dict:
    """Check the braiding relation at chain level: the monodromy of the
    chain image of Phi_rho Phi_lam0 v equals Sum_xi B_{rho xi} times the chain
    image of Phi_xi Phi_lam0 v (points 2 and 3 exchanged).  Mode "V" uses
    relative chains and finite-dimensional modules."""
    from .braid import braiding_matrix, composite

    bm = braiding_matrix(lams, mode)
    image = phi_tilde if mode == "V" else phi_map
    lw = tuple(Weight.coerce(x) for x in lams)
    L = int((lw[1] + lw[2] + lw[3] - lw[0]) / 2)
    failures = []
    for i, rho in enumerate(bm.rhos):
        lhs = monodromy(image(composite(lw, rho, (1, 2, 3), mode, L)), 1)
        rhs = Chain(lhs.weights, {}, lhs.order, lhs.relative)
        for j, xi in enumerate(bm.xis):
            rhs = rhs + image(composite(lw, xi, (1, 3, 2), mode, L), lhs.order) * bm.entries[i][j]
        if not lhs == rhs:
            failures.append(str(rho))
    return {"matrix": bm, "failures": failures, "ok": not failures}
