"""Truncated Heisenberg Fock spaces with the Feigin-Fuks Virasoro action,
lattice vertex operators, the screening charge Q- and free-field correlators.

Heisenberg: [a_n, a_m] = 2 kappa m delta_{n+m,0}.  Basis vectors of F_lambda are
partitions (n_1 >= ... >= n_k) standing for a_{-n_1} ... a_{-n_k} 1_lambda.
Momenta live on the lattice Z + 2 kappa Z and are stored as pairs
(integer part, multiple of 2 kappa); the integer part may be a formal symbol.
kappa is the formal variable ``k`` throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from .coeffs import ONE, ZERO, RatFunc, kappa, partition_count, partitions, var
from .linalg import nullspace
from .uq import GradedVector, TruncationError

DEFAULT_DEPTH = 6


def _scalar(x) -> RatFunc:
    return var(x) if isinstance(x, str) else RatFunc.coerce(x)


def _momentum_value(p, m: int) -> RatFunc:
    base = var(p) if isinstance(p, str) else RatFunc.coerce(p)
    return base + 2 * m * kappa()


@dataclass(frozen=True)
class FockSpec:
    p: int | str = 0
    m: int = 0
    depth: int = DEFAULT_DEPTH

    @property
    def kind(self) -> str:
        return "fock"

    @property
    def momentum(self) -> RatFunc:
        return _momentum_value(self.p, self.m)

    def basis(self, level: int | None = None) -> list[tuple]:
        if level is not None:
            return partitions(level) if 0 <= level <= self.depth else []
        return [b for n in range(self.depth + 1) for b in partitions(n)]

    def shifted(self, charge: "Charge", depth: int | None = None) -> "FockSpec":
        if isinstance(self.p, str) and charge.p != 0:
            raise ValueError("cannot shift a formal momentum by an integer charge")
        p = self.p if isinstance(self.p, str) else self.p + charge.p
        return FockSpec(p, self.m + charge.m, self.depth if depth is None else depth)


@dataclass(frozen=True)
class Charge:
    """Lattice charge p + 2 kappa m (integer p)."""
    p: int = 0
    m: int = 0

    @classmethod
    def coerce(cls, x) -> "Charge":
        if isinstance(x, Charge):
            return x
        if isinstance(x, tuple):
            return cls(int(x[0]), int(x[1]))
        return cls(int(x), 0)

    @property
    def value(self) -> RatFunc:
        return _momentum_value(self.p, self.m)


def level_of(b: tuple) -> int:
    return sum(b)


def vacuum(spec: FockSpec, coeff=1) -> GradedVector:
    return GradedVector(spec, {(): coeff})


# --------------------------------------------------------------- Heisenberg

def _add_part(b: tuple, n: int) -> tuple:
    return tuple(sorted(b + (n,), reverse=True))


def _remove_part(b: tuple, n: int) -> tuple:
    i = b.index(n)
    return b[:i] + b[i + 1:]


def _mode_basis(spec: FockSpec, n: int, b: tuple) -> list[tuple[RatFunc, tuple]]:
    if n == 0:
        return [(spec.momentum, b)]
    if n < 0:
        new = _add_part(b, -n)
        if level_of(new) > spec.depth:
            raise TruncationError(level_of(new), spec.depth, f"a_{n}")
        return [(ONE, new)]
    mult = b.count(n)
    if not mult:
        return []
    return [(2 * n * mult * kappa(), _remove_part(b, n))]


def heisenberg_act(n: int, v: GradedVector) -> GradedVector:
    out: dict = {}
    for b, c in v.entries.items():
        for coeff, b2 in _mode_basis(v.module, n, b):
            out[b2] = out.get(b2, ZERO) + c * coeff
    return GradedVector(v.module, out)


def _top_level(v: GradedVector) -> int:
    return max((level_of(b) for b in v.entries), default=0)


# ----------------------------------------------------------------- Virasoro

def central_charge() -> RatFunc:
    k = kappa()
    return 13 - 6 * (k + 1 / k)


def conformal_weight(lam) -> RatFunc:
    """Delta(lam) = -lam/2 + lam (lam + 2) / (4 kappa)."""
    lam = _scalar(lam)
    return -lam / 2 + lam * (lam + 2) / (4 * kappa())


def _quadratic(n: int, v: GradedVector) -> GradedVector:
    """Sum_k :a_{n-k} a_k: v with annihilators (and a_0) to the right."""
    total = GradedVector(v.module)
    top = _top_level(v)
    lo = -((-n) // 2)            # ceil(n / 2): the larger index j ranges from here
    for j in range(lo, max(top, 0) + 1):
        i = n - j
        w = heisenberg_act(i, heisenberg_act(j, v))
        total = total + (w if i == j else w * 2)
    return total


def virasoro_act(n: int, v: GradedVector) -> GradedVector:
    k = kappa()
    quad = _quadratic(n, v) * (1 / (4 * k))
    lin = heisenberg_act(n, v) * (-(k - 1) * (n + 1) / (2 * k))
    return quad + lin


def virasoro_mode(n: int) -> Callable[[GradedVector], GradedVector]:
    return lambda v: virasoro_act(n, v)


def virasoro_bracket_residual(m: int, n: int, v: GradedVector) -> GradedVector:
    """[L_m, L_n] v - (m - n) L_{m+n} v - c/12 (m^3 - m) delta_{m,-n} v."""
    lhs = virasoro_act(m, virasoro_act(n, v)) - virasoro_act(n, virasoro_act(m, v))
    rhs = virasoro_act(m + n, v) * (m - n)
    if m + n == 0:
        rhs = rhs + v * (central_charge() * Fraction(m ** 3 - m, 12))
    return lhs - rhs


# ----------------------------------------------------------- vertex modes

def _exp_modes(spec: FockSpec, v: GradedVector, coeff: RatFunc, sign: int,
               max_level: int) -> dict[int, GradedVector]:
    """exp(coeff Sum_{n>0} a_{sign n} x^n / n) v as {x-degree: vector}, x-degree <= max_level."""
    series = {0: v}
    for n in range(1, max_level + 1):
        nxt: dict = {}
        for d, w in series.items():
            term, power = w, 0
            while not term.is_zero() and d + n * power <= max_level:
                c = (coeff / n) ** power / factorial(power)
                deg = d + n * power
                nxt[deg] = nxt[deg] + term * c if deg in nxt else term * c
                power += 1
                if d + n * power > max_level:
                    break
                term = heisenberg_act(sign * n, term)
        series = nxt
    return {d: w for d, w in series.items() if not w.is_zero()}


def _binom(top: int, k: int) -> int:
    """Generalized binomial for integer (possibly negative) top."""
    out = Fraction(1)
    for i in range(k):
        out = out * (top - i) / (i + 1)
    return int(out)


def _field_annihilator(n: int, v: GradedVector) -> dict[int, GradedVector]:
    """Nonnegative-mode part of (1/(n-1)!) d^{n-1} a(z) on v: {z-degree: vector}."""
    out = {}
    for j in range(0, _top_level(v) + 1):
        w = heisenberg_act(j, v) * _binom(-j - 1, n - 1)
        if not w.is_zero():
            out[-j - n] = w
    return out


def _field_creator(n: int, v: GradedVector, depth: int) -> dict[int, GradedVector]:
    out = {}
    top = _top_level(v)
    for r in range(n, depth - top + 1):
        w = heisenberg_act(-r, v) * _binom(r - 1, n - 1)
        out[r - n] = w
    return out


def _apply_each(series: dict, op) -> dict:
    out: dict = {}
    for d, w in series.items():
        for d2, w2 in op(w).items():
            out[d + d2] = out[d + d2] + w2 if d + d2 in out else w2
    return {d: w for d, w in out.items() if not w.is_zero()}


def _retarget(w: GradedVector, spec: FockSpec) -> GradedVector:
    return GradedVector(spec, dict(w.entries))


@dataclass
class VertexModeTable:
    charge: Charge
    descendant: tuple
    source: FockSpec
    target: FockSpec
    offset: RatFunc
    coefficients: dict = field(default_factory=dict)   # (src, tgt, z-degree) -> RatFunc

    def apply(self, v: GradedVector) -> dict[int, GradedVector]:
        out: dict = {}
        for (src, tgt, d), c in self.coefficients.items():
            if src in v.entries:
                out.setdefault(d, {})
                out[d][tgt] = out[d].get(tgt, ZERO) + c * v.entries[src]
        return {d: GradedVector(self.target, e) for d, e in out.items()
                if not GradedVector(self.target, e).is_zero()}


def vertex_apply(charge, v: GradedVector, descendant: Sequence[int] = (),
                 target_depth: int | None = None) -> tuple[RatFunc, dict[int, GradedVector]]:
    """Y(a_{-n_1}..a_{-n_k} 1_charge, z) v as (offset, {z-degree: vector}).

    Creation parts of all fields stand left of the lattice shift, annihilation
    parts (including a_0) right of it; the overall power is z^{offset + degree}.
    """
    charge = Charge.coerce(charge)
    spec = v.module
    tgt = spec.shifted(charge, target_depth)
    offset = charge.value * spec.momentum / (2 * kappa())
    total: dict = {}
    for b, c in v.entries.items():
        for d, w in _vertex_basis(charge, spec, tgt, b, tuple(descendant)).items():
            total[d] = total[d] + w * c if d in total else w * c
    return offset, {d: w for d, w in total.items() if not w.is_zero()}


def _vertex_basis(charge: Charge, spec: FockSpec, tgt: FockSpec, b: tuple,
                  descendant: tuple) -> dict[int, GradedVector]:
    ratio = charge.value / (2 * kappa())
    v = GradedVector(spec, {b: ONE})
    total: dict = {}
    nfields = len(descendant)
    for mask in range(1 << nfields):
        creators = [descendant[i] for i in range(nfields) if mask >> i & 1]
        annihilators = [descendant[i] for i in range(nfields) if not mask >> i & 1]
        series = {-d: w for d, w in _exp_modes(spec, v, -ratio, 1, level_of(b)).items()}
        for n in annihilators:
            series = _apply_each(series, lambda w, n=n: _field_annihilator(n, w))
        # every component now has a single level, so the creation budget is exact
        series = {d: _retarget(w, tgt) for d, w in series.items()}
        series = _apply_each(series, lambda w: _exp_modes(tgt, w, ratio, -1, tgt.depth - _top_level(w)))
        for n in creators:
            series = _apply_each(series, lambda w, n=n: _field_creator(n, w, tgt.depth))
        for d, w in series.items():
            total[d] = total[d] + w if d in total else w
    return total


def vertex_mode_table(charge, source: FockSpec, descendant: Sequence[int] = (),
                      target_depth: int | None = None) -> VertexModeTable:
    charge = Charge.coerce(charge)
    tgt = source.shifted(charge, target_depth)
    table = VertexModeTable(charge, tuple(descendant), source, tgt, ZERO)
    for b in source.basis():
        offset, series = vertex_apply(charge, GradedVector(source, {b: ONE}), descendant, target_depth)
        table.offset = offset
        for d, w in series.items():
            for b2, c in w.entries.items():
                table.coefficients[(b, b2, d)] = c
    if not source.basis():
        table.offset = charge.value * source.momentum / (2 * kappa())
    return table


# --------------------------------------------------------- screening charge

SCREENING_MINUS = Charge(0, 1)      # X(2 kappa, z)


def screening_charge_minus(v: GradedVector) -> GradedVector:
    """Residue of X(2 kappa, z) v: the coefficient of z^{-1}."""
    spec = v.module
    if isinstance(spec.p, str) or spec.m != 0:
        raise ValueError("Q- is defined on F_lambda with integer lambda only")
    # offset = lambda is an integer, so z^{offset + d} has d = -1 - lambda;
    # for lambda < -1 the image sits higher than the source
    shift = -1 - int(spec.p)
    tgt = spec.shifted(SCREENING_MINUS, spec.depth + max(shift, 0))
    offset, series = vertex_apply(SCREENING_MINUS, v, target_depth=tgt.depth)
    return series.get(shift, GradedVector(tgt))


def qminus_matrix(lam: int, level: int, depth: int | None = None) -> tuple[list[dict], list, list]:
    """Rows of Q- from level ``level`` of F_lam to level ``level - lam - 1``."""
    depth = level if depth is None else depth
    spec = FockSpec(lam, 0, depth)
    src = spec.basis(level)
    tgt_level = level - lam - 1
    tgt = partitions(tgt_level) if tgt_level >= 0 else []
    index = {b: i for i, b in enumerate(tgt)}
    rows = [dict() for _ in tgt]
    for j, b in enumerate(src):
        w = screening_charge_minus(GradedVector(spec, {b: ONE}))
        for b2, c in w.entries.items():
            rows[index[b2]][j] = c
    return rows, src, tgt


def kernel_Qminus(lam: int, level: int, depth: int | None = None) -> tuple[int, list[GradedVector]]:
    rows, src, _ = qminus_matrix(lam, level, depth)
    spec = FockSpec(lam, 0, level if depth is None else depth)
    if not rows:
        basis = [GradedVector(spec, {b: ONE}) for b in src]
    else:
        basis = [GradedVector(spec, {src[i]: c for i, c in vec.items()})
                 for vec in nullspace(rows, len(src))]
    return len(basis), basis


def expected_kernel_dim(lam: int, level: int) -> int:
    if lam < 0:
        return 0
    return partition_count(level) - partition_count(level - lam - 1)


# -------------------------------------------------------------- correlators

@dataclass
class FreeCorrelator:
    """delta * Prod_{i>j} (z_i - z_j)^{exponents[(i, j)]}, with z_0 = 0."""
    nonzero: bool
    exponents: dict

    def value(self, points: Sequence[complex], kappa_value: float) -> complex:
        import cmath
        if not self.nonzero:
            return 0j
        zs = [0j] + list(points)
        out = 1 + 0j
        for (i, j), e in self.exponents.items():
            ev = e.evaluate({"k": kappa_value})
            out *= cmath.exp(ev * cmath.log(zs[i] - zs[j]))
        return out


def correlator_free(nu, charges: Sequence, mu0=0) -> FreeCorrelator:
    """<1_nu*, X(mu_n, z_n) ... X(mu_1, z_1) 1_mu0> for |z_n| > ... > |z_1| > 0.

    ``charges`` lists mu_1..mu_n; pairs (i, j) with j = 0 are the powers of
    z_i coming from the source momentum.
    """
    vals = [Charge.coerce(mu0).value] + [Charge.coerce(c).value for c in charges]
    total = sum(vals[1:], vals[0])
    ok = total == Charge.coerce(nu).value
    k = kappa()
    exps = {}
    for i in range(1, len(vals)):
        for j in range(0, i):
            e = vals[i] * vals[j] / (2 * k)
            if not e.is_zero():
                exps[(i, j)] = e
    return FreeCorrelator(ok, exps if ok else {})


def two_point_series(mu1, mu2, mu0=0, order: int = 4, depth: int | None = None) -> dict[int, RatFunc]:
    """Coefficients c_d of (z1/z2)^d in the leading matrix element of
    X(mu2, z2) X(mu1, z1) 1_mu0, with the powers of z1, z2 stripped."""
    mu0, mu1, mu2 = (Charge.coerce(x) for x in (mu0, mu1, mu2))
    depth = order if depth is None else depth
    src = FockSpec(mu0.p, mu0.m, depth)
    _, first = vertex_apply(mu1, vacuum(src))
    out = {}
    for d, w in first.items():
        if d > order:
            continue
        _, second = vertex_apply(mu2, w, target_depth=depth)
        w2 = second.get(-d)
        out[d] = w2.entries.get((), ZERO) if w2 is not None else ZERO
    return out


def braid_phase_exponent(lam, mu) -> RatFunc:
    """Exponent e with (z - w)^e for X(lam) X(mu); a half turn gives
    exp(i pi e) = q^{e kappa} for q = exp(i pi / kappa)."""
    return Charge.coerce(lam).value * Charge.coerce(mu).value / (2 * kappa())


def braid_phase_q_exponent(lam, mu) -> RatFunc:
    """The power of q in the half-turn phase: lam mu / 2."""
    return braid_phase_exponent(lam, mu) * kappa()


# --------------------------------------------------------- screened weights

def delta_nu(lam, mu, s: int) -> RatFunc:
    """Delta(lam + mu - 2s) - Delta(lam) - Delta(mu)."""
    lam, mu = _scalar(lam), _scalar(mu)
    return conformal_weight(lam + mu - 2 * s) - conformal_weight(lam) - conformal_weight(mu)


def delta_nu_alternate(lam, mu, s: int) -> RatFunc:
    """s + lam mu/2kappa + s(s-1)/kappa - (lam + mu)/2kappa (the alternate variant)."""
    lam, mu = _scalar(lam), _scalar(mu)
    k = kappa()
    return s + lam * mu / (2 * k) + Fraction(s * (s - 1)) / k - (lam + mu) / (2 * k)
