"""Semi-infinite (BRST) cohomology of F_{lam,kappa} (x) F_{lam,-kappa} with bc ghosts,
and the Lian-Zuckerman product on its ghost-number-zero part.

Ghost Fock space: {b_n, c_m} = delta_{n+m,0}; creators are c_m (m <= 1) and
b_n (n <= -2).  A ghost monomial is a sorted tuple of labels (0, n) for b_n
and (1, m) for c_m, read as the ordered product of creators applied to the
vacuum.  Weights: b_n carries -n, c_m carries -m; ghost number #c - #b.

The -kappa matter factor reuses the kappa formulas with kappa -> -kappa, which
is a ring automorphism of the coefficient field.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .coeffs import ONE, ZERO, RatFunc, kappa, partitions, qpow, var
from .fock import FockSpec, conformal_weight, kernel_Qminus, virasoro_act
from .linalg import nullspace, rank, rref
from .uq import GradedVector, ModuleSpec, TruncationError, coproduct_act

GHOST_NUMBERS = tuple(range(-1, 5))
EXPECTED_DIMS = {k: int(k in (0, 3)) for k in GHOST_NUMBERS}


class CapacityError(ValueError):
    """The level cutoff cannot hold the requested subspace."""


# ------------------------------------------------------------------- ghosts

def _creator(label) -> bool:
    kind, n = label
    return n <= 1 if kind == 1 else n <= -2


def _partner(label):
    kind, n = label
    return (1 - kind, -n)


def ghost_op(label, state: tuple) -> tuple[int, tuple] | None:
    """Apply one ghost mode; returns (sign, new state) or None for zero."""
    if _creator(label):
        if label in state:
            return None
        pos = sum(1 for x in state if x < label)
        return (-1) ** pos, tuple(sorted(state + (label,)))
    p = _partner(label)
    if p not in state:
        return None
    i = state.index(p)
    return (-1) ** i, state[:i] + state[i + 1:]


def ghost_word(labels, state: tuple) -> tuple[int, tuple] | None:
    """Apply labels right to left (the last label acts first)."""
    sign = 1
    for lab in reversed(labels):
        r = ghost_op(lab, state)
        if r is None:
            return None
        s, state = r
        sign *= s
    return sign, state


def normal_order(labels) -> tuple[int, tuple]:
    """Move annihilators to the right (stable), tracking the fermionic sign."""
    labels = list(labels)
    sign = 1
    for i in range(len(labels)):
        for j in range(len(labels) - 1 - i):
            if not _creator(labels[j]) and _creator(labels[j + 1]):
                labels[j], labels[j + 1] = labels[j + 1], labels[j]
                sign = -sign
    return sign, tuple(labels)


def ghost_level(state: tuple) -> int:
    return sum(-n for _, n in state)


def ghost_number(state: tuple) -> int:
    return sum(1 if k == 1 else -1 for k, _ in state)


@lru_cache(maxsize=None)
def ghost_basis(level: int) -> tuple:
    """All ghost monomials of the given weight (weight >= -1)."""
    # c-weights: -1, 0, 1, 2, ...; b-weights: 2, 3, ...
    cws = list(range(-1, level + 2))
    bws = list(range(2, level + 2))
    res = set()
    for nc in range(len(cws) + 1):
        for cs in combinations(cws, nc):
            sc = sum(cs)
            if sc > level + 1:
                continue
            rest = level - sc
            for nb in range(len(bws) + 1):
                for bs in combinations(bws, nb):
                    if sum(bs) == rest:
                        labs = [(1, -w) for w in cs] + [(0, -w) for w in bs]
                        res.add(tuple(sorted(labs)))
    return tuple(sorted(res))


def ghost_virasoro_terms(n: int, max_mode: int) -> list[tuple[int, tuple]]:
    """L^gh_n = Sum_m (n + m) :b_{n-m} c_m:, restricted to |modes| <= max_mode."""
    out = []
    for m in range(-max_mode, max_mode + 1):
        coef = n + m
        if coef == 0 or abs(n - m) > max_mode:
            continue
        out.append((coef, ((0, n - m), (1, m))))
    return out


def ghost_virasoro_act(n: int, state: tuple) -> dict:
    """L^gh_n on a ghost monomial as {state: int}."""
    bound = abs(n) + ghost_level(state) + max((abs(x) for _, x in state), default=0) + 3
    out: dict = {}
    for coef, labs in ghost_virasoro_terms(n, bound):
        s, labs = normal_order(labs)
        r = ghost_word(labs, state)
        if r is None:
            continue
        sign, st = r
        out[st] = out.get(st, 0) + coef * s * sign
    return {k: v for k, v in out.items() if v}


def ghost_central_charge(m: int = 2) -> Fraction:
    """c from [L_m, L_-m]|0> = (c/12)(m^3 - m)|0> on the SL2-invariant vacuum."""
    if m < 2:
        raise ValueError("need m >= 2")
    acc: dict = {}
    for first, second, sign in ((-m, m, 1), (m, -m, -1)):
        for s1, c1 in ghost_virasoro_act(first, ()).items():
            for s2, c2 in ghost_virasoro_act(second, s1).items():
                acc[s2] = acc.get(s2, 0) + sign * c1 * c2
    acc = {k: v for k, v in acc.items() if v}
    if set(acc) - {()}:
        raise ArithmeticError("commutator leaves the vacuum line")
    return Fraction(12 * acc.get((), 0), m ** 3 - m)


# ------------------------------------------------------------------ matter

def _flip(x: RatFunc) -> RatFunc:
    return x.subs({"k": -kappa()})


MATTER_KINDS = ("kernel", "fock", "verma")


def _fock_model(kind: str, lam: int) -> tuple[int, int]:
    """Momentum (p, m) of the Fock module modelling the weight-Delta(lam) module.

    kernel and fock use F_lam (the kernel of Q- is cut out later); verma uses the
    reflected momentum 2 kappa - 2 - lam, whose Fock module is generated by its
    highest weight vector at generic kappa.
    """
    if kind in ("kernel", "fock"):
        return lam, 0
    if kind == "verma":
        return -lam - 2, 1
    raise ValueError(f"unknown matter module kind {kind!r}")


@lru_cache(maxsize=None)
def matter_act(side: int, lam: int, n: int, part: tuple, depth: int, kind: str = "fock") -> tuple:
    """L_n on a basis monomial of the side*kappa matter factor: tuple of (partition, coeff)."""
    spec = FockSpec(*_fock_model(kind, lam), depth)
    w = virasoro_act(n, GradedVector(spec, {part: ONE}))
    items = w.entries.items()
    if side < 0:
        return tuple((b, _flip(c)) for b, c in items)
    return tuple(items)


def matter_weight(side: int, lam: int) -> RatFunc:
    d = conformal_weight(lam)
    return d if side > 0 else _flip(d)


# ------------------------------------------------------------------ complex

@dataclass
class BrstState:
    """Vector in F_{lam,kappa} (x) F_{lam,-kappa} (x) Lambda.

    Keys are (kappa-side partition, -kappa-side partition, ghost monomial).
    """
    lam: int
    entries: dict = field(default_factory=dict)
    depth: int = 8
    kinds: tuple = ("kernel", "kernel")

    def __post_init__(self):
        self.entries = {k: RatFunc.coerce(v) for k, v in self.entries.items()
                        if not RatFunc.coerce(v).is_zero()}

    def add(self, key, c):
        v = self.entries.get(key, ZERO) + c
        if v.is_zero():
            self.entries.pop(key, None)
        else:
            self.entries[key] = v

    def __add__(self, other):
        out = BrstState(self.lam, dict(self.entries), self.depth, self.kinds)
        for k, v in other.entries.items():
            out.add(k, v)
        return out

    def __sub__(self, other):
        return self + other * (-1)

    def __mul__(self, c):
        c = RatFunc.coerce(c)
        return BrstState(self.lam, {k: v * c for k, v in self.entries.items()}, self.depth, self.kinds)

    __rmul__ = __mul__

    def zero(self) -> "BrstState":
        return BrstState(self.lam, {}, self.depth, self.kinds)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (self - other).is_zero()

    @property
    def ghost_numbers(self) -> set:
        return {ghost_number(g) for _, _, g in self.entries}

    @property
    def grades(self) -> set:
        """Matter levels plus ghost level; L_0 = grade - lam."""
        return {sum(a) + sum(b) + ghost_level(g) for a, b, g in self.entries}

    def __repr__(self):
        body = " + ".join(f"({v})*{k}" for k, v in sorted(self.entries.items(), key=str))
        return f"BrstState[lam={self.lam}: {body or '0'}]"


def highest_state(lam: int, depth: int = 8, kinds=("kernel", "kernel")) -> BrstState:
    return BrstState(lam, {((), (), ()): ONE}, depth, tuple(kinds))


def _check_depth(key, depth):
    a, b, _ = key
    if sum(a) > depth or sum(b) > depth:
        raise TruncationError(max(sum(a), sum(b)), depth, "BRST matter factor")


def matter_virasoro(side: int, n: int, v: BrstState) -> BrstState:
    out = v.zero()
    for (a, b, g), c in v.entries.items():
        part = a if side > 0 else b
        for p2, c2 in matter_act(side, v.lam, n, part, v.depth, v.kinds[side < 0]):
            key = (p2, b, g) if side > 0 else (a, p2, g)
            out.add(key, c * c2)
    return out


def ghost_apply(labels, v: BrstState, coeff=1) -> BrstState:
    out = v.zero()
    for (a, b, g), c in v.entries.items():
        r = ghost_word(labels, g)
        if r is not None:
            out.add((a, b, r[1]), c * (coeff * r[0]))
    return out


def ghost_virasoro(n: int, v: BrstState) -> BrstState:
    out = v.zero()
    for (a, b, g), c in v.entries.items():
        for g2, c2 in ghost_virasoro_act(n, g).items():
            out.add((a, b, g2), c * c2)
    return out


def total_virasoro(n: int, v: BrstState) -> BrstState:
    return matter_virasoro(1, n, v) + matter_virasoro(-1, n, v) + ghost_virasoro(n, v)


def _mode_bound(v: BrstState) -> int:
    lv = max((sum(a) + sum(b) + ghost_level(g) for a, b, g in v.entries), default=0)
    gm = max((abs(x) for _, _, g in v.entries for _, x in g), default=0)
    return lv + gm + 3


def brst_Q(v: BrstState) -> BrstState:
    """Q = Sum_m c_{-m} L^V_m + 1/2 Sum_{m,n} (n - m) :c_{-m} c_{-n} b_{m+n}:.

    The normal ordering is taken with respect to the ghost vacuum above, so no
    separate c_0 intercept appears.
    """
    out = v.zero()
    M = _mode_bound(v)
    for (a, b, g), c in v.entries.items():
        low = min([-1] + [x for k, x in g if k == 0])
        for m in range(low, max(sum(a), sum(b)) + 1):
            r = ghost_op((1, -m), g)
            if r is None:
                continue
            sign, g2 = r
            for p2, c2 in matter_act(1, v.lam, m, a, v.depth, v.kinds[0]):
                out.add((p2, b, g2), c * c2 * sign)
            for p2, c2 in matter_act(-1, v.lam, m, b, v.depth, v.kinds[1]):
                out.add((a, p2, g2), c * c2 * sign)
    for m in range(-M, M + 1):
        for n in range(m + 1, M + 1):
            # the (m, n) and (n, m) terms coincide after anticommuting the c's
            coef = Fraction(n - m)
            s, labs = normal_order(((1, -m), (1, -n), (0, m + n)))
            out = out + ghost_apply(labs, v, RatFunc(coef * s))
    for (a, b, g) in out.entries:
        _check_depth((a, b, g), v.depth)
    return out


def anticommutator(op1, op2, v):
    return op1(op2(v)) + op2(op1(v))


def b_mode(n: int):
    return lambda v: ghost_apply(((0, n),), v)


def c_mode(n: int):
    return lambda v: ghost_apply(((1, n),), v)


def c_dc_modes(n: int, v: BrstState) -> BrstState:
    """Mode n of c dc: Sum_{m+k=n} (1 - k) c_m c_k (c(z) = Sum c_n z^{-n+1})."""
    out = v.zero()
    M = _mode_bound(v) + abs(n)
    for k in range(-M, M + 1):
        m = n - k
        if 1 - k:
            out = out + ghost_apply(((1, m), (1, k)), v, 1 - k)
    return out


# --------------------------------------------------------------- sectors

@dataclass
class Sector:
    """Basis of M_kappa (x) M_-kappa (x) Lambda at one grade and ghost number.

    grade = matter levels + ghost level, so L_0 = grade - lam.  Each matter
    factor is one of MATTER_KINDS: the kernel of Q- in F_lam (irreducible at
    generic kappa), the Fock module F_lam itself, or the Verma module.
    """
    lam: int
    grade: int
    ghost: int
    kinds: tuple = ("kernel", "kernel")
    depth: int | None = None
    keys: list = field(default_factory=list)        # basis as BrstStates
    pivots: dict = field(default_factory=dict)      # full key -> basis index

    def __post_init__(self):
        need = self.grade + 1
        if self.depth is None:
            self.depth = need + 1
        if self.depth < need:
            raise CapacityError(f"cutoff {self.depth} below matter level {need} needed at grade {self.grade}")
        self.kinds = tuple(self.kinds)
        self.keys = []
        for gl in range(-1, self.grade + 2):
            ghosts = [g for g in ghost_basis(gl) if ghost_number(g) == self.ghost]
            if not ghosts:
                continue
            mlev = self.grade - gl
            for i in range(mlev + 1):
                plus = _side_basis(1, self.kinds[0], self.lam, i)
                minus = _side_basis(-1, self.kinds[1], self.lam, mlev - i)
                for g in ghosts:
                    for va, pa in plus:
                        for vb, pb in minus:
                            ent = {(x, y, g): ca * cb for x, ca in va.items() for y, cb in vb.items()}
                            self.pivots[(pa, pb, g)] = len(self.keys)
                            self.keys.append(BrstState(self.lam, ent, self.depth, self.kinds))

    def __len__(self):
        return len(self.keys)

    def coordinates(self, v: BrstState) -> dict:
        """Coordinates of a vector lying in the span (read at pivots)."""
        out = {}
        for key, c in v.entries.items():
            if key in self.pivots:
                out[self.pivots[key]] = c
        return out


@lru_cache(maxsize=None)
def _side_basis(side: int, kind: str, lam: int, level: int) -> tuple:
    """Echelon basis of one matter factor at a level: ((vector dict, pivot partition), ...)."""
    if kind != "kernel":
        return tuple(({p: ONE}, p) for p in partitions(level))
    _, vecs = kernel_Qminus(lam, level)
    parts = partitions(level)
    idx = {p: i for i, p in enumerate(parts)}
    rows = [{idx[p]: (c if side > 0 else _flip(c)) for p, c in v.entries.items()} for v in vecs]
    red, piv = rref(rows) if rows else ([], [])
    return tuple(({parts[c]: x for c, x in r.items()}, parts[p]) for r, p in zip(red, piv))


def q_matrix(src: Sector, tgt: Sector) -> list[dict]:
    """Rows (indexed by target basis) of Q restricted to src -> tgt."""
    rows = [dict() for _ in range(len(tgt))]
    for j, st in enumerate(src.keys):
        img = brst_Q(st)
        coords = tgt.coordinates(img)
        for i, c in coords.items():
            rows[i][j] = c
        # consistency: the image must lie in the target span
        back = src.keys[0].zero()
        for i, c in coords.items():
            back = back + tgt.keys[i] * c
        if not (back - img).is_zero():
            raise ArithmeticError("Q image left the truncated complex")
    return rows


@dataclass
class CohomologyResult:
    lam: int
    grade: int
    ghost: int
    dim: int
    chain_dim: int
    rank_in: int
    rank_out: int
    representatives: list


def cohomology(lam: int, ghost: int, grade: int | None = None, depth: int | None = None,
               kinds=("kernel", "kernel")) -> CohomologyResult:
    """H^ghost at L_0 = grade - lam (default: the L_0 = 0 grade lam)."""
    grade = lam if grade is None else grade
    prev = Sector(lam, grade, ghost - 1, kinds, depth)
    cur = Sector(lam, grade, ghost, kinds, depth)
    nxt = Sector(lam, grade, ghost + 1, kinds, depth)
    q_in = q_matrix(prev, cur) if len(prev) and len(cur) else []
    q_out = q_matrix(cur, nxt) if len(cur) and len(nxt) else []
    r_in = rank(q_in) if q_in else 0
    r_out = rank(q_out) if q_out else 0
    dim = len(cur) - r_in - r_out
    reps = _representatives(cur, q_in, q_out, len(prev)) if dim else []
    return CohomologyResult(lam, grade, ghost, dim, len(cur), r_in, r_out, reps)


def _representatives(cur: Sector, q_in, q_out, n_prev) -> list[BrstState]:
    n = len(cur)
    kernel = nullspace(q_out, n) if q_out else [{i: ONE} for i in range(n)]
    # image columns of q_in as vectors in cur coordinates
    image = [{i: r[j] for i, r in enumerate(q_in) if j in r} for j in range(n_prev)] if q_in else []
    red, piv = rref(image) if image else ([], [])
    chosen = []
    for vec in kernel:
        trial = red + [vec]
        if rank(trial) > len(red):
            red, piv = rref(trial)
            chosen.append(vec)
    out = []
    for vec in chosen:
        st = cur.keys[0].zero()
        for i, c in vec.items():
            st = st + cur.keys[i] * c
        out.append(st)
    return out


def exactness_witness(v: BrstState) -> BrstState:
    """Psi = L_0^{-1} b_0 v for a closed v of nonzero L_0 (then Q Psi = v)."""
    grades = v.grades
    if len(grades) != 1:
        raise ValueError("need a homogeneous state")
    l0 = next(iter(grades)) - v.lam
    if l0 == 0:
        raise ValueError("L_0 = 0: no contracting homotopy")
    return b_mode(0)(v) * Fraction(1, l0)


def locality_integral(lam: int, lam_bar: int) -> bool:
    """Delta(lam) + Delta_bar(lam_bar) is a constant integer (kappa-independent)."""
    s = conformal_weight(lam) + _flip(conformal_weight(lam_bar))
    return s.is_constant() and s.to_fraction().denominator == 1


def identity_failures(lam: int, max_grade: int = 4, kinds=("fock", "fock")) -> dict:
    """Basis states (grade, ghost, index) violating Q^2 = 0 or {Q, b_0} = L_0,
    over all grades -1..max_grade of the given matter model."""
    bad = {"Q^2": [], "{Q,b_0} - L_0": []}
    checked = 0
    for grade in range(-1, max_grade + 1):
        for gh in range(-3, 7):
            sec = Sector(lam, grade, gh, kinds, max_grade + 2)
            for i, st in enumerate(sec.keys):
                checked += 1
                if not brst_Q(brst_Q(st)).is_zero():
                    bad["Q^2"].append((grade, gh, i))
                if not (anticommutator(brst_Q, b_mode(0), st) - total_virasoro(0, st)).is_zero():
                    bad["{Q,b_0} - L_0"].append((grade, gh, i))
    bad["checked"] = checked
    return bad


def is_exact(v: BrstState) -> bool:
    """Whether a homogeneous state lies in Q of the previous ghost number."""
    (grade,), (gh,) = v.grades, v.ghost_numbers
    prev = Sector(v.lam, grade, gh - 1, v.kinds, v.depth)
    cur = Sector(v.lam, grade, gh, v.kinds, v.depth)
    if not len(prev):
        return v.is_zero()
    q_in = q_matrix(prev, cur)
    image = [{i: r[j] for i, r in enumerate(q_in) if j in r} for j in range(len(prev))]
    coords = cur.coordinates(v)
    return rank(image + [coords]) == rank(image)


# ------------------------------------------------------------ explicit cycles

def phi0_state(depth: int = 4) -> BrstState:
    """(L^kappa_{-1} - L^{-kappa}_{-1}) Phi + x b_{-2} c_1 Phi in the lam = 1 sector.

    The ghost term is the state of :bc:(z) Phi(z); its coefficient x is fixed by
    Q Phi0 = 0 (solved, not assumed), giving x = -1/kappa.
    """
    phi = highest_state(1, depth)
    matter = matter_virasoro(1, -1, phi) - matter_virasoro(-1, -1, phi)
    ghost = ghost_apply(((0, -2), (1, 1)), phi)
    qm, qg = brst_Q(matter), brst_Q(ghost)
    key = next(iter(qg.entries))
    x = -qm.entries.get(key, ZERO) / qg.entries[key]
    out = matter + ghost * x
    if not brst_Q(out).is_zero():
        raise ArithmeticError("no ghost coefficient closes Phi0")
    return out


def singular_vector_residuals(depth: int = 6, kinds=("fock", "fock")) -> dict:
    """(L^{+-kappa}_{-1})^2 Phi -+ kappa^-1 L^{+-kappa}_{-2} Phi on the lam = 1 primary."""
    phi = highest_state(1, depth, kinds)
    k = kappa()
    out = {}
    for side in (1, -1):
        twice = matter_virasoro(side, -1, matter_virasoro(side, -1, phi))
        out[side] = twice - matter_virasoro(side, -2, phi) * (side / k)
    return out


def phi0_ghost_coefficient() -> RatFunc:
    st = phi0_state()
    return st.entries[((), (), ((0, -2), (1, 1)))]


def phi3_state(depth: int = 4) -> BrstState:
    """c dc d^2c L_{-1} Phi: the state c_1 c_0 c_{-1} (L_{-1} Phi) up to normalization."""
    phi = highest_state(1, depth)
    return ghost_apply(((1, 1), (1, 0), (1, -1)), total_virasoro(-1, phi))


# ------------------------------------------------- quantum labels of classes

def invert_q(x: RatFunc) -> RatFunc:
    """q -> q^{-1} on a coefficient."""
    return x.subs({"q": qpow(Fraction(-1, 2))})


@lru_cache(maxsize=None)
def cg_projection(l1: int, l2: int, nu: int) -> dict:
    """U_q intertwiner V_l1 (x) V_l2 -> V_nu as {(i, j): ((k, coeff), ...)}.

    The highest weight vector of weight nu is normalized to coefficient 1 on
    e_0 (x) e_s; its F-string is matched with the standard basis of V_nu.
    """
    if not (abs(l1 - l2) <= nu <= l1 + l2 and (l1 + l2 - nu) % 2 == 0):
        return {}
    spec = ModuleSpec.tensor(ModuleSpec.findim(l1), ModuleSpec.findim(l2))
    basis = spec.basis()
    index = {b: i for i, b in enumerate(basis)}
    strings = []                     # (channel, k, vector)
    for ch in range(l1 + l2, abs(l1 - l2) - 1, -2):
        s = (l1 + l2 - ch) // 2
        level = [b for b in basis if sum(b) == s]
        rows = {}
        for j, b in enumerate(level):
            img = coproduct_act("E", GradedVector(spec, {b: ONE}))
            for key, c in img.entries.items():
                rows.setdefault(key, {})[j] = c
        kern = nullspace(list(rows.values()), len(level))
        if len(kern) != 1:
            raise ArithmeticError("highest weight space is not one-dimensional")
        vec = kern[0]
        anchor = level.index((0, s)) if (0, s) in level else min(vec)
        scale = 1 / vec[anchor]
        w = GradedVector(spec, {level[j]: c * scale for j, c in vec.items()})
        for k in range(ch + 1):
            strings.append((ch, k, w))
            w = coproduct_act("F", w)
    # invert the change of basis: columns are the string vectors
    n = len(basis)
    mat = [dict() for _ in range(n)]
    for col, (_, _, w) in enumerate(strings):
        for b, c in w.entries.items():
            mat[index[b]][col] = c
    aug = [dict(r) for r in mat]
    for i in range(n):
        aug[i][n + i] = ONE
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ArithmeticError("string vectors do not span the tensor product")
    inv = [{c - n: x for c, x in r.items() if c >= n} for r in red]   # inv[col][basis idx]
    out: dict = {}
    for col, (ch, k, _) in enumerate(strings):
        if ch != nu:
            continue
        for bi, c in inv[col].items():
            out.setdefault(basis[bi], []).append((k, c))
    return {key: tuple(v) for key, v in out.items()}


def cg_projection_inv(l1: int, l2: int, nu: int) -> dict:
    """The same intertwiner for U_{q^{-1}} (coefficients under q -> q^{-1})."""
    return {key: tuple((k, invert_q(c)) for k, c in v)
            for key, v in cg_projection(l1, l2, nu).items()}


def channel_scalar(l1: int, l2: int, nu: int) -> RatFunc:
    """Formal nonzero structure constant S^nu(l1, l2) of the matter factors."""
    if l1 == 0 or l2 == 0:
        return ONE                 # vacuum channel: mu(1, V) = V
    return var(f"S_{l1}_{l2}_{nu}")


@dataclass
class LZClass:
    """Cohomology class: ghost number and components {(lam, i, j): coeff} in
    the span of V^q_lam (x) V^{q^-1}_lam (i, j index the standard bases)."""
    ghost: int
    comps: dict = field(default_factory=dict)

    def __post_init__(self):
        self.comps = {k: RatFunc.coerce(v) for k, v in self.comps.items()
                      if not RatFunc.coerce(v).is_zero()}

    def __add__(self, other):
        if self.comps and other.comps and self.ghost != other.ghost:
            raise ValueError("adding classes of different ghost number")
        out = dict(self.comps)
        for k, v in other.comps.items():
            out[k] = out.get(k, ZERO) + v
        return LZClass(self.ghost if self.comps else other.ghost, out)

    def __sub__(self, other):
        return self + other * (-1)

    def __mul__(self, c):
        c = RatFunc.coerce(c)
        return LZClass(self.ghost, {k: v * c for k, v in self.comps.items()})

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.comps

    def __eq__(self, other):
        return (self - other).is_zero()

    def channel(self, lam: int) -> "LZClass":
        return LZClass(self.ghost, {k: v for k, v in self.comps.items() if k[0] == lam})

    def sectors(self) -> set:
        return {k[0] for k in self.comps}

    def __repr__(self):
        body = " + ".join(f"({v})*{k}" for k, v in sorted(self.comps.items()))
        return f"LZClass[gh={self.ghost}: {body or '0'}]"


VACUUM = LZClass(0, {(0, 0, 0): ONE})
# generators in the lam = 1 sector: index 0 is a_+ (highest), 1 is a_- = F a_+
GENERATORS = {
    "A": LZClass(0, {(1, 1, 0): ONE}),
    "D": LZClass(0, {(1, 0, 1): ONE}),
    "B": LZClass(0, {(1, 0, 0): ONE}),
    "C": LZClass(0, {(1, 1, 1): ONE}),
}
MAX_GHOST = 3


def lz_product(u: LZClass, v: LZClass, scalar=channel_scalar, order: str = "exchange") -> LZClass:
    """Channel-wise product: quantum labels through the q and q^{-1} intertwiners,
    each channel weighted by the matter structure scalar S^nu(lam_u, lam_v).

    order="exchange" feeds the labels as (label of v) (x) (label of u), the
    ordering in which the R R-bar exchange rule for mu is an intertwiner;
    order="direct" uses (label of u) (x) (label of v).
    """
    if order not in ("exchange", "direct"):
        raise ValueError(order)
    gh = u.ghost + v.ghost
    out: dict = {}
    if gh > MAX_GHOST:
        return LZClass(gh)
    for (l1, i1, j1), c1 in u.comps.items():
        for (l2, i2, j2), c2 in v.comps.items():
            for nu in range(abs(l1 - l2), l1 + l2 + 1, 2):
                if order == "direct":
                    left = cg_projection(l1, l2, nu).get((i1, i2), ())
                    right = cg_projection_inv(l1, l2, nu).get((j1, j2), ())
                else:
                    left = cg_projection(l2, l1, nu).get((i2, i1), ())
                    right = cg_projection_inv(l2, l1, nu).get((j2, j1), ())
                if not left or not right:
                    continue
                s = scalar(l1, l2, nu) * c1 * c2
                for k, a in left:
                    for m, b in right:
                        key = (nu, k, m)
                        out[key] = out.get(key, ZERO) + s * a * b
    return LZClass(gh, out)


# --------------------------------------------------------- exchange relations

def _q():
    return qpow(1)


def _pair_vector(l1: int, l2: int, i: int, j: int) -> GradedVector:
    spec = ModuleSpec.tensor(ModuleSpec.findim(l1), ModuleSpec.findim(l2))
    return GradedVector(spec, {(i, j): ONE})


def lz_exchange(u: LZClass, v: LZClass, scalar=channel_scalar, order: str = "exchange") -> LZClass:
    """(-1)^{|u||v|} mu(r1 v, r2 u) with (r1 (x) r2) = R R-bar acting on the
    labels of (v, u): R on the q labels, R-bar on the q^{-1} labels."""
    from .uq import r_bar_act, r_matrix_act
    total = LZClass(u.ghost + v.ghost)
    sign = (-1) ** (u.ghost * v.ghost)
    for (l2, i2, j2), c2 in v.comps.items():
        for (l1, i1, j1), c1 in u.comps.items():
            rq = r_matrix_act(_pair_vector(l2, l1, i2, i1))
            rb = r_bar_act(_pair_vector(l2, l1, j2, j1))
            for (a, b), x in rq.entries.items():
                for (abar, bbar), y in rb.entries.items():
                    first = LZClass(v.ghost, {(l2, a, abar): ONE})
                    second = LZClass(u.ghost, {(l1, b, bbar): ONE})
                    total = total + lz_product(first, second, scalar, order) * (x * y * c1 * c2 * sign)
    return total


def derived_exchange(x: str, y: str) -> dict:
    """R R-bar exchange of the generator pair (x(z), y(w)): {(U, U'): coeff} meaning
    Sum coeff * U(w) U'(z)."""
    from .uq import r_bar_act, r_matrix_act
    names = {(i, j): n for n, g in GENERATORS.items() for (_, i, j) in g.comps}
    (_, xi, xj), = GENERATORS[x].comps
    (_, yi, yj), = GENERATORS[y].comps
    rq = r_matrix_act(_pair_vector(1, 1, yi, xi))
    rb = r_bar_act(_pair_vector(1, 1, yj, xj))
    out: dict = {}
    for (a, b), c in rq.entries.items():
        for (abar, bbar), d in rb.entries.items():
            key = (names[(a, abar)], names[(b, bbar)])
            out[key] = out.get(key, ZERO) + c * d
    return {k: v for k, v in out.items() if not v.is_zero()}


def alternate_exchange() -> dict:
    """The twelve exchange relations in the alternate form, keyed by (x, y)."""
    q = _q()
    d = q - 1 / q
    return {
        ("B", "A"): {("A", "B"): 1 / q, ("B", "A"): d / q},
        ("B", "C"): {("C", "B"): ONE, ("D", "A"): d, ("A", "D"): -d, ("B", "C"): -d * d},
        ("B", "D"): {("D", "B"): q, ("B", "A"): -q * d},
        ("A", "C"): {("C", "A"): q, ("A", "C"): -q * d},
        ("D", "A"): {("A", "D"): ONE, ("B", "C"): d},
        ("D", "C"): {("C", "D"): 1 / q, ("D", "C"): d / q},
        ("A", "B"): {("B", "A"): 1 / q},
        ("C", "B"): {("B", "C"): ONE},
        ("D", "B"): {("B", "D"): q},
        ("C", "A"): {("A", "C"): q},
        ("C", "D"): {("D", "C"): 1 / q},
        ("A", "D"): {("D", "A"): ONE, ("B", "C"): -d},
    }


def _relation_residual(lhs: dict, rhs: dict) -> dict:
    keys = set(lhs) | set(rhs)
    res = {k: RatFunc.coerce(lhs.get(k, ZERO)) - RatFunc.coerce(rhs.get(k, ZERO)) for k in keys}
    return {k: v for k, v in res.items() if not v.is_zero()}


def _mu(x, y, scalar=channel_scalar, order="exchange") -> LZClass:
    gx = GENERATORS[x] if isinstance(x, str) else x
    gy = GENERATORS[y] if isinstance(y, str) else y
    return lz_product(gx, gy, scalar, order)


def _combo(terms: dict, scalar=channel_scalar, order="exchange") -> LZClass:
    out = LZClass(0)
    for (u, v), c in terms.items():
        out = out + _mu(u, v, scalar, order) * c
    return out


def associative_scalar(l1: int, l2: int, nu: int) -> RatFunc:
    """Channel scalars on the solution of the associativity constraints for
    generator triples (exchange order): S^3(1,2) = S^3(2,1),
    S^1(1,2) = S^1(2,1)/[2]^2 and S^0(1,1) = S^2(1,1) S^1(2,1)/[3]."""
    from .coeffs import qint
    if l1 == 0 or l2 == 0:
        return ONE
    if (l1, l2, nu) == (1, 2, 3):
        return channel_scalar(2, 1, 3)
    if (l1, l2, nu) == (1, 2, 1):
        return channel_scalar(2, 1, 1) / qint(2) ** 2
    if (l1, l2, nu) == (1, 1, 0):
        return channel_scalar(1, 1, 2) * channel_scalar(2, 1, 1) / qint(3)
    return channel_scalar(l1, l2, nu)


def determinant_class(scalar=channel_scalar, order="exchange") -> LZClass:
    return _mu("A", "D", scalar, order) - _mu("B", "C", scalar, order) * (1 / _q())


def determinant_normalization(scalar=channel_scalar) -> RatFunc:
    """Value of S^0(1,1) for which the lam = 0 channel of AD - q^-1 BC is the vacuum."""
    det0 = determinant_class(scalar).channel(0).comps.get((0, 0, 0), ZERO)
    s0 = scalar(1, 1, 0)
    return s0 / det0


@dataclass
class Check:
    name: str
    passed: bool
    witness: str = ""


def slq2_check(scalar=channel_scalar, order: str = "exchange") -> dict:
    """Relation report: the twelve R R-bar exchange relations verified through
    the product, the quantum determinant, the algebra relations, and a
    comparison of the derived exchange table with the alternate one."""
    relations = []
    for (x, y) in alternate_exchange():
        terms = derived_exchange(x, y)
        res = _mu(x, y, scalar, order) - _combo(terms, scalar, order)
        relations.append(Check(f"exchange {x}1 {y}2", res.is_zero(), "" if res.is_zero() else repr(res)))
    det = determinant_class(scalar, order)
    two, zero = det.channel(2), det.channel(0)
    ok = two.is_zero() and not zero.is_zero()
    relations.append(Check("AD - q^-1 BC: lam=2 channel zero, lam=0 channel nonzero", ok,
                           "" if ok else repr(det)))
    q = _q()
    algebra = {
        "AB = BA q^-1": (("A", "B"), {("B", "A"): 1 / q}),
        "CB = BC": (("C", "B"), {("B", "C"): ONE}),
        "DB = BD q": (("D", "B"), {("B", "D"): q}),
        "CA = AC q": (("C", "A"), {("A", "C"): q}),
        "CD = DC q^-1": (("C", "D"), {("D", "C"): 1 / q}),
        "AD - DA = (q^-1 - q) BC": (("A", "D"), {("D", "A"): ONE, ("B", "C"): 1 / q - q}),
    }
    algebra_checks = []
    for name, ((x, y), rhs) in algebra.items():
        res = _mu(x, y, scalar, order) - _combo(rhs, scalar, order)
        algebra_checks.append(Check(name, res.is_zero(), "" if res.is_zero() else repr(res)))
    alternate = []
    for (x, y), rhs in alternate_exchange().items():
        res = _relation_residual(derived_exchange(x, y), rhs)
        alternate.append(Check(f"alternate {x}1 {y}2", not res, "" if not res else str(res)))
    return {"relations": relations, "algebra": algebra_checks, "alternate": alternate,
            "normalization": determinant_normalization(scalar)}


def commutativity_check(scalar=channel_scalar, order: str = "exchange") -> list[Check]:
    out = []
    for x in GENERATORS:
        for y in GENERATORS:
            res = _mu(x, y, scalar, order) - lz_exchange(GENERATORS[x], GENERATORS[y], scalar, order)
            out.append(Check(f"mu({x},{y}) = mu(r1 {y}, r2 {x})", res.is_zero(), "" if res.is_zero() else repr(res)))
    return out


def associativity_check(scalar=associative_scalar, order: str = "exchange",
                        elements: dict | None = None) -> list[Check]:
    elements = elements or dict(GENERATORS, **{"1": VACUUM})
    out = []
    for x, u in elements.items():
        for y, v in elements.items():
            for z, w in elements.items():
                lhs = lz_product(lz_product(u, v, scalar, order), w, scalar, order)
                rhs = lz_product(u, lz_product(v, w, scalar, order), scalar, order)
                res = lhs - rhs
                out.append(Check(f"({x}{y}){z} = {x}({y}{z})", res.is_zero(), "" if res.is_zero() else repr(res)))
    return out


# ---------------------------------------------------------------- coproduct

def class_basis(max_lam: int) -> list[tuple]:
    return [(lam, i, j) for lam in range(max_lam + 1) for i in range(lam + 1) for j in range(lam + 1)]


def lz_coproduct(u: LZClass, max_lam: int = 2, scalar=channel_scalar, order="exchange") -> dict:
    """Delta_mu(u) = Sum_{v, w} (u, mu(v, w)) v* (x) w* over basis classes with
    lam <= max_lam, using the pairing in which the basis classes are orthonormal
    (so v* is identified with v).  Returns {(v, w): coeff}."""
    basis = class_basis(max_lam)
    out = {}
    for v in basis:
        for w in basis:
            prod = lz_product(LZClass(0, {v: ONE}), LZClass(0, {w: ONE}), scalar, order)
            c = pairing(u, prod)
            if not c.is_zero():
                out[(v, w)] = c
    return out


def pairing(u: LZClass, v: LZClass) -> RatFunc:
    total = ZERO
    for k, c in u.comps.items():
        if k in v.comps:
            total = total + c * v.comps[k]
    return total


def counit(u: LZClass) -> RatFunc:
    return u.comps.get((0, 0, 0), ZERO)


def coproduct_checks(max_lam: int = 2, scalar=channel_scalar, order="exchange") -> list[Check]:
    """Transpose consistency (Delta u, v (x) w) = (u, mu(v, w)) and counit laws on
    generators; also records whether Delta_mu(A) has any generator (x) generator
    part, which a matrix coproduct A (x) A + B (x) C would require."""
    out = []
    basis = class_basis(max_lam)
    gens = list(GENERATORS.items()) + [("1", VACUUM)]
    for name, g in gens:
        delta = lz_coproduct(g, max_lam, scalar, order)
        bad = []
        for v in basis:
            for w in basis:
                lhs = delta.get((v, w), ZERO)
                rhs = pairing(g, lz_product(LZClass(0, {v: ONE}), LZClass(0, {w: ONE}), scalar, order))
                if lhs != rhs:
                    bad.append((v, w))
        out.append(Check(f"transpose {name}", not bad, str(bad[:3]) if bad else ""))
        # (counit (x) id) Delta = id and (id (x) counit) Delta = id
        left = LZClass(0, {w: c for (v, w), c in delta.items() if v == (0, 0, 0)})
        right = LZClass(0, {v: c for (v, w), c in delta.items() if w == (0, 0, 0)})
        ok = left == g and right == g
        out.append(Check(f"counit {name}", ok, "" if ok else f"{left} / {right}"))
    return out


def generator_part(delta: dict) -> dict:
    """Components of a coproduct on (lam = 1) (x) (lam = 1)."""
    return {k: v for k, v in delta.items() if k[0][0] == 1 and k[1][0] == 1}
