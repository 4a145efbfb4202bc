"""U_q(sl2) acting on truncated Verma, contragredient and finite-dimensional
modules, with coproduct, antiautomorphism, pairing and R-matrix.

Basis conventions
-----------------
* Verma / finite-dimensional: index m stands for F^m v (highest weight v).
* Contragredient: index m stands for v_m = beta^m zeta^weight, so that
  q^{-H} E v_m = [m] v_{m-1} and F q^H v_m = [weight - m] v_{m+1}.
* Tensor: index is a tuple of factor indices.

Coproduct: D(E) = E (x) K + 1 (x) E, D(F) = F (x) 1 + K^-1 (x) F, D(K) = K (x) K,
iterated left to right.  Words are tuples of letters in {"E","F","K","Ki"}
read as operator products (rightmost letter acts first).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .coeffs import (ONE, ZERO, RatFunc, Weight, qfact, qint, qnum, qpow,
                     qpow_product)

LETTERS = ("E", "F", "K", "Ki")


class TruncationError(ArithmeticError):
    """An operation left the retained degrees of a truncated module."""

    def __init__(self, degree: int, depth: int, where: str = ""):
        self.degree = degree
        self.depth = depth
        super().__init__(f"degree {degree} exceeds truncation depth {depth}"
                         + (f" in {where}" if where else "") + "; raise the depth")


@dataclass(frozen=True)
class ModuleSpec:
    kind: str
    weight: Weight | None = None
    depth: int = 0
    factors: tuple = field(default=())

    @classmethod
    def verma(cls, weight, depth: int) -> "ModuleSpec":
        return cls("verma", Weight.coerce(weight), depth)

    @classmethod
    def contragredient(cls, weight, depth: int) -> "ModuleSpec":
        return cls("contra", Weight.coerce(weight), depth)

    @classmethod
    def findim(cls, n: int) -> "ModuleSpec":
        if int(n) != n or n < 0:
            raise ValueError("finite-dimensional modules need an integer weight >= 0")
        return cls("findim", Weight(n), int(n))

    @classmethod
    def tensor(cls, *factors: "ModuleSpec") -> "ModuleSpec":
        if any(f.kind == "tensor" for f in factors):
            raise ValueError("nested tensor products are not supported; flatten them")
        return cls("tensor", None, sum(f.depth for f in factors), tuple(factors))

    def basis(self) -> list:
        if self.kind != "tensor":
            return list(range(self.depth + 1))
        out = [()]
        for f in self.factors:
            out = [b + (m,) for b in out for m in f.basis()]
        return out

    def weight_of(self, index) -> Weight:
        if self.kind == "tensor":
            total = Weight(0)
            for f, m in zip(self.factors, index):
                total = total + f.weight_of(m)
            return total
        return self.weight - 2 * index

    def level_basis(self, level: int) -> list:
        """Tensor (or single) basis vectors with total F-degree ``level``."""
        if self.kind != "tensor":
            return [level] if level <= self.depth else []
        out = [()]
        for f in self.factors:
            out = [b + (m,) for b in out for m in range(min(f.depth, level) + 1)]
        return [b for b in out if sum(b) == level]


class GradedVector:
    __slots__ = ("module", "entries")

    def __init__(self, module: ModuleSpec, entries: dict | None = None):
        self.module = module
        self.entries = {k: RatFunc.coerce(v) for k, v in (entries or {}).items()
                        if not RatFunc.coerce(v).is_zero()}

    @classmethod
    def basis_vector(cls, module: ModuleSpec, index, coeff=1) -> "GradedVector":
        return cls(module, {index: coeff})

    def __add__(self, other: "GradedVector"):
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, ZERO) + v
        return GradedVector(self.module, out)

    def __sub__(self, other):
        return self + other * (-1)

    def __mul__(self, c):
        c = RatFunc.coerce(c)
        return GradedVector(self.module, {k: v * c for k, v in self.entries.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GradedVector):
            return NotImplemented
        keys = set(self.entries) | set(other.entries)
        return all(self.entries.get(k, ZERO) == other.entries.get(k, ZERO) for k in keys)

    def is_zero(self) -> bool:
        return not self.entries

    def __repr__(self):
        body = " + ".join(f"({v})*{k}" for k, v in sorted(self.entries.items(), key=lambda t: str(t[0])))
        return f"GradedVector[{body or '0'}]"


def _add(acc: dict, key, val):
    if val.is_zero():
        return
    cur = acc.get(key)
    new = val if cur is None else cur + val
    if new.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = new


# ------------------------------------------------------------ single factor

def act_basis(spec: ModuleSpec, letter: str, m: int) -> list[tuple[RatFunc, int]]:
    """Action of one letter on a basis vector of a non-tensor module."""
    lam = spec.weight
    if letter == "K":
        return [(qpow(lam - 2 * m), m)]
    if letter == "Ki":
        return [(qpow(2 * m - lam), m)]
    if spec.kind in ("verma", "findim"):
        if letter == "E":
            if m == 0:
                return []
            return [(qint(m) * qnum(lam - m + 1), m - 1)]
        if letter == "F":
            if spec.kind == "findim" and m == spec.depth:
                return []
            if m + 1 > spec.depth:
                raise TruncationError(m + 1, spec.depth, "F on a Verma module")
            return [(ONE, m + 1)]
    elif spec.kind == "contra":
        if letter == "E":
            if m == 0:
                return []
            return [(qint(m) * qpow(lam - 2 * m + 2), m - 1)]
        if letter == "F":
            c = qnum(lam - m)
            if c.is_zero():
                return []
            if m + 1 > spec.depth:
                raise TruncationError(m + 1, spec.depth, "F on a contragredient module")
            return [(c * qpow(2 * m - lam), m + 1)]
    raise ValueError(f"cannot act with {letter!r} on a {spec.kind} module")


def act(gen: str, v: GradedVector) -> GradedVector:
    if v.module.kind == "tensor":
        raise ValueError("use coproduct_act on tensor products")
    out: dict = {}
    for m, c in v.entries.items():
        for coeff, m2 in act_basis(v.module, gen, m):
            _add(out, m2, c * coeff)
    return GradedVector(v.module, out)


def apply_word(word: Sequence[str], v: GradedVector) -> GradedVector:
    for letter in reversed(word):
        v = act(letter, v)
    return v


# ------------------------------------------------------------------ tensors

def act_factor(letter: str, v: GradedVector, i: int) -> GradedVector:
    spec = v.module
    out: dict = {}
    for idx, c in v.entries.items():
        for coeff, m2 in act_basis(spec.factors[i], letter, idx[i]):
            _add(out, idx[:i] + (m2,) + idx[i + 1:], c * coeff)
    return GradedVector(spec, out)


def coproduct_terms(letter: str, n: int) -> list[tuple]:
    """Iterated coproduct of a letter as a list of n-tuples of words."""
    one = ()
    if letter in ("K", "Ki"):
        return [tuple((letter,) for _ in range(n))]
    if letter == "E":
        return [tuple([one] * i + [("E",)] + [("K",)] * (n - i - 1)) for i in range(n)]
    if letter == "F":
        return [tuple([("Ki",)] * i + [("F",)] + [one] * (n - i - 1)) for i in range(n)]
    raise ValueError(letter)


def apply_tensor_word(words: Sequence[Sequence[str]], v: GradedVector,
                      positions: Sequence[int] | None = None) -> GradedVector:
    positions = range(len(words)) if positions is None else positions
    for w, i in zip(words, positions):
        for letter in reversed(w):
            v = act_factor(letter, v, i)
    return v


def coproduct_act(gen: str, v: GradedVector, positions: Sequence[int] | None = None) -> GradedVector:
    """Iterated coproduct of one generator (or a word) on a tensor vector.

    ``positions`` restricts the action to a block of factors.
    """
    spec = v.module
    if spec.kind != "tensor":
        raise ValueError("coproduct_act needs a tensor product")
    positions = list(range(len(spec.factors))) if positions is None else list(positions)
    word = (gen,) if gen in LETTERS else tuple(gen)
    for letter in reversed(word):
        total = GradedVector(spec)
        for words in coproduct_terms(letter, len(positions)):
            total = total + apply_tensor_word(words, v, positions)
        v = total
    return v


def swap(v: GradedVector, i: int, j: int) -> GradedVector:
    """Flip factors i and j (the permutation P)."""
    spec = v.module
    f = list(spec.factors)
    f[i], f[j] = f[j], f[i]
    new = ModuleSpec.tensor(*f)
    out = {}
    for idx, c in v.entries.items():
        k = list(idx)
        k[i], k[j] = k[j], k[i]
        out[tuple(k)] = c
    return GradedVector(new, out)


# -------------------------------------------------------- antiautomorphism

def tau(elem) -> list[tuple[RatFunc, tuple]]:
    """Antiautomorphism on a linear combination of words.

    E -> F K, F -> K^-1 E, K -> K, reversing products.  The image of F is
    written K^-1 E; this is the choice compatible with the contragredient
    action and the pairing normalization.
    """
    if isinstance(elem, str):
        elem = [(ONE, (elem,))]
    elif elem and isinstance(elem[0], str):
        elem = [(ONE, tuple(elem))]
    image = {"E": ("F", "K"), "F": ("Ki", "E"), "K": ("K",), "Ki": ("Ki",)}
    out = []
    for c, word in elem:
        new: tuple = ()
        for letter in word:
            new = image[letter] + new
        out.append((c, new))
    return out


def apply_element(elem, v: GradedVector) -> GradedVector:
    total = GradedVector(v.module)
    for c, word in elem:
        total = total + apply_word(word, v) * c
    return total


def coproduct_element(elem, n: int = 2) -> list[tuple[RatFunc, tuple]]:
    """Coproduct of a combination of words as combinations of word tuples."""
    out = []
    for c, word in elem:
        acc = [(c, tuple(() for _ in range(n)))]
        for letter in word:
            nxt = []
            for c0, ws in acc:
                for terms in coproduct_terms(letter, n):
                    nxt.append((c0, tuple(a + b for a, b in zip(ws, terms))))
            acc = nxt
        out.extend(acc)
    return out


def apply_tensor_element(elem, v: GradedVector) -> GradedVector:
    total = GradedVector(v.module)
    for c, words in elem:
        total = total + apply_tensor_word(words, v) * c
    return total


def tau_tensor(elem) -> list:
    out = []
    for c, words in elem:
        imgs = [tau([(ONE, w)])[0][1] for w in words]
        out.append((c, tuple(imgs)))
    return out


# ----------------------------------------------------------------- pairing

def pairing(vstar: GradedVector, v: GradedVector) -> RatFunc:
    """<v_m, F^n v> = [m]! delta_{mn}, extended bilinearly (and factorwise)."""
    a, b = vstar.module, v.module
    if a.kind == "tensor":
        if b.kind != "tensor" or len(a.factors) != len(b.factors):
            raise ValueError("pairing needs matching tensor shapes")
        pairs = list(zip(a.factors, b.factors))
    else:
        pairs = [(a, b)]
    for fa, fb in pairs:
        if fa.kind != "contra" or fb.kind not in ("verma", "findim"):
            raise ValueError("pairing is between a contragredient and a Verma module")
        if fa.weight != fb.weight:
            raise ValueError(f"weights differ: {fa.weight} vs {fb.weight}")
    total = ZERO
    for k, c in vstar.entries.items():
        if k in v.entries:
            ks = k if a.kind == "tensor" else (k,)
            f = ONE
            for m in ks:
                f = f * qfact(m)
            total = total + c * v.entries[k] * f
    return total


# ----------------------------------------------------------------- R-matrix

def _theta_coeff(k: int) -> RatFunc:
    return qpow(k * (k - 1) // 2) * (qpow(1) - qpow(-1)) ** k / qfact(k)


def apply_cartan(v: GradedVector, i: int, j: int, sign: int = 1) -> GradedVector:
    """Multiply by q^{sign H_i H_j / 2}."""
    spec = v.module
    out = {}
    for idx, c in v.entries.items():
        hi = spec.factors[i].weight_of(idx[i])
        hj = spec.factors[j].weight_of(idx[j])
        out[idx] = c * qpow_product(hi, hj, Fraction(sign, 2))
    return GradedVector(spec, out)


def r_matrix_act(v: GradedVector, i: int = 0, j: int = 1) -> GradedVector:
    """R = q^{H(x)H/2} Theta acting on factors (i, j)."""
    if v.module.kind != "tensor":
        raise ValueError("R acts on tensor products")
    return apply_cartan(_theta(v, i, [j]), i, j)


def _theta(v: GradedVector, i: int, js: Sequence[int]) -> GradedVector:
    total = GradedVector(v.module)
    cur = v
    k = 0
    while True:
        total = total + cur * _theta_coeff(k)
        cur = act_factor("E", cur, i)
        if cur.is_zero():
            break
        k += 1
        cur = coproduct_act("F", cur, js) if len(js) > 1 else act_factor("F", cur, js[0])
        if k > 10_000:
            raise AssertionError("Theta failed to terminate")
    return total


def rcheck_act(v: GradedVector, i: int = 0, j: int = 1) -> GradedVector:
    """R-check = P R on adjacent or arbitrary factors (i, j)."""
    return swap(r_matrix_act(v, i, j), i, j)


def r_bar_act(v: GradedVector, i: int = 0, j: int = 1) -> GradedVector:
    """R-matrix of U_{q^-1}: q^{-H(x)H/2} (1 - (q - q^-1) E (x) F + ...).

    Obtained from R by q -> q^-1, i.e. Theta with inverted q and the inverse
    Cartan factor.
    """
    total = GradedVector(v.module)
    cur = v
    k = 0
    while True:
        c = qpow(-(k * (k - 1) // 2)) * (qpow(-1) - qpow(1)) ** k / qfact(k)
        total = total + cur * c
        cur = act_factor("E", cur, i)
        if cur.is_zero():
            break
        k += 1
        cur = act_factor("F", cur, j)
    return apply_cartan(total, i, j, sign=-1)


def id_delta_r(v: GradedVector) -> GradedVector:
    """(1 (x) D) R on a three-fold tensor product."""
    w = _theta(v, 0, [1, 2])
    return apply_cartan(apply_cartan(w, 0, 1), 0, 2)


def r13_r12(v: GradedVector) -> GradedVector:
    return r_matrix_act(r_matrix_act(v, 0, 1), 0, 2)


def delta_id_r(v: GradedVector) -> GradedVector:
    """(D (x) 1) R = Sum_k c_k D(E)^k (x) F^k, times the Cartan part."""
    total = GradedVector(v.module)
    cur = v
    k = 0
    while True:
        total = total + cur * _theta_coeff(k)
        cur = coproduct_act("E", cur, [0, 1])
        if cur.is_zero():
            break
        k += 1
        cur = act_factor("F", cur, 2)
    return apply_cartan(apply_cartan(total, 0, 2), 1, 2)


def r13_r23(v: GradedVector) -> GradedVector:
    return r_matrix_act(r_matrix_act(v, 1, 2), 0, 2)


# ---------------------------------------------------- polynomial realization

def jackson_qderiv(poly: dict) -> dict:
    """(f(q b) - f(q^-1 b)) / (b (q - q^-1)) for f = {degree: coeff} in b."""
    out: dict = {}
    den = qpow(1) - qpow(-1)
    for m, c in poly.items():
        if m == 0:
            continue
        # f(q b) - f(q^-1 b) on b^m, then divide by b
        val = RatFunc.coerce(c) * (qpow(m) - qpow(-m)) / den
        _add(out, m - 1, val)
    return out


def realization_act(gen: str, poly: dict, weight) -> dict:
    """Generators as operators on C[beta] zeta^weight.

    E = q^H gamma, F = beta [zeta d/dzeta - N] q^{-H}, H = zeta d/dzeta - 2N,
    with gamma the Jackson derivative and N = beta d/dbeta.
    """
    weight = Weight.coerce(weight)

    def qH(p, sign):
        return {m: RatFunc.coerce(c) * qpow(sign * (weight - 2 * m)) for m, c in p.items()}

    if gen == "K":
        return qH(poly, 1)
    if gen == "Ki":
        return qH(poly, -1)
    if gen == "E":
        return qH(jackson_qderiv(poly), 1)
    if gen == "F":
        p = qH(poly, -1)
        return {m + 1: c * qnum(weight - m) for m, c in p.items()
                if not (c * qnum(weight - m)).is_zero()}
    raise ValueError(gen)


# ---------------------------------------------------------------- checks

def relation_residuals(spec: ModuleSpec, depth: int | None = None) -> dict:
    """Residuals of the defining relations on every basis vector whose
    images stay inside the truncation (safe depth = depth - 1)."""
    safe = (spec.depth if depth is None else depth) - 1
    if spec.kind == "findim":
        safe = spec.depth
    res = {}
    qq = qpow(1) - qpow(-1)
    for m in range(max(safe, 0) + 1):
        v = GradedVector.basis_vector(spec, m)
        checks = {
            "KE=q2EK": apply_word(("K", "E"), v) - apply_word(("E", "K"), v) * qpow(2),
            "KiE=q-2EKi": apply_word(("Ki", "E"), v) - apply_word(("E", "Ki"), v) * qpow(-2),
            "KF=q-2FK": apply_word(("K", "F"), v) - apply_word(("F", "K"), v) * qpow(-2),
            "KiF=q2FKi": apply_word(("Ki", "F"), v) - apply_word(("F", "Ki"), v) * qpow(2),
            "KKi=1": apply_word(("K", "Ki"), v) - v,
            "[E,F]": (apply_word(("E", "F"), v) - apply_word(("F", "E"), v))
                     - (act("K", v) - act("Ki", v)) * (1 / qq),
        }
        for name, r in checks.items():
            res[(name, m)] = r
    return res


def realization_residuals(weight, depth: int = 8) -> dict:
    """Defining relations for the polynomial operators on beta^m (m < depth),
    plus the difference from the contragredient basis action."""
    weight = Weight.coerce(weight)
    qq = qpow(1) - qpow(-1)

    def word(letters, p):
        for g in reversed(letters):
            p = realization_act(g, p, weight)
        return p

    def combo(*parts):
        out: dict = {}
        for c, p in parts:
            for m, x in p.items():
                _add(out, m, RatFunc.coerce(x) * c)
        return out

    spec = ModuleSpec.contragredient(weight, depth)
    res = {}
    for m in range(depth):
        p = {m: ONE}
        checks = {
            "KE=q2EK": combo((ONE, word("KE", p)), (-qpow(2), word("EK", p))),
            "KF=q-2FK": combo((ONE, word("KF", p)), (-qpow(-2), word("FK", p))),
            "KKi=1": combo((ONE, word(("K", "Ki"), p)), (-ONE, p)),
            "[E,F]": combo((ONE, word("EF", p)), (-ONE, word("FE", p)),
                           (-1 / qq, word("K", p)), (1 / qq, word(("Ki",), p))),
        }
        for g in ("E", "F", "K"):
            basis = act(g, GradedVector.basis_vector(spec, m)).entries
            checks[f"{g} vs contragredient"] = combo((ONE, realization_act(g, p, weight)), (-ONE, basis))
        for name, r in checks.items():
            res[(name, m)] = r
    return res


def exact_sequence_dims(lam: int, depth: int) -> list[tuple[int, int, int, int]]:
    """Per weight lam - 2m (m <= depth): (m, dim M^c, dim of the submodule
    generated by the lowest vector, dim of the quotient)."""
    spec = ModuleSpec.contragredient(lam, depth)
    sub = set()
    frontier = [GradedVector.basis_vector(spec, 0)]
    while frontier:
        v = frontier.pop()
        for k in v.entries:
            sub.add(k)
        for g in ("E", "F"):
            try:
                w = act(g, v)
            except TruncationError:
                continue
            if not w.is_zero() and not set(w.entries) <= sub:
                frontier.append(w)
    return [(m, 1, int(m in sub), 1 - int(m in sub)) for m in range(depth + 1)]
