"""Exact scalars: rational functions over Z, formal weights, q-combinatorics.

Every q-power in the package may carry a half-integer exponent (the R-matrix
prefactor q^{H(x)H/2}), so the generator named ``q`` internally stands for
q^{1/2}.  Likewise a formal weight ``l`` contributes the generator ``t.l``
standing for q^{l/2}, and a product of two formal weights contributes
``w.l.m`` standing for q^{l*m/2}.  Users never see this: ``qpow`` and the
printer translate exponents.
"""
from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import flint

_ORDER = "degrevlex"


@lru_cache(maxsize=None)
def _ctx(names: tuple) -> flint.fmpz_mpoly_ctx:
    return flint.fmpz_mpoly_ctx.get(names, _ORDER)


_EMPTY = _ctx(())


@lru_cache(maxsize=4096)
def _union(a: tuple, b: tuple) -> tuple:
    return tuple(sorted(set(a) | set(b)))


def _lift(p, names: tuple):
    ctx = _ctx(names)
    if p.context() is ctx:
        return p
    return p.project_to_context(ctx)


class RatFunc:
    """Reduced quotient num/den of integer polynomials.

    The denominator has a positive leading coefficient and gcd(num, den) = 1,
    so the pair is unique for a given variable set.  Variables that cancel
    are dropped from the context, which makes the printed form canonical.
    """

    __slots__ = ("num", "den", "_names")

    def __init__(self, value=0):
        if isinstance(value, RatFunc):
            self.num, self.den, self._names = value.num, value.den, value._names
            return
        value = Fraction(value)
        self._names = ()
        self.num = _EMPTY.constant(value.numerator)
        self.den = _EMPTY.constant(value.denominator)

    @classmethod
    def _raw(cls, num, den, names: tuple) -> "RatFunc":
        r = object.__new__(cls)
        r.num, r.den, r._names = num, den, names
        return r

    @classmethod
    def from_polys(cls, num, den, names: tuple) -> "RatFunc":
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            return ZERO
        if not den.is_one():
            g = num.gcd(den)
            if not g.is_one():
                num = num / g
                den = den / g
            if den.leading_coefficient() < 0:
                num, den = -num, -den
        return cls._raw(num, den, names)._shrink()

    def _shrink(self) -> "RatFunc":
        if not self._names:
            return self
        unused = set(self.num.unused_gens()) & set(self.den.unused_gens())
        if not unused:
            return self
        names = tuple(n for n in self._names if n not in unused)
        return RatFunc._raw(_lift(self.num, names), _lift(self.den, names), names)

    @staticmethod
    def coerce(x) -> "RatFunc":
        return x if isinstance(x, RatFunc) else RatFunc(x)

    def to_data(self) -> dict:
        """Lossless JSON-ready form: variable names and sorted integer terms."""
        terms = lambda p: sorted([[int(x) for x in e], int(c)] for e, c in p.to_dict().items())
        return {"vars": list(self._names), "num": terms(self.num), "den": terms(self.den)}

    @classmethod
    def from_data(cls, data: Mapping) -> "RatFunc":
        names = tuple(data["vars"])
        ctx = _ctx(names)
        poly = lambda ts: ctx.from_dict({tuple(e): c for e, c in ts})
        return cls.from_polys(poly(data["num"]), poly(data["den"]), names)

    def _pair(self, other):
        other = RatFunc.coerce(other)
        if self._names == other._names:
            return self.num, self.den, other.num, other.den, self._names
        names = _union(self._names, other._names)
        return (_lift(self.num, names), _lift(self.den, names),
                _lift(other.num, names), _lift(other.den, names), names)

    # arithmetic
    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        a, b, c, d, names = self._pair(other)
        if b == d:
            return RatFunc.from_polys(a + c, b, names)
        return RatFunc.from_polys(a * d + c * b, b * d, names)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den, self._names)

    def __sub__(self, other):
        return self + (-RatFunc.coerce(other))

    def __rsub__(self, other):
        return RatFunc.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 1:
                return self
            if other == 0:
                return ZERO
        a, b, c, d, names = self._pair(other)
        if b.is_one() and d.is_one():
            num = a * c
            return ZERO if num.is_zero() else RatFunc._raw(num, b, names)._shrink()
        # cross-cancel before multiplying keeps the operands small
        g1 = a.gcd(d)
        g2 = c.gcd(b)
        if not g1.is_one():
            a, d = a / g1, d / g1
        if not g2.is_one():
            c, b = c / g2, b / g2
        num, den = a * c, b * d
        if num.is_zero():
            return ZERO
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return RatFunc._raw(num, den, names)._shrink()

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        num, den = self.den, self.num
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return RatFunc._raw(num, den, self._names)

    def __truediv__(self, other):
        return self * RatFunc.coerce(other).inverse()

    def __rtruediv__(self, other):
        return RatFunc.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return ONE
        return RatFunc._raw(self.num ** n, self.den ** n, self._names)

    # comparison
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFunc(other)
        elif not isinstance(other, RatFunc):
            return NotImplemented
        a, b, c, d, _ = self._pair(other)
        return a * d == b * c

    def __hash__(self):
        return hash(self.canonical())

    def normalize(self) -> "RatFunc":
        return RatFunc.from_polys(self.num, self.den, self._names)

    @property
    def variables(self) -> tuple:
        return self._names

    def is_constant(self) -> bool:
        return not self._names

    def to_fraction(self) -> Fraction:
        if self._names:
            raise ValueError(f"{self} is not a constant")
        return Fraction(int(self.num.leading_coefficient()) if not self.num.is_zero() else 0,
                        int(self.den.leading_coefficient()))

    # substitution and evaluation
    def terms(self):
        return list(self.num.terms()), list(self.den.terms())

    def subs(self, mapping: Mapping[str, object]) -> "RatFunc":
        """Substitute variables (internal generator names) by scalars."""
        mapping = {k: RatFunc.coerce(v) for k, v in mapping.items() if k in self._names}
        if not mapping:
            return self
        return (_subs_poly(self.num, self._names, mapping)
                / _subs_poly(self.den, self._names, mapping))

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        """Numeric value; ``values`` assigns every internal generator."""
        return _eval_poly(self.num, self._names, values) / _eval_poly(self.den, self._names, values)

    def canonical(self) -> str:
        n = _fmt_poly(self.num, self._names)
        if self.den.is_one():
            return n
        d = _fmt_poly(self.den, self._names)
        return f"({n})/({d})"

    def __str__(self):
        return self.canonical()

    def __repr__(self):
        return f"RatFunc({self.canonical()!r})"


def _subs_poly(p, names, mapping) -> RatFunc:
    total = ZERO
    for exps, c in p.terms():
        term = RatFunc(int(c))
        rest = {}
        for name, e in zip(names, exps):
            if not e:
                continue
            if name in mapping:
                term = term * mapping[name] ** int(e)
            else:
                rest[name] = int(e)
        if rest:
            term = term * monomial(rest)
        total = total + term
    return total


def _eval_poly(p, names, values) -> complex:
    total = 0
    for exps, c in p.terms():
        term = complex(int(c))
        for name, e in zip(names, exps):
            if e:
                term *= values[name] ** int(e)
        total += term
    return total


def _fmt_var(name: str, e) -> str:
    e = int(e)
    if name == "q" or name.startswith("t."):
        base = "q" if name == "q" else "t[" + name[2:] + "]"
        ex = Fraction(e, 2)
    elif name.startswith("w."):
        base = "w[" + name[2:].replace(".", ",") + "]"
        ex = Fraction(e)
    else:
        base, ex = name, Fraction(e)
    if ex == 1:
        return base
    return f"{base}^{ex}" if ex.denominator == 1 else f"{base}^({ex})"


def _fmt_poly(p, names) -> str:
    if p.is_zero():
        return "0"
    out = []
    for exps, c in p.terms():
        c = int(c)
        mono = "*".join(_fmt_var(n, e) for n, e in zip(names, exps) if e)
        if not mono:
            s = str(abs(c))
        elif abs(c) == 1:
            s = mono
        else:
            s = f"{abs(c)}*{mono}"
        if not out:
            out.append(("-" if c < 0 else "") + s)
        else:
            out.append((" - " if c < 0 else " + ") + s)
    return "".join(out)


ZERO = RatFunc._raw(_EMPTY.constant(0), _EMPTY.constant(1), ())
ONE = RatFunc._raw(_EMPTY.constant(1), _EMPTY.constant(1), ())


def monomial(exps: Mapping[str, int], coeff: int = 1) -> RatFunc:
    """Laurent monomial in internal generators; negative exponents allowed."""
    exps = {k: int(v) for k, v in exps.items() if v}
    if not exps:
        return RatFunc(coeff)
    names = tuple(sorted(exps))
    ctx = _ctx(names)
    up = tuple(max(exps[n], 0) for n in names)
    down = tuple(max(-exps[n], 0) for n in names)
    num = ctx.from_dict({up: coeff})
    den = ctx.from_dict({down: 1})
    return RatFunc._raw(num, den, names)._shrink()


def laurent(terms: Mapping[tuple, int], names: tuple) -> RatFunc:
    """Laurent polynomial from {exponent tuple: integer coefficient}."""
    terms = {k: v for k, v in terms.items() if v}
    if not terms:
        return ZERO
    names = tuple(names)
    low = [min(k[i] for k in terms) for i in range(len(names))]
    shift = tuple(-min(x, 0) for x in low)
    ctx = _ctx(names)
    num = ctx.from_dict({tuple(k[i] + shift[i] for i in range(len(names))): v
                         for k, v in terms.items()})
    den = ctx.from_dict({shift: 1})
    return RatFunc.from_polys(num, den, names)


def var(name: str) -> RatFunc:
    """A plain variable such as ``k`` (kappa) or ``z``.  For q use ``qpow``."""
    if name == "q" or name.startswith(("t.", "w.")):
        raise ValueError(f"{name!r} is reserved; use qpow")
    return monomial({name: 1})


KAPPA = "k"


def kappa() -> RatFunc:
    return var(KAPPA)


# ---------------------------------------------------------------- weights

class Weight:
    """Integer plus an integer combination of formal weight symbols.

    Fractional coefficients are allowed so that halves of weights can be
    formed, but ``qpow`` requires the result to land on half-integers.
    """

    __slots__ = ("const", "terms")

    def __init__(self, const=0, terms: Mapping[str, object] | None = None):
        self.const = Fraction(const)
        self.terms = tuple(sorted((k, Fraction(v)) for k, v in (terms or {}).items() if v))

    @classmethod
    def formal(cls, name: str) -> "Weight":
        if "." in name:
            raise ValueError("weight symbols may not contain '.'")
        return cls(0, {name: 1})

    @staticmethod
    def coerce(x) -> "Weight":
        return x if isinstance(x, Weight) else Weight(x)

    def _dict(self):
        return dict(self.terms)

    def __add__(self, other):
        other = Weight.coerce(other)
        d = self._dict()
        for k, v in other.terms:
            d[k] = d.get(k, 0) + v
        return Weight(self.const + other.const, d)

    __radd__ = __add__

    def __neg__(self):
        return Weight(-self.const, {k: -v for k, v in self.terms})

    def __sub__(self, other):
        return self + (-Weight.coerce(other))

    def __rsub__(self, other):
        return Weight.coerce(other) - self

    def __mul__(self, c):
        c = Fraction(c)
        return Weight(self.const * c, {k: v * c for k, v in self.terms})

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / Fraction(c))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Weight(other)
        if not isinstance(other, Weight):
            return NotImplemented
        return self.const == other.const and self.terms == other.terms

    def __hash__(self):
        return hash((self.const, self.terms))

    def is_integer(self) -> bool:
        return not self.terms and self.const.denominator == 1

    def __int__(self):
        if not self.is_integer():
            raise ValueError(f"weight {self} is not an integer")
        return int(self.const)

    def symbols(self) -> tuple:
        return tuple(k for k, _ in self.terms)

    def substitute(self, values: Mapping[str, int]) -> "Weight":
        out = Weight(self.const)
        for k, v in self.terms:
            out = out + (Weight(values[k] * v) if k in values else Weight(0, {k: v}))
        return out

    def __str__(self):
        parts = []
        for k, v in self.terms:
            parts.append(k if v == 1 else f"-{k}" if v == -1 else f"{v}*{k}")
        if self.const or not parts:
            parts.append(str(self.const))
        return "+".join(parts).replace("+-", "-")

    __repr__ = __str__


def _half_exponent(x: Fraction, what) -> int:
    twice = 2 * x
    if twice.denominator != 1:
        raise ValueError(f"q-exponent {what} is not a half-integer")
    return int(twice)


def qpow(x) -> RatFunc:
    """q^x for an integer, half-integer or formal weight x."""
    x = Weight.coerce(x)
    exps = {"q": _half_exponent(x.const, x)}
    for k, v in x.terms:
        exps["t." + k] = _half_exponent(v, x)
    return monomial(exps)


def qpow_product(a, b, scale=Fraction(1, 2)) -> RatFunc:
    """q^{scale*a*b} for weights a, b; quadratic formal terms use pair symbols."""
    a, b = Weight.coerce(a), Weight.coerce(b)
    scale = Fraction(scale)
    lin = a.const * b * scale + Weight(0, {k: v * b.const * scale for k, v in a.terms})
    out = qpow(lin)
    quad: dict = {}
    for k1, v1 in a.terms:
        for k2, v2 in b.terms:
            key = tuple(sorted((k1, k2)))
            quad[key] = quad.get(key, 0) + v1 * v2 * scale * 2
    exps = {}
    for (k1, k2), c in quad.items():
        # generator w.k1.k2 stands for q^{k1*k2/2}
        if c.denominator != 1:
            raise ValueError("quadratic q-exponent is not a half-integer multiple")
        if c:
            exps[f"w.{k1}.{k2}"] = int(c)
    return out * monomial(exps) if exps else out


def specialize_weights(x: RatFunc, values: Mapping[str, int]) -> RatFunc:
    """Substitute integer values for formal weight symbols."""
    mapping = {}
    for name in x.variables:
        if name.startswith("t."):
            sym = name[2:]
            if sym in values:
                mapping[name] = qpow(Fraction(values[sym], 2))
        elif name.startswith("w."):
            s1, s2 = name[2:].split(".")
            if s1 in values and s2 in values:
                mapping[name] = qpow(Fraction(values[s1] * values[s2], 2))
            elif s1 in values or s2 in values:
                known, other = (s1, s2) if s1 in values else (s2, s1)
                mapping[name] = qpow(Weight(0, {other: Fraction(values[known], 2)}))
    return x.subs(mapping)


def q_numeric(x: RatFunc, q: complex, weights: Mapping[str, float] | None = None) -> complex:
    """Evaluate at a numeric q (principal branch for q^{1/2} via cmath)."""
    import cmath
    logq = cmath.log(q)
    vals = {"q": cmath.exp(logq / 2)}
    weights = dict(weights or {})
    for name in x.variables:
        if name.startswith("t."):
            vals[name] = cmath.exp(logq * weights[name[2:]] / 2)
        elif name.startswith("w."):
            s1, s2 = name[2:].split(".")
            vals[name] = cmath.exp(logq * weights[s1] * weights[s2] / 2)
    return x.evaluate(vals)


# ---------------------------------------------------------- q-combinatorics

def qnum(x) -> RatFunc:
    """Symmetric q-number (q^x - q^-x)/(q - q^-1) for any weight x."""
    x = Weight.coerce(x)
    if x.is_integer():
        return qint(int(x))
    return (qpow(x) - qpow(-x)) / (qpow(1) - qpow(-1))


@lru_cache(maxsize=None)
def qint(n: int) -> RatFunc:
    """[n] = q^{n-1} + q^{n-3} + ... + q^{1-n}, and [-n] = -[n]."""
    if n < 0:
        return -qint(-n)
    return laurent({(2 * (n - 1 - 2 * j),): 1 for j in range(n)}, ("q",))


@lru_cache(maxsize=None)
def qfact(n: int) -> RatFunc:
    if n < 0:
        raise ValueError("qfact of a negative integer")
    out = ONE
    for j in range(1, n + 1):
        out = out * qint(j)
    return out


def qbinom_bracket(n, k: int) -> RatFunc:
    """[n choose k] with symmetric q-numbers; n may be a formal weight."""
    if isinstance(n, Weight) and not n.is_integer():
        if k < 0:
            raise ValueError("k must be nonnegative")
        out = ONE
        for j in range(k):
            out = out * qnum(n - j)
        return out / qfact(k)
    n = int(n)
    if not 0 <= k <= n:
        raise ValueError(f"q-binomial needs 0 <= k <= n, got n={n}, k={k}")
    return qfact(n) / (qfact(k) * qfact(n - k))


@lru_cache(maxsize=None)
def _round_poly(n: int, k: int, step: int) -> RatFunc:
    # Gaussian binomial in b = q^step via Pascal's rule; entries are {b-degree: int}
    table = {(0, 0): {0: 1}}
    for m in range(1, n + 1):
        for j in range(m + 1):
            acc: dict = {}
            if j <= m - 1:
                for d, c in table[(m - 1, j)].items():
                    acc[d + j] = acc.get(d + j, 0) + c
            if j >= 1:
                for d, c in table[(m - 1, j - 1)].items():
                    acc[d] = acc.get(d, 0) + c
            table[(m, j)] = acc
    poly = table[(n, k)]
    return laurent({(2 * step * d,): c for d, c in poly.items()}, ("q",))


def qbinom_round(n: int, k: int, base: str = "q") -> RatFunc:
    """Gaussian binomial from (n)_b = (b^n - 1)/(b - 1), with b = q or q^2."""
    if not 0 <= k <= n:
        raise ValueError(f"q-binomial needs 0 <= k <= n, got n={n}, k={k}")
    step = {"q": 1, "q2": 2, "q^2": 2}.get(base)
    if step is None:
        raise ValueError(f"base must be 'q' or 'q2', got {base!r}")
    return _round_poly(n, k, step)


@lru_cache(maxsize=None)
def partition_count(n: int) -> int:
    """Number of partitions of n; negative n gives 0."""
    if n < 0:
        return 0
    # Euler's pentagonal recurrence
    total = 1 if n == 0 else 0
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        if g1 > n:
            break
        sign = 1 if k % 2 else -1
        total += sign * partition_count(n - g1)
        g2 = k * (3 * k + 1) // 2
        if g2 <= n:
            total += sign * partition_count(n - g2)
        k += 1
    return total


def partitions(n: int, max_part: int | None = None) -> list[tuple]:
    """Partitions of n as nonincreasing tuples, in reverse lexicographic order."""
    if max_part is None:
        max_part = n
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return out


# ------------------------------------------------------- truncated series

class LaurentSeries:
    """Truncated series z^offset * sum_d c_d z^d with d < order.

    The offset is a RatFunc (it may be fractional or involve kappa) and adds
    under multiplication; coefficients at degree >= order are unknown.
    """

    __slots__ = ("var", "offset", "coeffs", "order")

    def __init__(self, var: str, coeffs: Mapping[int, object], order: int, offset=0):
        self.var = var
        self.offset = RatFunc.coerce(offset)
        self.order = order
        self.coeffs = {d: RatFunc.coerce(c) for d, c in coeffs.items()
                       if d < order and not RatFunc.coerce(c).is_zero()}

    def coefficient(self, d: int) -> RatFunc:
        if d >= self.order:
            raise ValueError(f"degree {d} is beyond the truncation order {self.order}")
        return self.coeffs.get(d, ZERO)

    def _check(self, other):
        if other.var != self.var:
            raise ValueError("series in different variables")

    def __add__(self, other: "LaurentSeries"):
        self._check(other)
        if other.offset != self.offset:
            raise ValueError("cannot add series with different offsets")
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out.get(d, ZERO) + c
        return LaurentSeries(self.var, out, order, self.offset)

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            return LaurentSeries(self.var, {d: c * other for d, c in self.coeffs.items()},
                                 self.order, self.offset)
        self._check(other)
        lo_a = min(self.coeffs, default=self.order)
        lo_b = min(other.coeffs, default=other.order)
        order = min(self.order + lo_b, other.order + lo_a)
        out: dict = {}
        for d1, c1 in self.coeffs.items():
            for d2, c2 in other.coeffs.items():
                if d1 + d2 < order:
                    out[d1 + d2] = out.get(d1 + d2, ZERO) + c1 * c2
        return LaurentSeries(self.var, out, order, self.offset + other.offset)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        order = min(self.order, other.order)
        keys = {d for d in set(self.coeffs) | set(other.coeffs) if d < order}
        return (self.var == other.var and self.offset == other.offset
                and all(self.coefficient(d) == other.coefficient(d) for d in keys))

    def __repr__(self):
        body = " + ".join(f"({c})*{self.var}^{d}" for d, c in sorted(self.coeffs.items()))
        return f"{self.var}^({self.offset}) * [{body or '0'}] + O({self.var}^{self.order})"


# ----------------------------------------------- randomized specialization

def random_point(variables: Iterable[str], seed: int = 0) -> dict:
    """Distinct prime-power rationals for each variable, reproducible by seed."""
    rng = random.Random(seed)
    primes = [p for p in range(3, 400) if all(p % d for d in range(2, int(p ** 0.5) + 1))]
    rng.shuffle(primes)
    out = {}
    for i, name in enumerate(sorted(variables)):
        p = primes[i % len(primes)]
        out[name] = Fraction(p ** rng.randint(1, 2), rng.choice([1, 2, 5, 7, 11]))
    return out


def specialize(x: RatFunc, point: Mapping[str, Fraction]) -> Fraction:
    """Exact value of x at a rational point (raises on a pole)."""
    def ev(p):
        total = Fraction(0)
        for exps, c in p.terms():
            term = Fraction(int(c))
            for name, e in zip(x.variables, exps):
                if e:
                    term *= point[name] ** int(e)
            total += term
        return total
    den = ev(x.den)
    if den == 0:
        raise ZeroDivisionError("specialization hits a pole")
    return ev(x.num) / den
