"""Floating-point checks of the multivalued correlators at generic numeric kappa.

Multivalued products Prod (c_p (x - p))^{e_p} are continued along explicit
paths by transporting each factor's argument continuously from sample to
sample; principal values are used only to seed the starting sheet.
Contour integrals use composite Gauss-Legendre panels and are reported with an
a-posteriori error estimate (difference against a doubled panel count).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

SQRT2 = math.sqrt(2.0)
E = math.e
DEFAULT_KAPPAS = (SQRT2, E)
MAX_STEP = math.pi / 2


class ResolutionError(RuntimeError):
    """A tracked argument jumped too far between samples."""


class QuadratureError(RuntimeError):
    def __init__(self, estimate: float, tol: float):
        self.estimate = estimate
        super().__init__(f"quadrature did not converge: error estimate {estimate:.3g} > {tol:.3g}")


def check_kappa(kappa) -> float:
    """Refuse rational or near-rational kappa (small denominators)."""
    if isinstance(kappa, (int, Fraction)):
        raise ValueError("kappa must be irrational; rational values are refused")
    k = float(kappa)
    if not math.isfinite(k) or k <= 0:
        raise ValueError("kappa must be a positive real number")
    for den in range(1, 65):
        if abs(k * den - round(k * den)) < 1e-9 * den:
            raise ValueError(f"kappa={k} is (numerically) rational with denominator {den}; refused")
    return k


def q_of(kappa: float) -> complex:
    return cmath.exp(1j * math.pi / kappa)


# ------------------------------------------------------------- branches

def unwrap_step(prev_arg: float, value: complex) -> float:
    """Argument of ``value`` on the sheet continuous with ``prev_arg``."""
    a = cmath.phase(value)
    k = round((prev_arg - a) / (2 * math.pi))
    new = a + 2 * math.pi * k
    if abs(new - prev_arg) > MAX_STEP:
        raise ResolutionError(f"argument jump {abs(new - prev_arg):.3f} rad; refine the sampling")
    return new


@dataclass
class BranchedFunction:
    """Prod_i (c_i (x_{a_i} - x_{b_i}))^{e_i} over moving points x_j.

    ``factors`` holds (a, b, c, e); ``args`` the current sheet of every factor.
    """
    factors: list
    points: list
    args: list = field(default_factory=list)

    def __post_init__(self):
        if not self.args:
            self.args = [cmath.phase(self._base(f, self.points)) for f in self.factors]

    @staticmethod
    def _base(f, pts) -> complex:
        a, b, c, _ = f
        return c * (pts[a] - pts[b])

    def value(self) -> complex:
        out = 1 + 0j
        for f, arg in zip(self.factors, self.args):
            w = self._base(f, self.points)
            out *= cmath.exp(f[3] * complex(math.log(abs(w)), arg))
        return out

    def move(self, path, samples: int = 2000) -> "BranchedFunction":
        """Continue along ``path(t) -> points`` for t in [0, 1]."""
        if samples < 1000:
            raise ValueError("use at least 10^3 path samples")
        args = list(self.args)
        pts = self.points
        for i in range(1, samples + 1):
            pts = path(i / samples)
            for j, f in enumerate(self.factors):
                args[j] = unwrap_step(args[j], self._base(f, pts))
        return BranchedFunction(self.factors, list(pts), args)


def half_turn(z: complex, w: complex, turns: float = 1.0):
    """The exchange paths: both points rotate about their midpoint by pi * turns * t."""
    m = (z + w) / 2

    def path(t):
        ph = cmath.exp(1j * math.pi * turns * t)
        return [m + (z - w) / 2 * ph, m + (w - z) / 2 * ph]
    return path


def monodromy_phase(lam, mu, kappa, samples: int = 2000, loops: int = 1,
                    z: complex = 2.0, w: complex = 1.0) -> complex:
    """Continued <X(lam, z) X(mu, w)> over the swapped-order correlator.

    The two-point matrix element is (z - w)^{lam mu / 2 kappa}; after the
    exchange the swapped correlator is evaluated at its own principal sheet.
    """
    k = check_kappa(kappa)
    e = lam * mu / (2 * k)
    f = BranchedFunction([(0, 1, 1, e)], [complex(z), complex(w)])
    g = f.move(half_turn(complex(z), complex(w), loops), samples * loops)
    zf, wf = g.points
    if loops % 2:
        swapped = cmath.exp(e * cmath.log(wf - zf))
    else:
        swapped = cmath.exp(e * cmath.log(zf - wf))
    return g.value() / swapped


def expected_phase(lam, mu, kappa, loops: int = 1) -> complex:
    """q^{lam mu / 2} per half turn, q = exp(i pi / kappa)."""
    return cmath.exp(1j * math.pi * lam * mu / (2 * kappa) * loops)


# ------------------------------------------------------------- quadrature

_GL = {}


def _gauss(n: int):
    if n not in _GL:
        _GL[n] = np.polynomial.legendre.leggauss(n)
    return _GL[n]


@dataclass
class Piece:
    kind: str            # "seg" or "arc"
    a: complex           # seg start / arc centre
    b: complex           # seg end / unused
    radius: float = 0.0
    start: float = 0.0   # arc start angle
    sweep: float = 0.0   # arc signed sweep

    def at(self, s: np.ndarray):
        if self.kind == "seg":
            return self.a + (self.b - self.a) * s, np.full_like(s, self.b - self.a, dtype=complex)
        ang = self.start + self.sweep * s
        pos = self.a + self.radius * np.exp(1j * ang)
        return pos, 1j * self.sweep * self.radius * np.exp(1j * ang)

    def reversed(self) -> "Piece":
        if self.kind == "seg":
            return Piece("seg", self.b, self.a)
        return Piece("arc", self.a, self.b, self.radius, self.start + self.sweep, -self.sweep)

    def length(self) -> float:
        return abs(self.b - self.a) if self.kind == "seg" else abs(self.sweep) * self.radius


def _integrate(pieces: Sequence[Piece], sing: Sequence[complex], exps: Sequence[float],
               coefs: Sequence[complex], args: list[float], panels_per_unit: float,
               order: int = 16) -> tuple[complex, list[float]]:
    """Integral of Prod (c_p (x - p))^{e_p} dx with sheets transported along the pieces."""
    nodes, weights = _gauss(order)
    s_nodes = (nodes + 1) / 2
    total = 0j
    args = list(args)
    sing = np.asarray(sing, dtype=complex)
    exps = np.asarray(exps, dtype=float)
    coefs = np.asarray(coefs, dtype=complex)
    for pc in pieces:
        npan = max(4, int(math.ceil(pc.length() * panels_per_unit)))
        for k in range(npan):
            s = (k + s_nodes) / npan
            pos, dpos = pc.at(s)
            # transport arguments node by node (panel start, nodes, panel end)
            ss = np.concatenate(([k / npan], s, [(k + 1) / npan]))
            pts, _ = pc.at(ss)
            vals = coefs[None, :] * (pts[:, None] - sing[None, :])
            phases = np.angle(vals)
            cur = np.array(args)
            track = np.empty_like(phases)
            for r in range(len(ss)):
                kk = np.round((cur - phases[r]) / (2 * math.pi))
                new = phases[r] + 2 * math.pi * kk
                if np.any(np.abs(new - cur) > MAX_STEP):
                    raise ResolutionError("argument jump along a contour; increase the panel density")
                track[r] = new
                cur = new
            args = list(cur)
            logs = np.log(np.abs(vals[1:-1])) + 1j * track[1:-1]
            integrand = np.exp(logs @ exps) * dpos
            total += np.sum(weights / 2 * integrand) / npan
    return total, args


def contour_integral(pieces, sing, exps, coefs, args, tol: float = 1e-10) -> tuple[complex, float]:
    """Integral with an error estimate from doubling the panel density."""
    dens = 8.0
    prev, _ = _integrate(pieces, sing, exps, coefs, args, dens)
    for _ in range(6):
        dens *= 2
        cur, _ = _integrate(pieces, sing, exps, coefs, args, dens)
        err = abs(cur - prev)
        if err <= tol * max(1.0, abs(cur)):
            return cur, err
        prev = cur
    raise QuadratureError(err, tol)


# ------------------------------------------------------------ contours

def _tail_and_loop(base: complex, via: Sequence[complex], p: complex, r: float, sign: int) -> list[Piece]:
    """Go from ``base`` through ``via`` towards ``p``, circle p once (sign = +1
    counterclockwise) at radius r, and come back."""
    verts = [base] + list(via) + [p]
    last = verts[-2]
    stop = p + r * (last - p) / abs(last - p)
    path = [Piece("seg", verts[i], verts[i + 1]) for i in range(len(verts) - 2)]
    path.append(Piece("seg", last, stop))
    ang = cmath.phase(stop - p)
    circle = Piece("arc", p, 0j, r, ang, sign * 2 * math.pi)
    back = [pc.reversed() for pc in reversed(path)]
    return path + [circle] + back


def _inverse(loop: list[Piece]) -> list[Piece]:
    return [pc.reversed() for pc in reversed(loop)]


def pochhammer(loop1: list[Piece], loop2: list[Piece]) -> list[Piece]:
    """loop1 loop2 loop1^-1 loop2^-1 (traversed left to right)."""
    return loop1 + loop2 + _inverse(loop1) + _inverse(loop2)


# ----------------------------------------------------------- s = 1 cycles

def beta_interval(a: float, b: float, z: float = 1.0) -> float:
    """Int_0^z x^a (z - x)^b dx by Gauss-Legendre after smoothing substitutions.

    Each half is mapped with x = (z/2) v^n, n an integer large enough that
    the endpoint power v^{n(a+1)-1} is many times differentiable; a composite
    rule over eight panels then resolves the layer near v = 1.
    """
    if a <= -1 or b <= -1:
        raise ValueError("interval integral diverges; exponents must exceed -1")
    nodes, weights = _gauss(32)
    panels = 8
    v = ((nodes[None, :] + 1) / 2 + np.arange(panels)[:, None]).ravel() / panels
    weights = np.tile(weights, panels) / panels

    def half(p, q):
        # Int_0^{z/2} x^p (z - x)^q dx with x = (z/2) v^n
        n = max(1, math.ceil(12 / (p + 1)))
        x = (z / 2) * v ** n
        vals = (z / 2) ** (p + 1) * n * v ** (n * (p + 1) - 1) * (z - x) ** q
        return float(np.sum(weights / 2 * vals))
    return half(a, b) + half(b, a)


def beta_closed(a: float, b: float, z: float = 1.0) -> float:
    return z ** (a + b + 1) * math.gamma(a + 1) * math.gamma(b + 1) / math.gamma(a + b + 2)


def pochhammer_s1(lam, mu, kappa, z: float = 1.0, s: int = 1, first: str = "z",
                  radius: float | None = None) -> tuple[complex, float]:
    """Int over the Pochhammer cycle around {0, z} of x^a (z - x)^b dx,
    a = -lam/kappa, b = -mu/kappa; the sheet is real positive at x = z/2.

    ``first`` selects which point's loop is traversed first.  s = 0 returns
    the free two-point value z^{lam mu / 2 kappa}.  Returns (value, error).
    """
    k = check_kappa(kappa)
    if s == 0:
        return cmath.exp(lam * mu / (2 * k) * math.log(z)), 0.0
    if s != 1:
        raise ValueError("only s <= 1 cycles are supported")
    a, b = -lam / k, -mu / k
    r = radius or z / 4
    base = complex(z / 2)
    loop0 = _tail_and_loop(base, [], 0j, r, 1)
    loopz = _tail_and_loop(base, [], complex(z), r, 1)
    cyc = pochhammer(loop0, loopz) if first == "0" else pochhammer(loopz, loop0)
    return contour_integral(cyc, [0j, complex(z)], [a, b], [1, -1], [0.0, 0.0])


def deficiency_factor(a: float, b: float) -> complex:
    return (1 - cmath.exp(2j * math.pi * a)) * (1 - cmath.exp(2j * math.pi * b))


# ------------------------------------------------ braiding on s = 1 blocks

@dataclass
class _Config:
    """Physical points 0 < z1 < z2 and the rotated frame x = m + d e^{i pi t} y."""
    z1: float
    z2: float

    @property
    def m(self):
        return (self.z1 + self.z2) / 2

    @property
    def d(self):
        return (self.z2 - self.z1) / 2

    @property
    def R(self):
        return self.m / self.d


def _block_integral(channel: str, y_origin: complex, weights, kappa: float,
                    origin_arg: float, c: float = 0.5) -> tuple[complex, float]:
    """Frame integral Int Prod (y - y_p)^{-w_p/kappa} dy over the channel cycle.

    Points: y_origin (weight w0), -1 (w1), +1 (w2).  Channel "inner" is the
    Pochhammer cycle of y_origin and -1; channel "outer" is the Pochhammer
    cycle of +1 with the cluster {y_origin, -1}.  Tails run through the base
    point i c; ``origin_arg`` is the sheet of (i c - y_origin).
    """
    w0, w1, w2 = weights
    base = complex(0, c)
    sing = [y_origin, -1 + 0j, 1 + 0j]
    exps = [-w0 / kappa, -w1 / kappa, -w2 / kappa]
    args = [origin_arg, cmath.phase(base + 1), cmath.phase(base - 1)]
    r_o = min(0.5, (abs(y_origin) - 1) / 2)
    loop_o = _tail_and_loop(base, [], y_origin, r_o, 1)
    loop_a = _tail_and_loop(base, [], -1 + 0j, 0.25, 1)
    if channel == "inner":
        cyc = pochhammer(loop_o, loop_a)
    elif channel == "outer":
        loop_b = _tail_and_loop(base, [], 1 + 0j, 0.25, 1)
        cyc = pochhammer(loop_b, loop_o + loop_a)
    else:
        raise ValueError(channel)
    return contour_integral(cyc, sing, exps, [1, 1, 1], args)


def screened_block(channel: str, weights, kappa: float, cfg: _Config, t: float = 0.0,
                   samples: int = 1000) -> tuple[complex, float]:
    """Leading matrix element of a composite of two intertwiners with one
    screening, at points (0, z1, z2) carrying ``weights``, continued along the
    exchange of z1 and z2 up to time t (t = 0: standard sheet)."""
    w0, w1, w2 = weights
    k = kappa
    c = 0.5
    # origin in the rotated frame: y0(t) = -(m/d) e^{-i pi t}
    R = cfg.R
    y0 = lambda u: -R * cmath.exp(-1j * math.pi * u)
    origin_arg = cmath.phase(complex(0, c) - y0(0))
    n = max(samples, int(samples * t)) if t else 0
    for i in range(1, n + 1):
        origin_arg = unwrap_step(origin_arg, complex(0, c) - y0(t * i / n))
    J, err = _block_integral(channel, y0(t), weights, k, origin_arg, c)
    # frame factor (d e^{i pi t})^{E + 1}, E = total integrand exponent
    E_tot = -(w0 + w1 + w2) / k
    frame = cmath.exp((E_tot + 1) * complex(math.log(cfg.d), math.pi * t))
    # prefactors (x_A - 0), (x_B - 0), (x_B - x_A), transported along the exchange
    m, d = cfg.m, cfg.d
    xa = lambda u: m - d * cmath.exp(1j * math.pi * u)
    xb = lambda u: m + d * cmath.exp(1j * math.pi * u)
    f = BranchedFunction([(1, 0, 1, w0 * w1 / (2 * k)), (2, 0, 1, w0 * w2 / (2 * k)),
                          (2, 1, 1, w1 * w2 / (2 * k))], [0j, xa(0), xb(0)])
    if t:
        f = f.move(lambda u: [0j, xa(t * u), xb(t * u)], max(samples, 1000))
    total = f.value() * frame * J
    return total, abs(f.value() * frame) * err


@dataclass
class FockBraidReport:
    kappa: float
    channels: list
    numeric: list           # M[rho][xi]
    expected: list          # B^V at q = exp(i pi / kappa)
    gauge: complex          # M_{rho xi} / B_{rho xi} off the diagonal
    residual: float
    fit_residual: float
    error_estimate: float

    @property
    def ok(self) -> bool:
        return self.residual < 1e-5


def braid_check_fock_numeric(lams=(1, 1, 1, 1), kappa: float = SQRT2,
                             configs=((1.0, 2.0), (1.0, 3.0), (2.0, 3.0))) -> FockBraidReport:
    """Exchange the screened composites at z1 < z2 and expand them in the
    exchanged composites; compare with B^V up to the channel normalization.

    Channels rho = l1 + l2 (screening attached to the outer vertex) and
    rho = l1 + l2 - 2 (screening in the inner vertex).
    """
    from .braid import braiding_matrix

    k = check_kappa(kappa)
    l0, l1, l2, l3 = lams
    if l1 + l2 + l3 - l0 != 2:
        raise ValueError("supported: a single screening in total (l1 + l2 + l3 - l0 = 2)")
    bm = braiding_matrix(lams, "V")
    # rho = l1 + l2: screening attached to the outer vertex; rho = l1 + l2 - 2: inner
    chans = ["outer" if int(r) == l1 + l2 else "inner" for r in bm.rhos]
    xchans = ["outer" if int(x) == l1 + l3 else "inner" for x in bm.xis]
    if len(chans) != 2 or len(xchans) != 2:
        raise ValueError("both channels must be admissible")
    lhs_rows, rhs_rows, errs = [], [], []
    for z1, z2 in configs:
        cfg = _Config(z1, z2)
        lhs, rhs = [], []
        for ch, xch in zip(chans, xchans):
            v, e = screened_block(ch, (l1, l2, l3), k, cfg, t=1.0)
            lhs.append(v)
            errs.append(e)
            v, e = screened_block(xch, (l1, l3, l2), k, cfg, t=0.0)
            rhs.append(v)
            errs.append(e)
        lhs_rows.append(lhs)
        rhs_rows.append(rhs)
    # least squares: lhs[c][rho] = Sum_xi M[rho][xi] rhs[c][xi]
    A = np.array(rhs_rows)
    M = np.linalg.lstsq(A, np.array(lhs_rows), rcond=None)[0].T
    fit = float(np.max(np.abs(A @ M.T - np.array(lhs_rows))))
    qh = cmath.exp(1j * math.pi / (2 * k))
    B = np.array([[x.evaluate({"q": qh}) for x in row] for row in bm.entries])
    gauge = M[0][1] / B[0][1]
    if l2 == l3:
        # one normalization on both sides: diagonal and off-diagonal product are invariant
        res = max(abs(M[0][0] - B[0][0]), abs(M[1][1] - B[1][1]),
                  abs(M[0][1] * M[1][0] - B[0][1] * B[1][0]))
    else:
        # independent row and column normalizations: only the cross ratio is invariant
        res = abs(M[0][0] * M[1][1] / (M[0][1] * M[1][0]) - B[0][0] * B[1][1] / (B[0][1] * B[1][0]))
    return FockBraidReport(k, [str(r) for r in bm.rhos], M.tolist(), B.tolist(), gauge,
                           float(res), fit, float(max(errs)))
