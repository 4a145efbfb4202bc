"""Command-line driver: runs groups of exact and numeric checks and writes a
schema-versioned JSON report.  Exit status 0 iff every check passes."""
from __future__ import annotations

import argparse
import configparser
import fcntl
import hashlib
import itertools
import json
import os
import random
import sys
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

SCHEMA_VERSION = 1
VERSION = "0.1.0"
COMMANDS = ("uq-relations", "intertwiners", "braiding", "chains", "virasoro", "screening",
            "correlators", "brst", "cohomology", "slq2")
CONFIG_KEYS = ("command", "level", "lambda", "kappa", "seed", "cache", "out")


class ConfigError(ValueError):
    pass


# ------------------------------------------------------------------ config

@dataclass
class RunConfig:
    command: str
    level: int | None = None
    lambdas: tuple | None = None
    kappa: str = "formal"
    seed: int = 0
    cache: str | None = None
    out: str | None = None

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS + ("all",):
            raise ConfigError(f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}, all")
        if self.level is not None and self.level < 0:
            raise ConfigError("--level must be nonnegative")
        if self.kappa != "formal":
            self.kappa_values()
        return self

    def kappa_values(self) -> tuple:
        from .corr import DEFAULT_KAPPAS, check_kappa
        if self.kappa == "formal":
            return DEFAULT_KAPPAS
        if "/" in self.kappa:
            raise ConfigError(f"kappa {self.kappa} is rational; numeric mode needs an irrational value")
        try:
            value = float(self.kappa)
        except ValueError:
            raise ConfigError(f"kappa must be 'formal' or a decimal, got {self.kappa!r}") from None
        try:
            return (check_kappa(value),)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def echo(self) -> dict:
        return {"command": self.command, "level": self.level,
                "lambda": None if self.lambdas is None else list(self.lambdas),
                "kappa": self.kappa, "seed": self.seed}


def parse_lambdas(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"--lambda takes comma-separated integers, got {text!r}") from None


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.read_string("[run]\n" + Path(path).read_text())
    out = dict(parser["run"])
    unknown = set(out) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return out


# ------------------------------------------------------------------- cache

def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


class Cache:
    """Content-addressed JSON store keyed by (schema, operation, inputs);
    entries carry a payload checksum and are rejected when it does not match."""

    def __init__(self, root: str | Path, schema: int = SCHEMA_VERSION):
        self.root = Path(root)
        self.schema = schema
        self.hits = self.misses = self.rejected = 0
        self.root.mkdir(parents=True, exist_ok=True)

    def key(self, op: str, inputs) -> str:
        return _digest({"schema": self.schema, "op": op, "inputs": inputs})

    def path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    @contextmanager
    def _lock(self):
        with open(self.root / ".lock", "a") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def get(self, op: str, inputs):
        path = self.path(self.key(op, inputs))
        with self._lock():
            if not path.exists():
                self.misses += 1
                return None
            try:
                blob = json.loads(path.read_text())
                ok = (blob.get("schema") == self.schema and blob.get("op") == op
                      and blob.get("checksum") == _digest(blob.get("payload")))
            except (json.JSONDecodeError, AttributeError):
                ok = False
            if not ok:
                self.rejected += 1
                self.misses += 1
                path.unlink()
                return None
        self.hits += 1
        return blob["payload"]

    def put(self, op: str, inputs, payload) -> None:
        path = self.path(self.key(op, inputs))
        path.parent.mkdir(parents=True, exist_ok=True)
        blob = {"schema": self.schema, "op": op, "inputs": inputs,
                "checksum": _digest(payload), "payload": payload}
        with self._lock():
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(blob, sort_keys=True))
            os.replace(tmp, path)

    def stats(self) -> dict:
        return {"hits": self.hits, "misses": self.misses, "rejected": self.rejected}


def resolve_cache_dir(flag: str | None) -> str:
    if flag:
        return flag
    env = os.environ.get("QVOA_CACHE")
    if env:
        return env
    return str(Path.home() / ".cache" / "qvoa")


# ------------------------------------------------------------------ report

@dataclass
class CheckResult:
    id: str
    anchor: str
    status: str
    witness: str = ""
    wall_time: float = 0.0


@dataclass
class Report:
    command: str
    config: dict
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    cache: dict | None = None

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def summary(self) -> dict:
        out = {"pass": 0, "fail": 0, "skipped": 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    def to_json(self, timing: bool = True) -> str:
        checks = []
        for c in self.checks:
            d = asdict(c)
            if timing:
                d["wall_time"] = round(d["wall_time"], 3)
            else:
                d.pop("wall_time")
            checks.append(d)
        body = {"schema": SCHEMA_VERSION, "version": VERSION, "command": self.command,
                "config": self.config, "checks": checks, "summary": self.summary(),
                "data": self.data}
        if timing and self.cache is not None:
            body["cache"] = self.cache
        return json.dumps(body, sort_keys=True, indent=2) + "\n"


def exact(x) -> str:
    """Exact scalar as a normalized string: 'p/q' for rationals, canonical text otherwise."""
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    from .coeffs import RatFunc
    if isinstance(x, RatFunc) and x.is_constant():
        return str(x.to_fraction())
    return str(x)


def complex_text(z: complex, err: float) -> str:
    return f"({z.real:.15e}, {z.imag:.15e}) +- {err:.3e}"


class Runner:
    def __init__(self, config: RunConfig, cache: Cache | None):
        self.config = config
        self.cache = cache
        self.report = Report(config.command, config.echo())
        self.rng = random.Random(config.seed)

    def check(self, cid: str, anchor: str, fn: Callable[[], tuple]) -> bool:
        from .brst import CapacityError
        from .uq import TruncationError
        t0 = time.perf_counter()
        try:
            passed, witness = fn()
            status = "pass" if passed else "fail"
        except (TruncationError, CapacityError) as exc:
            status, witness = "fail", f"{exc}; raise --level to enlarge the cutoff"
            print(f"{cid}: {witness}", file=sys.stderr)
        self.report.checks.append(CheckResult(cid, anchor, status, str(witness),
                                              time.perf_counter() - t0))
        return status == "pass"


def _first_nonzero(residuals: dict) -> tuple:
    for key, r in residuals.items():
        zero = r.is_zero() if hasattr(r, "is_zero") else not r
        if not zero:
            return False, f"{key}: {r}"
    return True, ""


# ---------------------------------------------------------------- commands

def cmd_uq(run: Runner) -> None:
    from .coeffs import Weight
    from .uq import (GradedVector, ModuleSpec, delta_id_r, id_delta_r, r13_r12, r13_r23,
                     realization_residuals, relation_residuals)
    depth = run.config.level if run.config.level is not None else 8
    lams = run.config.lambdas or (0, 1, 2, 3)
    formal = Weight.formal("l")
    modules = [("verma.formal", ModuleSpec.verma(formal, depth)),
               ("contragredient.formal", ModuleSpec.contragredient(formal, depth))]
    for lam in lams:
        modules.append((f"verma.{lam}", ModuleSpec.verma(lam, depth)))
        modules.append((f"contragredient.{lam}", ModuleSpec.contragredient(lam, depth)))
        if lam >= 0:
            modules.append((f"findim.{lam}", ModuleSpec.findim(lam)))
    for name, spec in modules:
        run.check(f"uq.relations.{name}", "quantum group defining relations",
                  lambda spec=spec: _first_nonzero(relation_residuals(spec)))
    run.check("uq.realization.formal", "polynomial realization of the contragredient module",
              lambda: _first_nonzero(realization_residuals(formal, depth)))
    triple = ModuleSpec.tensor(*(ModuleSpec.findim(1),) * 3)
    vecs = [GradedVector.basis_vector(triple, b) for b in triple.basis()]

    def qt(lhs, rhs):
        bad = [v for v in vecs if lhs(v) != rhs(v)]
        return not bad, str(bad[0]) if bad else ""
    run.check("uq.quasitriangular.id-delta", "quasitriangular property",
              lambda: qt(id_delta_r, r13_r12))
    run.check("uq.quasitriangular.delta-id", "quasitriangular property",
              lambda: qt(delta_id_r, r13_r23))


def cmd_intertwiners(run: Runner) -> None:
    from .braid import (intertwining_residuals, phi_explicit, phi_extend, phi_from_singular,
                        recursion_residuals)
    from .coeffs import Weight
    m_max = run.config.level if run.config.level is not None else 3
    mu, lam = Weight.formal("m"), Weight.formal("l")
    for s in (0, 1, 2):
        nu = mu + lam - 2 * s
        tab = phi_explicit(mu, lam, nu, 2, m_max)
        run.check(f"intertwiners.closed-form.s{s}", "explicit intertwiner",
                  lambda tab=tab: _first_nonzero(intertwining_residuals(tab)))
        run.check(f"intertwiners.recursion.s{s}", "intertwiner recursion",
                  lambda tab=tab: _first_nonzero(recursion_residuals(tab)))

        def singular(tab=tab, nu=nu):
            other = phi_from_singular(mu, lam, nu, 2, m_max)
            diff = {k: tab.coeff(*k) - other.coeff(*k) for k in set(tab.table) | set(other.table)}
            return _first_nonzero(diff)
        run.check(f"intertwiners.from-singular.s{s}", "intertwiner from singular vectors", singular)
    for lam_int in run.config.lambdas or (1, 2):
        if lam_int < 0:
            continue
        for s in range(lam_int + 1):
            nu = mu + lam_int - 2 * s

            def extend(lam_int=lam_int, nu=nu):
                ext = phi_extend(mu, lam_int, nu, lam_int + 1, m_max)
                base = phi_explicit(mu, lam_int, nu, lam_int, m_max)
                diff = {k: ext.coeff(*k) - base.coeff(*k) for k in base.table}
                ok, wit = _first_nonzero(diff)
                if ok:
                    ok, wit = _first_nonzero(intertwining_residuals(ext))
                return ok and ext.weight_conserved(), wit
            run.check(f"intertwiners.extension.l{lam_int}.s{s}", "unique extension of the intertwiner",
                      extend)


def _braid_payload(bm) -> dict:
    return {"rhos": [str(r) for r in bm.rhos], "xis": [str(x) for x in bm.xis],
            "entries": [[x.to_data() for x in row] for row in bm.entries]}


def _braid_from_payload(lams, payload):
    from .braid import BraidMatrix
    from .coeffs import RatFunc, Weight
    return BraidMatrix(tuple(Weight(x) for x in lams), [Weight(int(r)) for r in payload["rhos"]],
                       [Weight(int(x)) for x in payload["xis"]],
                       [[RatFunc.from_data(x) for x in row] for row in payload["entries"]], "V")


def braid_tuples(lams) -> list[tuple]:
    if lams is None:
        return [t for t in itertools.product((1, 2), repeat=4) if (sum(t[1:]) - t[0]) % 2 == 0]
    if len(lams) % 4:
        raise ConfigError("braiding needs --lambda as groups of four weights l0,l1,l2,l3")
    return [tuple(lams[i:i + 4]) for i in range(0, len(lams), 4)]


def cmd_braiding(run: Runner) -> None:
    from .braid import braiding_failures, braiding_matrix, compare_BM_BV
    depth = run.config.level if run.config.level is not None else 1
    cached = {}
    for lams in braid_tuples(run.config.lambdas):
        tag = ",".join(map(str, lams))
        payload = run.cache.get("braiding_matrix_V", list(lams)) if run.cache else None
        if payload is None:
            bm = braiding_matrix(lams, "V")
            if run.cache:
                run.cache.put("braiding_matrix_V", list(lams), _braid_payload(bm))
        else:
            bm = _braid_from_payload(lams, payload)
            cached[lams] = payload
        run.check(f"braiding.identity.{tag}", "braiding matrix as a map identity",
                  lambda bm=bm: (lambda bad: (not bad, "; ".join(bad)))(braiding_failures(bm, depth)))
        run.check(f"braiding.invertible.{tag}", "braiding matrix invertibility",
                  lambda bm=bm: (not bm.det().is_zero(), f"det = {bm.det()}"))

        def formal(lams=lams, bm=bm):
            res = compare_BM_BV(lams, bm)
            return not res["mismatches"], str(res["mismatches"][:2])
        run.check(f"braiding.formal-vs-finite.{tag}", "Verma braiding specializes to the finite one",
                  formal)
    if cached:
        lams = run.rng.choice(sorted(cached))

        def sample(lams=lams):
            fresh = _braid_payload(braiding_matrix(lams, "V"))
            return _digest(fresh) == _digest(cached[lams]), ",".join(map(str, lams))
        run.check("braiding.cache-sample", "cache hits equal recomputation", sample)


def cmd_chains(run: Runner) -> None:
    from .chains import (algebra_E_prime, boundary, c_coefficient, coproduct_F_chain,
                         monodromy, monodromy_via_phi, phi_inverse, phi_map)
    from .coeffs import ZERO, Weight, qpow
    from .uq import GradedVector, ModuleSpec, coproduct_act
    top = run.config.level if run.config.level is not None else 3
    names = ("a", "b", "c")
    for npts in (2, 3):
        ws = [Weight.formal(n) for n in names[:npts]]
        spec = ModuleSpec.tensor(*(ModuleSpec.verma(w, top + 1) for w in ws))
        monos = [GradedVector.basis_vector(spec, occ)
                 for occ in itertools.product(range(top + 1), repeat=npts) if sum(occ) <= top]

        def each(test, monos=monos):
            for v in monos:
                msg = test(v)
                if msg:
                    return False, msg
            return True, ""

        run.check(f"chains.phi-roundtrip.{npts}pt", "chain isomorphism",
                  lambda: each(lambda v: "" if phi_inverse(phi_map(v), top + 1) == v else str(v)))
        run.check(f"chains.coproduct.{npts}pt", "coproduct on chains",
                  lambda: each(lambda v: "" if coproduct_F_chain(phi_map(v)) == phi_map(coproduct_act("F", v))
                               else str(v)))
        run.check(f"chains.boundary.{npts}pt", "boundary as the E-prime action",
                  lambda: each(lambda v: "" if boundary(phi_map(v)) == phi_map(algebra_E_prime(v)) else str(v)))
        for i in range(npts - 1):
            run.check(f"chains.monodromy.{npts}pt.{i}", "monodromy as the R-matrix",
                      lambda i=i: each(lambda v: "" if monodromy(phi_map(v), i) == monodromy_via_phi(phi_map(v), i)
                                       else str(v)))
    lam = Weight.formal("l")

    def recursion():
        for n in range(7):
            for k in range(n + 2):
                lhs = c_coefficient(n + 1, lam, k)
                prev = c_coefficient(n, lam, k) if k <= n else ZERO
                lower = c_coefficient(n, lam, k - 1) if k >= 1 else ZERO
                if lhs != prev - qpow(-2 * lam + 2 * n) * lower:
                    return False, f"n={n} k={k}"
        return True, ""
    run.check("chains.c-coefficient-recursion", "monodromy coefficient recursion", recursion)


def cmd_virasoro(run: Runner) -> None:
    from .coeffs import RatFunc, kappa
    from .fock import (FockSpec, central_charge, conformal_weight, vacuum, virasoro_act,
                       virasoro_bracket_residual)
    from .uq import GradedVector
    cutoff = run.config.level if run.config.level is not None else 6
    k = kappa()
    run.check("virasoro.central-charge", "Feigin-Fuks central charge",
              lambda: (central_charge() == 13 - 6 * (k + 1 / k), str(central_charge())))
    lams = list(run.config.lambdas or (0, 1, 2)) + ["x"]
    for lam in lams:
        spec = FockSpec(lam, 0, cutoff)

        def weight(spec=spec, lam=lam):
            got = virasoro_act(0, vacuum(spec)).entries.get((), RatFunc(0))
            return got == conformal_weight(spec.momentum), str(got)
        run.check(f"virasoro.l0-eigenvalue.{lam}", "conformal weight of the Fock vacuum", weight)

        def bracket(spec=spec):
            for m in range(-3, 4):
                for n in range(-3, 4):
                    for b in spec.basis():
                        if sum(b) + max(0, -m) + max(0, -n) + max(0, -m - n) > cutoff:
                            continue
                        r = virasoro_bracket_residual(m, n, GradedVector(spec, {b: 1}))
                        if not r.is_zero():
                            return False, f"m={m} n={n} on {b}: {r}"
            return True, ""
        run.check(f"virasoro.bracket.{lam}", "Virasoro bracket", bracket)

    def formula():
        for lam in (0, 1, 2, 3, -1):
            want = RatFunc(Fraction(-lam, 2)) + RatFunc(lam * (lam + 2)) / (4 * k)
            if conformal_weight(lam) != want:
                return False, f"lam={lam}: {conformal_weight(lam)}"
        return True, ""
    run.check("virasoro.weight-formula", "conformal weight formula", formula)


def cmd_screening(run: Runner) -> None:
    from .coeffs import partition_count
    from .fock import FockSpec, kernel_Qminus, screening_charge_minus, virasoro_act
    from .uq import GradedVector
    top = run.config.level if run.config.level is not None else 6
    lams = run.config.lambdas or (0, 1, 2, 3)
    spec = FockSpec(1, 0, top - 1)

    def commute():
        for n in range(-2, 3):
            for b in spec.basis():
                if sum(b) + max(0, -n) > top - 1:
                    continue
                v = GradedVector(spec, {b: 1})
                if screening_charge_minus(virasoro_act(n, v)) != virasoro_act(n, screening_charge_minus(v)):
                    return False, f"n={n} on {b}"
        return True, ""
    run.check("screening.commutes-with-virasoro", "screening charge commutes with Virasoro", commute)
    for lam in lams:
        def dims(lam=lam):
            got = [kernel_Qminus(lam, n)[0] for n in range(top + 1)]
            if lam >= 0:
                want = [partition_count(n) - partition_count(n - lam - 1) for n in range(top + 1)]
            else:
                want = [0] * (top + 1)
            return got == want, f"{got} vs {want}"
        run.check(f"screening.kernel-dims.{lam}", "kernel of the screening charge", dims)
    if run.config.lambdas is None:
        for lam in (-1, -2):
            run.check(f"screening.kernel-zero.{lam}", "kernel of the screening charge",
                      lambda lam=lam: (lambda got: (not any(got), str(got)))(
                          [kernel_Qminus(lam, n)[0] for n in range(5)]))


def cmd_correlators(run: Runner) -> None:
    from .corr import (beta_closed, beta_interval, braid_check_fock_numeric, deficiency_factor,
                       expected_phase, monodromy_phase, pochhammer_s1)
    for k in run.config.kappa_values():
        kt = f"{k:.12g}"
        for lam, mu in itertools.product((1, 2), repeat=2):
            def phase(lam=lam, mu=mu, k=k):
                err = abs(monodromy_phase(lam, mu, k) - expected_phase(lam, mu, k))
                return err < 1e-9, f"{err:.3e}"
            run.check(f"correlators.monodromy.{kt}.{lam}{mu}", "braiding phase of vertex operators", phase)

            def poch(lam=lam, mu=mu, k=k):
                val, est = pochhammer_s1(lam, mu, k)
                a, b = -lam / k, -mu / k
                err = abs(val - deficiency_factor(a, b) * beta_closed(a, b))
                return err < 1e-6, complex_text(val, max(err, est))
            run.check(f"correlators.pochhammer.{kt}.{lam}{mu}", "Pochhammer cycle deficiency factor", poch)
        a = -1 / k

        def beta(a=a):
            err = abs(beta_interval(a, a) - beta_closed(a, a))
            return err < 1e-9, f"{err:.3e}"
        run.check(f"correlators.beta-routes.{kt}", "interval integral by quadrature and by Gamma", beta)
        for lams in ((1, 1, 1, 1), (2, 2, 1, 1), (2, 1, 1, 2)):
            def braid(lams=lams, k=k):
                rep = braid_check_fock_numeric(lams, k)
                return rep.ok, f"residual {rep.residual:.3e}"
            run.check(f"correlators.leading-braid.{kt}.{''.join(map(str, lams))}",
                      "leading-element braiding of screened vertex operators", braid)


def cmd_brst(run: Runner) -> None:
    from .brst import (brst_Q, ghost_central_charge, identity_failures, phi0_ghost_coefficient,
                       phi0_state, singular_vector_residuals)
    from .coeffs import kappa
    top = run.config.level if run.config.level is not None else 4
    run.check("brst.ghost-central-charge", "bc ghost central charge",
              lambda: (lambda c: (c == -26, exact(c)))(ghost_central_charge()))
    for lam in run.config.lambdas or (0, 1, 2):
        res = {}

        def failures(lam=lam):
            if lam not in res:
                res[lam] = identity_failures(lam, top)
            return res[lam]
        run.check(f"brst.nilpotent.{lam}", "nilpotency of the BRST operator",
                  lambda f=failures: (not f()["Q^2"], str(f()["Q^2"][:3])))
        run.check(f"brst.b0-homotopy.{lam}", "b_0 contracting homotopy",
                  lambda f=failures: (not f()["{Q,b_0} - L_0"], str(f()["{Q,b_0} - L_0"][:3])))
    run.check("brst.phi0-closed", "ghost-number-zero representative",
              lambda: (brst_Q(phi0_state()).is_zero() and phi0_ghost_coefficient() == -1 / kappa(),
                       exact(phi0_ghost_coefficient())))
    for side, r in singular_vector_residuals().items():
        run.check(f"brst.singular-vector.{'plus' if side > 0 else 'minus'}",
                  "level-two singular vector identity", lambda r=r: (r.is_zero(), str(r)))


def cmd_cohomology(run: Runner) -> None:
    from .brst import EXPECTED_DIMS, GHOST_NUMBERS, cohomology
    dims_out = {}
    for lam in run.config.lambdas or (0, 1, 2):
        depth = run.config.level
        dims = {}
        for gh in GHOST_NUMBERS:
            def one(lam=lam, gh=gh):
                base = cohomology(lam, gh, depth=depth).dim
                wider = cohomology(lam, gh, depth=(depth or lam + 2) + 1).dim
                dims[gh] = base
                return base == EXPECTED_DIMS[gh] and wider == base, f"dim {base}, cutoff+1 gives {wider}"
            run.check(f"cohomology.dim.{lam}.{gh}", "dimensions of the semi-infinite cohomology", one)
        dims_out[str(lam)] = {str(g): d for g, d in sorted(dims.items())}
    run.report.data["cohomology_dims"] = dims_out


def cmd_slq2(run: Runner) -> None:
    from .brst import (associativity_check, commutativity_check, coproduct_checks,
                       slq2_check)
    res = slq2_check()
    for i, c in enumerate(res["relations"]):
        run.check(f"slq2.relation.{i + 1:02d}", "braided exchange relations of the quantum group",
                  lambda c=c: (c.passed, c.witness or c.name))
    for c in res["algebra"]:
        run.check(f"slq2.algebra.{c.name}", "quantum group algebra relations",
                  lambda c=c: (c.passed, c.witness))
    norm = res["normalization"]
    run.check("slq2.determinant-normalization", "quantum determinant",
              lambda: (not norm.is_zero(), f"S^0(1,1) = {norm}"))
    for c in commutativity_check():
        run.check(f"slq2.commutativity.{c.name}", "braided commutativity of the product",
                  lambda c=c: (c.passed, c.witness))
    assoc = associativity_check()
    run.check("slq2.associativity", "associativity of the product",
              lambda: (all(c.passed for c in assoc),
                       f"{sum(c.passed for c in assoc)}/{len(assoc)} triples"))
    for c in coproduct_checks():
        run.check(f"slq2.coproduct.{c.name}", "coproduct dual to the product",
                  lambda c=c: (c.passed, c.witness))


HANDLERS = {"uq-relations": cmd_uq, "intertwiners": cmd_intertwiners, "braiding": cmd_braiding,
            "chains": cmd_chains, "virasoro": cmd_virasoro, "screening": cmd_screening,
            "correlators": cmd_correlators, "brst": cmd_brst, "cohomology": cmd_cohomology,
            "slq2": cmd_slq2}


def run(config: RunConfig, cache: Cache | None = None) -> Report:
    config.validate()
    runner = Runner(config, cache)
    for name in (COMMANDS if config.command == "all" else (config.command,)):
        HANDLERS[name](runner)
    if cache is not None:
        runner.report.cache = cache.stats()
    return runner.report


# --------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qvoa", description="Exact and numeric checks for the quantum-group VOA toolkit.")
    p.add_argument("command", nargs="?", choices=COMMANDS + ("all",))
    p.add_argument("--level", type=int)
    p.add_argument("--lambda", dest="lambdas")
    p.add_argument("--kappa")
    p.add_argument("--seed", type=int)
    p.add_argument("--cache")
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--out")
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--no-timing", action="store_true", help="omit wall times and cache counters")
    return p


def config_from_args(args) -> RunConfig:
    base = read_config_file(args.config) if args.config else {}
    pick = lambda flag, key: flag if flag is not None else base.get(key)
    command = pick(args.command, "command")
    if command is None:
        raise ConfigError("no command given")
    level = pick(args.level, "level")
    lambdas = pick(args.lambdas, "lambda")
    seed = pick(args.seed, "seed")
    try:
        level = None if level is None else int(level)
        seed = 0 if seed is None else int(seed)
    except ValueError:
        raise ConfigError("level and seed must be integers") from None
    return RunConfig(command=command, level=level,
                     lambdas=None if lambdas is None else parse_lambdas(str(lambdas)),
                     kappa=pick(args.kappa, "kappa") or "formal", seed=seed,
                     cache=pick(args.cache, "cache"), out=pick(args.out, "out")).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except (ConfigError, OSError) as exc:
        print(f"qvoa: {exc}", file=sys.stderr)
        return 2
    cache = None if args.no_cache else Cache(resolve_cache_dir(config.cache))
    try:
        report = run(config, cache)
    except ConfigError as exc:
        print(f"qvoa: {exc}", file=sys.stderr)
        return 2
    for c in report.checks:
        print(f"{c.status.upper():7s} {c.id}  [{c.anchor}]" + (f"  {c.witness}" if c.status != "pass" and c.witness else ""))
    s = report.summary()
    print(f"{s['pass']} passed, {s['fail']} failed, {s['skipped']} skipped")
    text = report.to_json(timing=not args.no_timing)
    if config.out:
        Path(config.out).write_text(text)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
