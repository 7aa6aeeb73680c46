"""Certificates: named checks with canonical-text inputs, the verification
suite, and the JSON formats read and written by the command line.

Every certificate records the inputs of its check as canonical text, so
re-running the check on the parsed inputs reproduces verdict and witness
exactly (see :func:`recheck`).
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from . import __version__
from .coxeter import CoxeterDatum, MultiplicityMap, build, is_invariant, jacobian_determinant, product
from .diffgeo import DerivationField, OneForm, apply_derivation, istar_map, nabla_on_derivation, nabla_on_form
from .logmod import (antiinvariance_order_check, derivation_jacobian_check, dual_criterion_check, der_membership,
                     filtration_shift_check, invariant_form_samples, omega_membership, ord_lemma_check, ord_samples,
                     saito_ziegler_check, transverse_pole_check)
from .poly import MultiPoly, iter_monomials, parse_poly
from .primitive import (FamilyEngine, TheoryViolation, apply_entrywise, embed_field, g_k_matrix, g_matrix, matrix_det,
                        t_membership, xi_basis)
from .ratfunc import LinearForm, RatFunc, parse_ratfunc, render_ratfunc

SCHEMA = 1
KINDS = ("basis-criterion", "membership", "ord-lemma", "filtration-shift", "commuting-diagram", "jacobian",
         "g-matrix", "t-membership")
DEFAULT_K = (-1, 2)
MAX_K_SPAN = 8
DEFAULT_SHIFT_RANGE = range(-3, 4)


class ConfigError(ValueError):
    """Invalid suite configuration or input file (exit code 2)."""


# -- text round trip ---------------------------------------------------------------------
def render_field(obj: OneForm | DerivationField) -> list[str]:
    return [render_ratfunc(c) for c in obj.coeffs]


def parse_coefficient(text: str, d: CoxeterDatum) -> RatFunc:
    """Parse a coefficient, recovering the hyperplane factorization of its denominator."""
    f = parse_ratfunc(text, d.variables)
    if f.is_polynomial():
        return f
    den = f.den
    factors: dict[LinearForm, int] = {}
    for h in d.hyperplanes:
        lp = h.poly(d.variables)
        while True:
            if den.misses_hyperplane(h.alpha.coefficients):
                break
            q = den.try_divide(lp)
            if q is None:
                break
            den = q
            factors[h.alpha] = factors.get(h.alpha, 0) + 1
    if not den.is_constant():
        return f
    return RatFunc.factored(f.num, factors, den.constant_value())


def parse_field(texts: Sequence[str], d: CoxeterDatum, cls):
    if len(texts) != d.rank:
        raise ConfigError(f"expected {d.rank} coefficients, got {len(texts)}")
    return cls(d.variables, [parse_coefficient(t, d) for t in texts])


# -- sessions ----------------------------------------------------------------------------
class Session:
    """Datum plus memoized families for one arrangement."""

    def __init__(self, arrangement: str) -> None:
        self.d = build(arrangement)
        self.name = self.d.name
        self.engine = FamilyEngine(self.d)
        self.D = self.engine.D


_SESSIONS: dict[str, Session] = {}


def session(arrangement: str) -> Session:
    key = build(arrangement).name
    if key not in _SESSIONS:
        _SESSIONS[key] = Session(key)
    return _SESSIONS[key]


# -- checks -------------------------------------------------------------------------------
CheckResult = tuple[bool, dict]


def _multiplicity(s: Session, text: str | None) -> MultiplicityMap | None:
    return MultiplicityMap.parse(s.d, text) if text else None


def check_jacobian(s: Session, inputs: dict, m) -> CheckResult:
    d = s.d
    P = [parse_poly(t, d.variables) for t in inputs["invariants"]]
    Q = parse_poly(inputs["Q"], d.variables)
    det = jacobian_determinant(P)
    c = det.try_divide(Q)
    ok = c is not None and c.is_constant() and not c.is_zero()
    invariant = all(is_invariant(p, d) for p in P)
    return ok and invariant, {"constant": str(c.constant_value()) if ok else None, "invariants_fixed": invariant}


def check_derivation_jacobian(s: Session, inputs: dict, m) -> CheckResult:
    results = derivation_jacobian_check(s.D)
    witness = {name: (str(c) if c is not None else None) for name, c in results}
    return all(c is not None for _, c in results), {"constants": witness}


def check_transverse(s: Session, inputs: dict, m) -> CheckResult:
    orders = transverse_pole_check(s.d, s.D)
    return all(o is None or o <= 0 for _, o in orders), {"orders": {h: o for h, o in orders}}


def _members(s: Session, inputs: dict) -> list:
    cls = OneForm if inputs["side"] == "omega" else DerivationField
    return [parse_field(t, s.d, cls) for t in inputs["members"]]


def check_criterion(s: Session, inputs: dict, m: MultiplicityMap) -> CheckResult:
    members = _members(s, inputs)
    ids = inputs.get("ids")
    if inputs["side"] == "omega":
        r = saito_ziegler_check(members, s.d, m, ids)
    else:
        r = dual_criterion_check(members, s.d, m, ids)
    witness = {
        "product": render_ratfunc(r.product_scalar),
        "regular": r.is_regular,
        "constant": str(r.constant) if r.constant is not None else None,
        "memberships": {v.object_id: v.describe() for v in r.memberships},
        "failure": r.failure(),
    }
    return r.ok, witness


def check_membership(s: Session, inputs: dict, m: MultiplicityMap) -> CheckResult:
    (member,) = _members(s, {"side": inputs["side"], "members": [inputs["member"]]})
    oid = inputs.get("id", "member")
    if inputs["side"] == "omega":
        v = omega_membership(member, s.d, m, oid)
    else:
        v = der_membership(member, s.d, m, oid)
    expected = inputs.get("expected", True)
    witness = {"member": v.verdict, "binding": v.describe(),
               "hyperplanes": [w.as_dict() for w in v.witnesses], "recheck": v.recheck()}
    return v.verdict == expected and v.recheck(), witness


def check_nabla_chain(s: Session, inputs: dict, m) -> CheckResult:
    cls = OneForm if inputs["side"] == "omega" else DerivationField
    src = [parse_field(t, s.d, cls) for t in inputs["source"]]
    dst = [parse_field(t, s.d, cls) for t in inputs["target"]]
    step = nabla_on_form if cls is OneForm else nabla_on_derivation
    if len(src) != len(dst):
        return False, {"mismatched": "family sizes differ"}
    bad = [j + 1 for j, (a, b) in enumerate(zip(src, dst)) if step(s.D.total, a) != b]
    return not bad, {"mismatched": bad}


def check_istar_image(s: Session, inputs: dict, m) -> CheckResult:
    forms = [parse_field(t, s.d, OneForm) for t in inputs["theta"]]
    ders = [parse_field(t, s.d, DerivationField) for t in inputs["xi"]]
    bad = [j + 1 for j, (w, x) in enumerate(zip(forms, ders)) if istar_map(w, s.d.metric) != x]
    return not bad and len(forms) == len(ders), {"mismatched": bad}


def check_kernel(s: Session, inputs: dict, m) -> CheckResult:
    fam = s.engine.theta(inputs["k"])
    return all(x == 0 for x in fam.kernel_dimensions), {"kernel_dimensions": fam.kernel_dimensions}


def check_xi_paths(s: Session, inputs: dict, m) -> CheckResult:
    try:
        xi_basis(s.engine, inputs["k"])
    except TheoryViolation as exc:
        return False, {"error": str(exc)}
    return True, {"paths": "I*(nabla^k dP) = nabla^k I*(dP)" if inputs["k"] >= 0 else "nabla xi^(k) = xi^(k+1)"}


def check_commuting(s: Session, inputs: dict, m) -> CheckResult:
    bad = []
    for idx, t in enumerate(inputs["forms"]):
        w = parse_field(t, s.d, OneForm)
        left = istar_map(nabla_on_form(s.D.total, w), s.d.metric)
        right = nabla_on_derivation(s.D.total, istar_map(w, s.d.metric))
        if left != right:
            bad.append(idx)
    return not bad, {"forms": len(inputs["forms"]), "mismatched": bad}


def check_ord_lemma(s: Session, inputs: dict, m) -> CheckResult:
    samples = [parse_coefficient(t, s.d) for t in inputs["samples"]]
    r = ord_lemma_check(s.d, s.D, samples)
    return r.ok, {"derivation_orders": dict(r.derivation_orders), "pairs": len(r.sample_pairs),
                  "skipped": len(r.skipped), "failures": r.failures()}


def check_antiinvariance(s: Session, inputs: dict, m) -> CheckResult:
    w = parse_field(inputs["form"], s.d, OneForm)
    r = antiinvariance_order_check(w, s.d)
    return r["ok"], {"orders": dict(r["orders"]), "vacuous": r["vacuous"]}


def check_filtration(s: Session, inputs: dict, m: MultiplicityMap) -> CheckResult:
    samples = [(item["id"], parse_field(item["form"], s.d, OneForm)) for item in inputs["samples"]]
    invariant = all(is_invariant(w, s.d) for _, w in samples)
    r = filtration_shift_check(s.d, s.D, m, samples)
    rows = {x.sample: [x.before.verdict, x.after.verdict, x.dual_before.verdict, x.dual_after.verdict]
            for x in r.results}
    bad = [x.sample for x in r.results if not x.ok]
    return r.ok and invariant, {"verdicts [omega m, omega m+2, der -m, der -m-2]": rows, "members": r.members,
                                "violations": bad, "samples_invariant": invariant}


def check_g(s: Session, inputs: dict, m) -> CheckResult:
    G = g_matrix(s.d)
    sym, inv = G.is_symmetric(), G.in_invariant_ring(s.d)
    return sym and inv, {"entries": [[render_ratfunc(e) for e in row] for row in G.entries],
                         "symmetric": sym, "invariant_polynomial": inv}


def check_g_k(s: Session, inputs: dict, m) -> CheckResult:
    k = inputs["k"]
    Gk = g_k_matrix(s.d, s.engine.theta(k), s.engine.theta(k + 1))
    inR = Gk.in_invariant_ring(s.d)
    return inR, {"entries": [[render_ratfunc(e) for e in row] for row in Gk.entries], "in_R": inR}


def check_d_of_g(s: Session, inputs: dict, m) -> CheckResult:
    DG = apply_entrywise(s.D, g_matrix(s.d))
    in_T = all(e.is_zero() or (e.is_polynomial() and is_invariant(e, s.d) and apply_derivation(s.D.total, e).is_zero())
               for row in DG.entries for e in row)
    det = matrix_det(DG)
    return in_T and not det.is_zero(), {"entries": [[render_ratfunc(e) for e in row] for row in DG.entries],
                                        "entries_in_T": in_T, "det": render_ratfunc(det)}


def check_t_membership(s: Session, inputs: dict, m) -> CheckResult:
    f = parse_poly(inputs["f"], s.d.variables)
    try:
        got = t_membership(f, s.D, s.d)
    except ValueError as exc:
        return False, {"error": str(exc)}
    return got == inputs["expected"], {"in_T": got, "D(f)": render_ratfunc(apply_derivation(s.D.total, f))}


def check_reducible_sum(s: Session, inputs: dict, m) -> CheckResult:
    total = DerivationField.zero(s.d.variables)
    for h in s.D.per_factor:
        total = total + h
    return total == s.D.total, {"factors": len(s.D.per_factor), "D": render_field(s.D.total)}


def check_reducible_union(s: Session, inputs: dict, m) -> CheckResult:
    """Theta^(k) equals the union of the families of each factor built on its own."""
    k = inputs["k"]
    expected: list[OneForm] = []
    for f in s.d.factors:
        alone = product([f])
        fam = FamilyEngine(alone).theta(k)
        expected.extend(embed_field(w, s.d.variables, f.positions) for w in fam.forms)
    got = s.engine.theta(k).forms
    return got == expected, {"forms": len(got)}


CHECKS: dict[str, tuple[str, Callable[[Session, dict, Any], CheckResult]]] = {
    "jacobian": ("jacobian", check_jacobian),
    "derivation-jacobian": ("jacobian", check_derivation_jacobian),
    "transverse-poles": ("ord-lemma", check_transverse),
    "criterion": ("basis-criterion", check_criterion),
    "nabla-chain": ("basis-criterion", check_nabla_chain),
    "ansatz-kernel": ("basis-criterion", check_kernel),
    "reducible-sum": ("basis-criterion", check_reducible_sum),
    "reducible-union": ("basis-criterion", check_reducible_union),
    "membership": ("membership", check_membership),
    "istar-image": ("commuting-diagram", check_istar_image),
    "xi-paths": ("commuting-diagram", check_xi_paths),
    "commuting-diagram": ("commuting-diagram", check_commuting),
    "ord-lemma": ("ord-lemma", check_ord_lemma),
    "antiinvariance-order": ("ord-lemma", check_antiinvariance),
    "filtration-shift": ("filtration-shift", check_filtration),
    "g-matrix": ("g-matrix", check_g),
    "g-k": ("g-matrix", check_g_k),
    "d-of-g": ("g-matrix", check_d_of_g),
    "t-membership": ("t-membership", check_t_membership),
}


# -- certificates -------------------------------------------------------------------------
@dataclass
class Certificate:
    id: str
    kind: str
    check: str
    arrangement: str
    multiplicity: str | None
    inputs: dict
    passed: bool
    witness: dict
    seed: int
    normalization: str
    tool_version: str = __version__

    def to_json(self) -> dict:
        return {
            "id": self.id, "kind": self.kind, "check": self.check, "arrangement": self.arrangement,
            "multiplicity": self.multiplicity, "inputs": self.inputs,
            "verdict": "pass" if self.passed else "fail", "witness": self.witness, "seed": self.seed,
            "tool_version": self.tool_version, "normalization": self.normalization,
        }

    @classmethod
    def from_json(cls, obj: dict) -> Certificate:
        try:
            if obj["kind"] not in KINDS or obj["check"] not in CHECKS:
                raise ConfigError(f"unknown certificate kind/check {obj['kind']}/{obj['check']}")
            if obj["verdict"] not in ("pass", "fail"):
                raise ConfigError(f"bad verdict {obj['verdict']!r}")
            return cls(obj["id"], obj["kind"], obj["check"], obj["arrangement"], obj.get("multiplicity"),
                       obj["inputs"], obj["verdict"] == "pass", obj["witness"], int(obj["seed"]),
                       obj.get("normalization", ""), obj.get("tool_version", ""))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed certificate: {exc}") from None


def run_check(arrangement: str, check: str, inputs: dict, multiplicity: str | None) -> CheckResult:
    s = session(arrangement)
    _, fn = CHECKS[check]
    try:
        return fn(s, inputs, _multiplicity(s, multiplicity))
    except (TheoryViolation, ArithmeticError) as exc:
        return False, {"error": str(exc)}


def recheck(cert: Certificate) -> bool:
    """Re-run the check on the recorded inputs; True iff verdict and witness match."""
    passed, witness = run_check(cert.arrangement, cert.check, cert.inputs, cert.multiplicity)
    return passed == cert.passed and _jsonable(witness) == cert.witness


def _jsonable(obj):
    return json.loads(json.dumps(obj))


# -- suite --------------------------------------------------------------------------------
@dataclass
class SuiteConfig:
    arrangements: list[str]
    k_min: int = DEFAULT_K[0]
    k_max: int = DEFAULT_K[1]
    multiplicities: list[str] = field(default_factory=list)
    samples: int = 8
    seed: int = 42
    jobs: int = 1
    out: str | None = None

    def validate(self) -> None:
        if not self.arrangements:
            raise ConfigError("no arrangement given")
        for a in self.arrangements:
            try:
                build(a)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if self.k_min > self.k_max:
            raise ConfigError("k-min exceeds k-max")
        if self.k_max - self.k_min > MAX_K_SPAN or abs(self.k_min) > MAX_K_SPAN or abs(self.k_max) > MAX_K_SPAN:
            raise ConfigError(f"k range is limited to spans of {MAX_K_SPAN} within [-{MAX_K_SPAN}, {MAX_K_SPAN}]")
        if self.samples < 1 or self.jobs < 1:
            raise ConfigError("samples and jobs must be positive")
        for a in self.arrangements:
            for mtext in self.multiplicities:
                try:
                    MultiplicityMap.parse(build(a), mtext)
                except ValueError as exc:
                    raise ConfigError(f"{a}: {exc}") from None

    @classmethod
    def from_file(cls, path: str) -> SuiteConfig:
        try:
            with open(path) as fh:
                raw = json.load(fh)
            return cls(**raw)
        except (OSError, json.JSONDecodeError, TypeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None

    def to_json(self) -> dict:
        return {"arrangements": self.arrangements, "k_min": self.k_min, "k_max": self.k_max,
                "multiplicities": self.multiplicities, "samples": self.samples, "seed": self.seed}


@dataclass
class Task:
    id: str
    check: str
    inputs: dict
    multiplicity: str | None = None


def random_rational_forms(d: CoxeterDatum, count: int, seed: int) -> list[OneForm]:
    """Seeded 1-forms with low-degree numerators and hyperplane denominators."""
    rng = random.Random(f"{seed}:forms:{d.name}")
    v = d.variables
    out = []
    while len(out) < count:
        coeffs = []
        for _ in range(d.rank):
            p = MultiPoly.zero(v)
            for e in iter_monomials(d.rank, rng.randint(0, 2)):
                c = rng.randint(-2, 2)
                if c:
                    p = p + MultiPoly(v, {e: c})
            exps = {h.alpha: -rng.randint(0, 2) for h in d.hyperplanes if rng.random() < 0.4}
            coeffs.append(RatFunc(p) * RatFunc.linear_product(v, exps))
        w = OneForm(v, coeffs)
        if not w.is_zero():
            out.append(w)
    return out


def plan(cfg: SuiteConfig, arrangement: str) -> list[Task]:
    s = session(arrangement)
    d, E, name = s.d, s.engine, s.name
    tasks: list[Task] = []
    add = tasks.append
    ks = list(range(cfg.k_min, cfg.k_max + 1))

    add(Task(f"{name}/jacobian", "jacobian", {"invariants": [str(p) for p in d.invariants], "Q": str(d.Q)}))
    add(Task(f"{name}/derivation-jacobian", "derivation-jacobian", {}))
    add(Task(f"{name}/transverse-poles", "transverse-poles", {}))
    for k in ks:
        fam = E.xi(k)
        thetas = [render_field(w) for w in fam.forms]
        xis = [render_field(x) for x in fam.derivations]
        ids = [f"theta[{i + 1}]_{j + 1}^({k})" for i, j in fam.labels]
        xids = [f"xi[{i + 1}]_{j + 1}^({k})" for i, j in fam.labels]
        add(Task(f"{name}/criterion/theta/k={k}", "criterion",
                 {"side": "omega", "k": k, "members": thetas, "ids": ids}, f"const:{2 * k - 1}"))
        add(Task(f"{name}/criterion/xi/k={k}", "criterion",
                 {"side": "der", "k": k, "members": xis, "ids": xids}, f"const:{-2 * k + 1}"))
        for t, oid in zip(thetas, ids):
            add(Task(f"{name}/membership/{oid}", "membership",
                     {"side": "omega", "member": t, "id": oid}, f"const:{2 * k - 1}"))
        for t, oid in zip(xis, xids):
            add(Task(f"{name}/membership/{oid}", "membership",
                     {"side": "der", "member": t, "id": oid}, f"const:{-2 * k + 1}"))
        if k < 0:
            add(Task(f"{name}/ansatz-kernel/k={k}", "ansatz-kernel", {"k": k}))
        add(Task(f"{name}/xi-paths/k={k}", "xi-paths", {"k": k}))
        add(Task(f"{name}/istar-image/k={k}", "istar-image", {"theta": thetas, "xi": xis}))
        if len(d.factors) > 1:
            add(Task(f"{name}/reducible-union/k={k}", "reducible-union", {"k": k}))
        for t, oid in zip(thetas, ids):
            if k == 1:
                add(Task(f"{name}/antiinvariance-order/{oid}", "antiinvariance-order", {"form": t}))
    for k in ks[:-1]:
        for side, src, dst in (("omega", E.theta(k).forms, E.theta(k + 1).forms),
                               ("der", E.xi(k).derivations, E.xi(k + 1).derivations)):
            add(Task(f"{name}/nabla-chain/{side}/k={k}", "nabla-chain",
                     {"side": side, "source": [render_field(w) for w in src],
                      "target": [render_field(w) for w in dst]}))
        if k <= 1:
            add(Task(f"{name}/g-k/k={k}", "g-k", {"k": k}))
    if len(d.factors) > 1:
        add(Task(f"{name}/reducible-sum", "reducible-sum", {}))
    add(Task(f"{name}/g-matrix", "g-matrix", {}))
    add(Task(f"{name}/d-of-g", "d-of-g", {}))

    forms = random_rational_forms(d, 2 * cfg.samples, cfg.seed)
    add(Task(f"{name}/commuting-diagram", "commuting-diagram", {"forms": [render_field(w) for w in forms]}))
    samples = ord_samples(d, cfg.samples, cfg.seed)
    add(Task(f"{name}/ord-lemma", "ord-lemma", {"samples": [render_ratfunc(f) for f in samples]}))

    fs = invariant_form_samples(E, cfg.samples, cfg.seed, ks=[k for k in (-1, 0, 1) if k in ks] or ks[:1])
    shift_inputs = {"samples": [{"id": sid, "form": render_field(w)} for sid, w in fs]}
    seen: list[str] = []
    for mtext in [f"const:{c}" for c in DEFAULT_SHIFT_RANGE] + list(cfg.multiplicities):
        canonical = MultiplicityMap.parse(d, mtext).description
        if canonical not in seen:
            seen.append(canonical)
            add(Task(f"{name}/filtration-shift/{canonical}", "filtration-shift", shift_inputs, canonical))

    for i, f in enumerate(d.factors):
        P = d.factor_invariants(i)
        for j, p in enumerate(P):
            add(Task(f"{name}/t-membership/P[{i + 1}]_{j + 1}", "t-membership",
                     {"f": str(p), "expected": j < len(P) - 1}))
    tops = [d.factor_invariants(i)[-1] for i in range(len(d.factors))]
    for i in range(1, len(tops)):
        add(Task(f"{name}/t-membership/P[{i + 1}]-P[1]", "t-membership",
                 {"f": str(tops[i] - tops[0]), "expected": True}))
    return tasks


_PLANS: dict[tuple, list[Task]] = {}


def _plan_cached(cfg: SuiteConfig, arrangement: str) -> list[Task]:
    key = (json.dumps(cfg.to_json(), sort_keys=True), arrangement)
    if key not in _PLANS:
        _PLANS[key] = plan(cfg, arrangement)
    return _PLANS[key]


def execute(task: Task, arrangement: str, seed: int) -> tuple[Certificate, float]:
    t0 = time.perf_counter()
    passed, witness = run_check(arrangement, task.check, task.inputs, task.multiplicity)
    s = session(arrangement)
    cert = Certificate(task.id, CHECKS[task.check][0], task.check, s.name, task.multiplicity, _jsonable(task.inputs),
                       passed, _jsonable(witness), seed, s.d.normalization_note())
    return cert, time.perf_counter() - t0


def _worker(args: tuple) -> tuple[dict, float]:
    cfg_json, arrangement, index = args
    cfg = SuiteConfig(**cfg_json)
    task = _plan_cached(cfg, arrangement)[index]
    cert, dt = execute(task, arrangement, cfg.seed)
    return cert.to_json(), dt


def run_suite(cfg: SuiteConfig) -> tuple[list[Certificate], dict[str, float]]:
    """Run every task; certificates come back ordered by arrangement then plan order."""
    cfg.validate()
    certs: list[Certificate] = []
    timing: dict[str, float] = {}
    for arrangement in cfg.arrangements:
        t0 = time.perf_counter()
        tasks = _plan_cached(cfg, arrangement)
        if cfg.jobs > 1:
            jobs = [(cfg.to_json(), arrangement, i) for i in range(len(tasks))]
            with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
                results = list(pool.map(_worker, jobs))
            certs.extend(Certificate.from_json(c) for c, _ in results)
        else:
            for task in tasks:
                cert, _ = execute(task, arrangement, cfg.seed)
                certs.append(cert)
        timing[session(arrangement).name] = round(time.perf_counter() - t0, 3)
    return certs, timing


def certificate_document(cfg: SuiteConfig, certs: Sequence[Certificate], timing: dict[str, float]) -> dict:
    return {"schema": SCHEMA, "tool": "coxlog", "tool_version": __version__, "config": cfg.to_json(),
            "certificates": [c.to_json() for c in certs], "timing_seconds": timing}


def load_certificates(path: str) -> tuple[list[Certificate], dict[str, float]]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read certificates {path}: {exc}") from None
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA or not isinstance(doc.get("certificates"), list):
        raise ConfigError(f"{path} is not a schema-{SCHEMA} certificate file")
    timing = doc.get("timing_seconds") or {}
    if not isinstance(timing, dict):
        raise ConfigError("timing_seconds must be an object")
    return [Certificate.from_json(c) for c in doc["certificates"]], timing


# -- generated families ---------------------------------------------------------------------
def generate_document(arrangement: str, k_min: int, k_max: int) -> dict:
    s = session(arrangement)
    d, E = s.d, s.engine
    families = []
    for k in range(k_min, k_max + 1):
        fam = xi_basis(E, k)
        families.append({
            "k": k,
            "labels": [[i + 1, j + 1] for i, j in fam.labels],
            "degrees": fam.degrees,
            "theta": [render_field(w) for w in fam.forms],
            "xi": [render_field(x) for x in fam.derivations],
            "kernel_dimensions": fam.kernel_dimensions,
        })
    return {
        "schema": SCHEMA, "tool": "coxlog", "tool_version": __version__, "arrangement": d.name,
        "variables": list(d.variables),
        "datum": {
            "factors": [f.name for f in d.factors],
            "gram": [[str(x) for x in row] for row in d.metric.gram],
            "hyperplanes": [str(h.poly(d.variables)) for h in d.hyperplanes],
            "orbits": {name: [str(h.poly(d.variables)) for h in orbit] for name, orbit in zip(d.orbit_names, d.orbits())},
            "invariants": [str(p) for p in d.invariants],
            "degrees": list(d.degrees),
            "exponents": list(d.exponents),
            "coxeter_numbers": list(d.coxeter_numbers),
            "Q": str(d.Q),
            "jacobian_constant": str(d.jacobian_constant),
            "normalization": d.normalization_note(),
        },
        "primitive_derivation": {
            "total": render_field(s.D.total),
            "per_factor": [render_field(h) for h in s.D.per_factor],
        },
        "families": families,
    }


def plan_from_families(doc: dict) -> tuple[str, list[Task]]:
    """Checks on a generated (possibly edited) family file."""
    try:
        if doc.get("schema") != SCHEMA:
            raise ConfigError("family file has the wrong schema")
        arrangement = doc["arrangement"]
        s = session(arrangement)
        if list(s.d.variables) != doc["variables"]:
            raise ConfigError("family file variables do not match the arrangement")
        fams = sorted(doc["families"], key=lambda f: f["k"])
        tasks: list[Task] = []
        name = s.name
        for fam in fams:
            k = fam["k"]
            ids = [f"theta[{i}]_{j}^({k})" for i, j in fam["labels"]]
            xids = [f"xi[{i}]_{j}^({k})" for i, j in fam["labels"]]
            tasks.append(Task(f"{name}/criterion/theta/k={k}", "criterion",
                              {"side": "omega", "k": k, "members": fam["theta"], "ids": ids}, f"const:{2 * k - 1}"))
            if fam.get("xi"):
                tasks.append(Task(f"{name}/criterion/xi/k={k}", "criterion",
                                  {"side": "der", "k": k, "members": fam["xi"], "ids": xids}, f"const:{-2 * k + 1}"))
                tasks.append(Task(f"{name}/istar-image/k={k}", "istar-image", {"theta": fam["theta"], "xi": fam["xi"]}))
            for t, oid in zip(fam["theta"], ids):
                tasks.append(Task(f"{name}/membership/{oid}", "membership",
                                  {"side": "omega", "member": t, "id": oid}, f"const:{2 * k - 1}"))
        for a, b in zip(fams, fams[1:]):
            if b["k"] == a["k"] + 1:
                tasks.append(Task(f"{name}/nabla-chain/omega/k={a['k']}", "nabla-chain",
                                  {"side": "omega", "source": a["theta"], "target": b["theta"]}))
        return arrangement, tasks
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed family file: {exc}") from None


def run_tasks(arrangement: str, tasks: Sequence[Task], seed: int) -> list[Certificate]:
    return [execute(t, arrangement, seed)[0] for t in tasks]
