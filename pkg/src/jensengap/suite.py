"""Batch runner: full check suites, counterexample fuzzing with
shrinking, phi-family sweeps, and deterministic CSV/JSON reports."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from . import checks as C
from .convexity import PhiSpec, certify_shape, parse_phi
from .degree import DEFAULT_COLUMN_TOL, characterize, check_hypotheses
from .errors import (DomainError, InvalidValueError, ShapeError,
                     VerifierError)
from .hypergraph import random_hypergraph, to_instance
from .model import (Instance, QuadratureScheme, SequenceModel, build_discrete,
                    diagonal_kernel, from_interval, from_sequences,
                    instance_to_dict, random_instance)

__all__ = [
    "SuiteConfig",
    "ReportRow",
    "SuiteReport",
    "FuzzReport",
    "run_suite_on_instance",
    "run_suite",
    "fuzz",
    "sweep",
    "parse_generator",
    "parse_phi_family",
    "rows_to_csv",
    "report_to_json",
]

# Fixed catalogue order; reports list checks in this order.
ALL_CHECKS = (
    "main",
    "stability",
    "concave-reversal",
    "variational",
    "power-mean",
    "marginal-power-mean",
    "entropy",
    "geometric-mean",
    "erasure",
)
INFORMATIONAL_CHECKS = (
    "power-mean:paper-literal",
    "geometric-mean:paper-literal",
)

CHAIN_EXPONENTS = (0.5, 1.0, 2.0, 3.0)
MARGINAL_EXPONENTS = (1.5, 2.0, 3.0)


@dataclass(frozen=True)
class SuiteConfig:
    checks: tuple[str, ...] = ("all",)
    phi_list: tuple[str, ...] = ("id", "log")
    tol: float = C.DEFAULT_TOL
    eq_tol: float = C.DEFAULT_EQ_TOL
    seed: int = 0
    trials: int = 1000
    column_tol: float = DEFAULT_COLUMN_TOL

    def __post_init__(self):
        if not (self.tol > 0 and self.eq_tol > 0):
            raise InvalidValueError("tol and eq_tol must be positive")
        if self.trials < 1:
            raise InvalidValueError("trials must be at least 1")

    def enabled(self, name: str) -> bool:
        base = name.split("[")[0]
        if name in self.checks or base in self.checks:
            return True
        if name.endswith(":paper-literal"):
            return False  # informational variants are opt-in only
        return "all" in self.checks


def _fmt(x) -> str:
    if x is None:
        return ""
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class ReportRow:
    instance_id: str
    check_name: str
    phi: str
    lhs: float | None
    rhs: float | None
    gap: float | None
    bound: float | None
    status: str
    tol: float

    @property
    def informational(self) -> bool:
        return ":paper-literal" in self.check_name

    def as_csv(self) -> list[str]:
        return [self.instance_id, self.check_name, self.phi,
                _fmt(self.lhs), _fmt(self.rhs), _fmt(self.gap),
                _fmt(self.bound), self.status, _fmt(self.tol)]


CSV_HEADER = ["instance_id", "check_name", "phi", "lhs", "rhs", "gap",
              "bound", "status", "tol"]


def _row(instance_id: str, res: C.CheckResult) -> ReportRow:
    return ReportRow(instance_id=instance_id, check_name=res.check_name,
                     phi=res.phi_label, lhs=res.lhs, rhs=res.rhs,
                     gap=res.gap, bound=res.bound, status=res.status,
                     tol=res.tol)


@dataclass
class SuiteReport:
    rows: list[ReportRow] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)

    @property
    def violations(self) -> list[ReportRow]:
        return [r for r in self.rows
                if r.status == C.VIOLATED and not r.informational]

    @property
    def ok(self) -> bool:
        return not self.violations


def _skip(report: SuiteReport, instance_id: str, check: str, phi: str,
          reason: str) -> None:
    report.skipped.append({"instance_id": instance_id, "check": check,
                           "phi": phi, "reason": reason})


def run_suite_on_instance(inst: Instance, config: SuiteConfig,
                          report: SuiteReport | None = None) -> SuiteReport:
    """Run every enabled, applicable check on one instance.

    Structural failures (zero weight mass, non-constant columns) raise;
    per-check inapplicability (wrong shape, degrees outside the phi
    domain) is recorded as a skip.
    """
    if report is None:
        report = SuiteReport()
    iid = inst.instance_id
    profile = characterize(inst, column_tol=config.column_tol)
    tol, eq_tol = config.tol, config.eq_tol
    phis = [parse_phi(s) for s in config.phi_list]

    for phi in phis:
        hyp = check_hypotheses(inst, phi, column_tol=config.column_tol)
        if not hyp.all_pass:
            failed = [e.name for e in hyp.entries if not e.passed]
            _skip(report, iid, "main", phi.label,
                  f"hypotheses failed: {','.join(failed)}")
            continue
        try:
            cert = certify_shape(phi, profile.delta_min, profile.delta_max)
        except (DomainError, VerifierError) as exc:
            _skip(report, iid, "main", phi.label, str(exc))
            continue
        if cert.is_convex:
            if config.enabled("main"):
                report.rows.append(_row(iid, C.main_inequality(
                    profile, phi, tol=tol, eq_tol=eq_tol)))
            if config.enabled("stability"):
                report.rows.append(_row(iid, C.stability_check(
                    profile, phi, tol=tol, eq_tol=eq_tol)))
            if (config.enabled("variational")
                    and cert.shape == "strictly-convex"):
                report.rows.append(_row(iid, C.variational_scan(
                    profile, phi, trials=config.trials, seed=config.seed,
                    tol=tol, eq_tol=eq_tol)))
        elif cert.is_concave:
            if config.enabled("concave-reversal"):
                report.rows.append(_row(iid, C.concave_reversal(
                    profile, phi, tol=tol, eq_tol=eq_tol)))
        else:
            _skip(report, iid, "main", phi.label,
                  f"shape {cert.shape} is neither convex nor concave")
        if config.enabled("erasure") and cert.is_convex:
            if inst.q >= 2 and profile.c > 0:
                mask = np.zeros(inst.q, dtype=bool)
                mask[-1] = True
                try:
                    report.rows.append(_row(iid, C.erasure_check(
                        inst, mask, phi, tol=tol, eq_tol=eq_tol,
                        column_tol=config.column_tol)))
                except VerifierError as exc:
                    _skip(report, iid, "erasure", phi.label, str(exc))
            else:
                _skip(report, iid, "erasure", phi.label,
                      "needs at least two e-atoms and c > 0")

    positive = bool(np.all(profile.delta > 0)) and profile.c > 0
    if config.enabled("power-mean"):
        if positive:
            for res in C.power_mean_chain(profile, CHAIN_EXPONENTS,
                                          variant="normalized", tol=tol,
                                          eq_tol=eq_tol):
                report.rows.append(_row(iid, res))
        else:
            _skip(report, iid, "power-mean", "",
                  "requires positive degrees and c > 0")
    if config.enabled("power-mean:paper-literal") and positive:
        for res in C.power_mean_chain(profile, CHAIN_EXPONENTS,
                                      variant="paper-literal", tol=tol,
                                      eq_tol=eq_tol):
            report.rows.append(_row(iid, res))
    if config.enabled("marginal-power-mean"):
        if np.all(profile.delta >= 0):
            for p in MARGINAL_EXPONENTS:
                report.rows.append(_row(iid, C.marginal_power_mean(
                    profile, p, tol=tol, eq_tol=eq_tol)))
        else:
            _skip(report, iid, "marginal-power-mean", "",
                  "requires nonnegative degrees")
    if config.enabled("entropy"):
        if positive:
            report.rows.append(_row(iid, C.entropy_check(
                profile, tol=tol, eq_tol=eq_tol)))
        else:
            _skip(report, iid, "entropy", "log",
                  "requires positive degrees and c > 0")
    if config.enabled("geometric-mean"):
        if positive:
            report.rows.append(_row(iid, C.geometric_mean_check(
                profile, tol=tol, eq_tol=eq_tol)))
        else:
            _skip(report, iid, "geometric-mean", "log",
                  "requires positive degrees and c > 0")
    if config.enabled("geometric-mean:paper-literal") and positive:
        report.rows.append(_row(iid, C.geometric_mean_check(
            profile, tol=tol, eq_tol=eq_tol, variant="paper-literal")))
    return report


def run_suite(instances, config: SuiteConfig) -> SuiteReport:
    report = SuiteReport()
    for inst in instances:
        run_suite_on_instance(inst, config, report)
    return report


# ---------------------------------------------------------------------------
# generators


def parse_generator(spec: str, seed: int) -> Instance:
    """Parse ``kind:key=value,...`` generator specs.

    Kinds: ``matrix:p=..,q=..,c=..``, ``hypergraph:p=..,q=..,k=..``,
    ``sequence:n=..``, ``interval:nodes=..[,rule=..]``.
    """
    kind, _, rest = spec.partition(":")
    params = {}
    if rest:
        for part in rest.split(","):
            key, _, value = part.partition("=")
            if not value:
                raise InvalidValueError(f"bad generator parameter {part!r}")
            params[key.strip()] = value.strip()
    if kind == "matrix":
        return random_instance(int(params.get("p", 5)),
                               int(params.get("q", 5)),
                               float(params.get("c", 3.0)), seed)
    if kind == "hypergraph":
        h = random_hypergraph(int(params.get("p", 6)),
                              int(params.get("q", 4)),
                              int(params.get("k", 3)), seed,
                              regular=params.get("regular", "0") in
                              ("1", "true", "yes"))
        return to_instance(h)
    if kind == "sequence":
        n = int(params.get("n", 8))
        rng = np.random.default_rng(seed)
        a = rng.uniform(0.2, 2.0, size=n)
        u = rng.uniform(0.2, 2.0, size=n)
        model = SequenceModel.from_a_u(a, u)
        inst = from_sequences(model, diagonal_kernel(a),
                              meta={"id": f"sequence-n{n}-seed{seed}",
                                    "kind": "sequence"})
        return inst
    if kind == "interval":
        n = int(params.get("nodes", 64))
        rule = params.get("rule", "trapezoid-periodic")
        scheme = QuadratureScheme(rule=rule, node_count=n, interval=(0.0, 1.0))
        return from_interval(
            lambda v, e: 1.0 + math.sin(2.0 * math.pi * (v - e)),
            lambda e: e, scheme, scheme,
            meta={"id": f"interval-{rule}-n{n}", "kind": "interval"})
    raise InvalidValueError(f"unknown generator kind {kind!r}")


def _fuzz_instance(kind: int, rng: np.random.Generator, index: int) -> Instance:
    sub_seed = int(rng.integers(0, 2**31 - 1))
    if kind == 0:
        p = int(rng.integers(2, 21))
        q = int(rng.integers(2, 21))
        c = float(rng.uniform(0.5, 5.0))
        inst = random_instance(p, q, c, sub_seed)
    elif kind == 1:
        q = int(rng.integers(2, 11))
        k = int(rng.integers(2, 5))
        p = int(rng.integers(2, min(10, k * q) + 1))
        inst = to_instance(random_hypergraph(p, q, k, sub_seed))
    elif kind == 2:
        n = int(rng.integers(2, 13))
        sub = np.random.default_rng(sub_seed)
        a = sub.uniform(0.2, 2.0, size=n)
        u = sub.uniform(0.2, 2.0, size=n)
        inst = from_sequences(SequenceModel.from_a_u(a, u),
                              diagonal_kernel(a),
                              meta={"id": f"sequence-n{n}-seed{sub_seed}"})
    else:
        sub = np.random.default_rng(sub_seed)
        base = float(sub.uniform(1.5, 3.0))
        amp = float(sub.uniform(0.0, 0.8 * base))
        n = int(sub.choice([8, 16, 24, 32]))
        scheme = QuadratureScheme("trapezoid-periodic", n, (0.0, 1.0))
        inst = from_interval(
            lambda v, e: base + amp * math.sin(2.0 * math.pi * (v - e)),
            lambda e: 0.3 + e * e, scheme, scheme,
            meta={"id": f"interval-n{n}-seed{sub_seed}"})
    meta = dict(inst.meta)
    meta["id"] = f"fuzz-{index:05d}-{meta.get('id', 'instance')}"
    return Instance(v_space=inst.v_space, e_space=inst.e_space,
                    kernel=inst.kernel, weights=inst.weights, meta=meta)


FUZZ_CHECKS = ("main", "stability", "concave-reversal", "power-mean",
               "marginal-power-mean", "entropy", "erasure")


def _fuzz_check_results(inst: Instance, config: SuiteConfig,
                        mask: np.ndarray | None,
                        enabled=FUZZ_CHECKS,
                        literal_power_mean: bool = False):
    """Yield (check_name, phi_label, CheckResult) for the fuzz catalogue."""
    tol, eq_tol = config.tol, config.eq_tol
    profile = characterize(inst, column_tol=config.column_tol)
    positive = bool(np.all(profile.delta > 0)) and profile.c > 0
    for spec in config.phi_list:
        phi = parse_phi(spec)
        if not phi.domain.contains(profile.delta):
            continue  # phi inapplicable to this degree range
        cert = certify_shape(phi, profile.delta_min, profile.delta_max)
        if cert.is_convex:
            if "main" in enabled:
                yield C.main_inequality(profile, phi, tol=tol, eq_tol=eq_tol)
            if "stability" in enabled:
                yield C.stability_check(profile, phi, tol=tol, eq_tol=eq_tol)
            if "erasure" in enabled and mask is not None:
                restricted_s = float(
                    inst.weights[~mask] @ inst.e_space.masses[~mask])
                if restricted_s > 0:
                    try:
                        yield C.erasure_check(inst, mask, phi, tol=tol,
                                              eq_tol=eq_tol,
                                              column_tol=config.column_tol)
                    except (DomainError, ShapeError):
                        pass  # restricted degrees left the phi domain
    if positive:
        if "concave-reversal" in enabled:
            concave_phi = PhiSpec(family="power", exponent=-0.5)
            yield C.concave_reversal(profile, concave_phi, tol=tol,
                                     eq_tol=eq_tol)
        if "power-mean" in enabled:
            yield from C.power_mean_chain(profile, CHAIN_EXPONENTS,
                                          variant="normalized", tol=tol,
                                          eq_tol=eq_tol)
        if literal_power_mean:
            yield from C.power_mean_chain(profile, CHAIN_EXPONENTS,
                                          variant="paper-literal", tol=tol,
                                          eq_tol=eq_tol)
        if "entropy" in enabled:
            yield C.entropy_check(profile, tol=tol, eq_tol=eq_tol)
        if "geometric-mean" in enabled:
            yield C.geometric_mean_check(profile, tol=tol, eq_tol=eq_tol)
    if "marginal-power-mean" in enabled and np.all(profile.delta >= 0):
        for p in MARGINAL_EXPONENTS:
            yield C.marginal_power_mean(profile, p, tol=tol, eq_tol=eq_tol)


@dataclass
class FuzzViolation:
    instance: dict
    check: str
    phi: str
    gap: float


@dataclass
class FuzzReport:
    instances_tried: int
    seed: int
    violations: list[FuzzViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _random_mask(rng: np.random.Generator, q: int) -> np.ndarray | None:
    """Random nonempty proper mask over the e-atoms; None when q < 2."""
    if q < 2:
        return None
    mask = rng.integers(0, 2, size=q).astype(bool)
    if mask.all():
        mask[int(rng.integers(0, q))] = False
    if not mask.any():
        mask[int(rng.integers(0, q))] = True
    return mask


def fuzz(config: SuiteConfig, count: int,
         literal_power_mean: bool = False) -> FuzzReport:
    """Generate ``count`` mixed random instances, run the asserted
    checks, and shrink any violating instance.  Deterministic in
    ``config.seed``."""
    if count < 1:
        raise InvalidValueError("count must be at least 1")
    rng = np.random.default_rng(config.seed)
    report = FuzzReport(instances_tried=count, seed=config.seed)
    for i in range(count):
        kind = i % 4
        inst = _fuzz_instance(kind, rng, i)
        mask = _random_mask(rng, inst.q)
        try:
            results = list(_fuzz_check_results(
                inst, config, mask, literal_power_mean=literal_power_mean))
        except VerifierError as exc:
            # An inapplicable check on a fuzzed instance is a finding too.
            report.violations.append(FuzzViolation(
                instance=instance_to_dict(inst), check="<error>", phi="",
                gap=float("nan")))
            continue
        for res in results:
            if res.status == C.VIOLATED:
                shrunk = shrink(inst, _make_violation_probe(res, config, mask))
                report.violations.append(FuzzViolation(
                    instance=instance_to_dict(shrunk),
                    check=res.check_name, phi=res.phi_label, gap=res.gap))
    return report


def _make_violation_probe(res: C.CheckResult, config: SuiteConfig,
                          mask: np.ndarray | None):
    """Predicate deciding whether a candidate instance still violates
    the same check (by name) that ``res`` violated."""
    name = res.check_name

    def probe(candidate: Instance) -> bool:
        cand_mask = None
        if mask is not None and candidate.q == mask.size:
            cand_mask = mask
        try:
            for r in _fuzz_check_results(
                    candidate, config, cand_mask,
                    literal_power_mean=name.endswith(":paper-literal")):
                if r.check_name == name and r.status == C.VIOLATED:
                    return True
        except VerifierError:
            return False
        return False

    return probe


def _drop_v_atom(inst: Instance, idx: int) -> Instance | None:
    if inst.p <= 1:
        return None
    keep = np.ones(inst.p, dtype=bool)
    keep[idx] = False
    mu = inst.v_space.masses[keep]
    kernel = inst.kernel[keep, :]
    old_c = float(inst.v_space.masses @ inst.kernel[:, 0])
    colsums = mu @ kernel
    if np.any(colsums == 0):
        return None
    kernel = kernel * (old_c / colsums)  # preserve the column constant
    return build_discrete(mu, inst.e_space.masses, kernel, inst.weights,
                          meta=dict(inst.meta))


def _drop_e_atom(inst: Instance, idx: int) -> Instance | None:
    if inst.q <= 1:
        return None
    keep = np.ones(inst.q, dtype=bool)
    keep[idx] = False
    return build_discrete(inst.v_space.masses, inst.e_space.masses[keep],
                          inst.kernel[:, keep], inst.weights[keep],
                          meta=dict(inst.meta))


def _round_sig(a: np.ndarray, digits: int = 3) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    out = np.zeros_like(a)
    nz = a != 0
    mag = np.floor(np.log10(np.abs(a[nz])))
    factor = 10.0 ** (digits - 1 - mag)
    out[nz] = np.round(a[nz] * factor) / factor
    return out


def shrink(inst: Instance, violates) -> Instance:
    """Greedy shrink: drop atoms one at a time (re-normalizing columns
    to preserve c), then round surviving values to 3 significant
    digits, keeping each step only while the violation persists."""
    current = inst
    changed = True
    while changed:
        changed = False
        for idx in range(current.p):
            candidate = _drop_v_atom(current, idx)
            if candidate is not None and violates(candidate):
                current = candidate
                changed = True
                break
        if changed:
            continue
        for idx in range(current.q):
            candidate = _drop_e_atom(current, idx)
            if candidate is not None and violates(candidate):
                current = candidate
                changed = True
                break
    try:
        rounded = build_discrete(_round_sig(current.v_space.masses),
                                 _round_sig(current.e_space.masses),
                                 _round_sig(current.kernel),
                                 _round_sig(current.weights),
                                 meta=dict(current.meta))
        if violates(rounded):
            current = rounded
    except VerifierError:
        pass
    return current


# ---------------------------------------------------------------------------
# sweeps


def parse_phi_family(spec: str) -> list[PhiSpec]:
    """Parse a parameterized family such as ``pow:0.25..4:0.25``; a
    plain phi spec yields a single-element family."""
    if spec.startswith("pow:") and ".." in spec:
        body = spec[4:]
        try:
            range_part, step_part = body.rsplit(":", 1)
            lo_part, hi_part = range_part.split("..")
            lo, hi, step = float(lo_part), float(hi_part), float(step_part)
        except ValueError as exc:
            raise InvalidValueError(f"bad phi family {spec!r}") from exc
        if step <= 0 or hi < lo:
            raise InvalidValueError(f"bad phi family range {spec!r}")
        count = int(round((hi - lo) / step))
        values = [lo + i * step for i in range(count + 1)]
        return [PhiSpec(family="power", exponent=r) for r in values
                if lo - 1e-12 <= r <= hi + 1e-12]
    return [parse_phi(spec)]


def sweep(inst: Instance, family_spec: str, config: SuiteConfig) -> SuiteReport:
    """One row per family member: convex members are checked with the
    main inequality, concave members with the reversal, others skipped."""
    report = SuiteReport()
    iid = inst.instance_id
    profile = characterize(inst, column_tol=config.column_tol)
    for phi in parse_phi_family(family_spec):
        try:
            cert = certify_shape(phi, profile.delta_min, profile.delta_max)
        except VerifierError as exc:
            _skip(report, iid, "sweep", phi.label, str(exc))
            continue
        try:
            if cert.is_convex:
                res = C.main_inequality(profile, phi, tol=config.tol,
                                        eq_tol=config.eq_tol)
            elif cert.is_concave:
                res = C.concave_reversal(profile, phi, tol=config.tol,
                                         eq_tol=config.eq_tol)
            else:
                _skip(report, iid, "sweep", phi.label,
                      f"shape {cert.shape}")
                continue
        except VerifierError as exc:
            _skip(report, iid, "sweep", phi.label, str(exc))
            continue
        report.rows.append(_row(iid, res))
    return report


# ---------------------------------------------------------------------------
# serialization


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv())
    return buf.getvalue()


def report_to_json(report: SuiteReport) -> str:
    payload = {
        "rows": [dict(zip(CSV_HEADER, r.as_csv())) for r in report.rows],
        "skipped": report.skipped,
        "violations": len(report.violations),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def fuzz_report_to_json(report: FuzzReport) -> str:
    payload = {
        "instances_tried": report.instances_tried,
        "seed": report.seed,
        "violations": [asdict(v) for v in report.violations],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def fuzz_report_to_csv(report: FuzzReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "check_name", "phi", "gap", "instance_json"])
    for i, v in enumerate(report.violations):
        writer.writerow([str(i), v.check, v.phi, _fmt(v.gap),
                         json.dumps(v.instance, sort_keys=True)])
    return buf.getvalue()
