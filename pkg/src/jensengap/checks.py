"""Both sides of every inequality, with gaps, equality cases, and the
perpetual cross-check between the double-sum and single-sum routes.

Every check computes its left-hand side twice: once as the double sum
over (v-atom, e-atom) pairs and once through the single-sum identity
(1/s) * sum_v f(delta_v) mu_v.  The two must agree to 1e-9 relative;
the double-sum value is what gets reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .convexity import PhiSpec, certify_shape, estimate_alpha
from .degree import DegreeProfile, characterize
from .errors import (DomainError, HypothesisViolation,
                     InternalConsistencyError, InvalidValueError, ShapeError)
from .model import Instance, SequenceModel, restrict_edges

__all__ = [
    "CheckResult",
    "StabilityParams",
    "stability_params",
    "main_inequality",
    "stability_check",
    "concave_reversal",
    "variational_scan",
    "power_mean_chain",
    "marginal_power_mean",
    "entropy_check",
    "erasure_check",
    "geometric_mean_check",
    "sequence_inequalities",
    "DEFAULT_TOL",
    "DEFAULT_EQ_TOL",
]

DEFAULT_TOL = 1e-9
DEFAULT_EQ_TOL = 1e-9
CROSS_CHECK_REL = 1e-9

HOLDS = "holds"
VIOLATED = "violated"
EQUALITY = "equality"


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one inequality evaluation.

    ``gap`` is always lhs - rhs.  For ">=" checks a nonnegative gap is
    expected; for "<=" checks a nonpositive one.  ``bound`` carries the
    slack of a secondary refinement when the check has one.
    """

    check_name: str
    lhs: float
    rhs: float
    gap: float
    status: str
    equality_flag: bool
    tol: float
    bound: float | None = None
    phi_label: str = ""
    direction: str = "ge"
    extras: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status != VIOLATED


def _effective_tol(tol: float, lhs: float, rhs: float) -> float:
    return tol + tol * max(abs(lhs), abs(rhs))


def _result(name: str, lhs: float, rhs: float, *, direction: str = "ge",
            tol: float = DEFAULT_TOL, eq_tol: float = DEFAULT_EQ_TOL,
            gap: float | None = None, bound: float | None = None,
            phi_label: str = "", extras: dict | None = None) -> CheckResult:
    if gap is None:
        gap = lhs - rhs
    eff = _effective_tol(tol, lhs, rhs)
    if direction == "ge":
        violated = gap < -eff
    else:
        violated = gap > eff
    equality_flag = abs(gap) <= eq_tol and not violated
    status = VIOLATED if violated else (EQUALITY if equality_flag else HOLDS)
    return CheckResult(check_name=name, lhs=lhs, rhs=rhs, gap=gap,
                       status=status, equality_flag=equality_flag, tol=tol,
                       bound=bound, phi_label=phi_label, direction=direction,
                       extras=extras or {})


def _cross_check(name: str, double_sum: float, single_sum: float) -> None:
    scale = max(1.0, abs(double_sum), abs(single_sum))
    if abs(double_sum - single_sum) > CROSS_CHECK_REL * scale:
        raise InternalConsistencyError(
            f"{name}: double-sum {double_sum:.17g} and single-sum "
            f"{single_sum:.17g} routes disagree")


def _double_sum(profile: DegreeProfile, per_v_values: np.ndarray) -> float:
    """(1/s) sum_{v,e} value(v) * m_ve * wt_e * mu_v * tau_e."""
    inst = profile.instance
    mu = inst.v_space.masses
    tau = inst.e_space.masses
    wt = inst.weights
    return float((per_v_values * mu) @ inst.kernel @ (wt * tau)) / profile.s


def _lhs_both_routes(profile: DegreeProfile, phi: PhiSpec,
                     name: str) -> float:
    phivals = np.asarray(phi.phi(profile.delta), dtype=float)
    lhs_double = _double_sum(profile, phivals)
    mu = profile.instance.v_space.masses
    lhs_single = float((profile.delta * phivals) @ mu) / profile.s
    _cross_check(name, lhs_double, lhs_single)
    return lhs_double


def _require_interior_mean(profile: DegreeProfile, phi: PhiSpec) -> None:
    if not phi.domain.strictly_contains(profile.delta_bar):
        raise DomainError(
            f"mean degree {profile.delta_bar:.17g} is not strictly inside "
            f"the phi domain {phi.domain}")


def main_inequality(profile: DegreeProfile, phi: PhiSpec,
                    tol: float = DEFAULT_TOL,
                    eq_tol: float = DEFAULT_EQ_TOL,
                    check_name: str = "main") -> CheckResult:
    """The central Jensen-type inequality: lhs >= c * phi(delta_bar)."""
    cert = certify_shape(phi, profile.delta_min, profile.delta_max)
    if not cert.is_convex:
        raise ShapeError(
            f"main inequality requires convex f on the degree range; "
            f"certified {cert.shape}")
    _require_interior_mean(profile, phi)
    lhs = _lhs_both_routes(profile, phi, check_name)
    rhs = profile.c * float(phi.phi(profile.delta_bar))
    return _result(check_name, lhs, rhs, tol=tol, eq_tol=eq_tol,
                   phi_label=phi.label)


@dataclass(frozen=True)
class StabilityParams:
    """Uniform-convexity data for the quantitative refinement."""

    alpha: float
    range: tuple[float, float]
    variance_term: float


def stability_params(profile: DegreeProfile, phi: PhiSpec,
                     m: float | None = None,
                     M: float | None = None) -> StabilityParams:
    """Compute alpha on [m, M] (default: the degree range) and the
    quadratic variance term alpha/(2s) * sum (delta - delta_bar)^2 mu."""
    if m is None:
        m = profile.delta_min
    if M is None:
        M = profile.delta_max
    if m > profile.delta_min or M < profile.delta_max:
        raise InvalidValueError(
            "[m, M] must contain the degree range")
    alpha = estimate_alpha(phi, m, M)
    mu = profile.instance.v_space.masses
    dev = profile.delta - profile.delta_bar
    variance_term = alpha / (2.0 * profile.s) * float((dev * dev) @ mu)
    return StabilityParams(alpha=alpha, range=(m, M),
                           variance_term=variance_term)


def stability_check(profile: DegreeProfile, phi: PhiSpec,
                    params: StabilityParams | None = None,
                    tol: float = DEFAULT_TOL,
                    eq_tol: float = DEFAULT_EQ_TOL) -> CheckResult:
    """Quantitative refinement: lhs >= rhs + alpha/(2s) * variance.

    The reported gap is the refinement slack lhs - rhs - variance_term.
    """
    if params is None:
        params = stability_params(profile, phi)
    base = main_inequality(profile, phi, tol=tol, eq_tol=eq_tol)
    slack = base.gap - params.variance_term
    return _result("stability", base.lhs, base.rhs, gap=slack,
                   bound=params.variance_term, tol=tol, eq_tol=eq_tol,
                   phi_label=phi.label,
                   extras={"alpha": params.alpha, "range": params.range})


def concave_reversal(profile: DegreeProfile, phi: PhiSpec,
                     tol: float = DEFAULT_TOL,
                     eq_tol: float = DEFAULT_EQ_TOL) -> CheckResult:
    """Reversed direction when f is concave: lhs <= c * phi(delta_bar)."""
    cert = certify_shape(phi, profile.delta_min, profile.delta_max)
    if not cert.is_concave:
        raise ShapeError(
            f"reversal requires concave f on the degree range; "
            f"certified {cert.shape}")
    _require_interior_mean(profile, phi)
    lhs = _lhs_both_routes(profile, phi, "concave-reversal")
    rhs = profile.c * float(phi.phi(profile.delta_bar))
    return _result("concave-reversal", lhs, rhs, direction="le",
                   tol=tol, eq_tol=eq_tol, phi_label=phi.label)


def variational_scan(profile: DegreeProfile, phi: PhiSpec,
                     trials: int = 1000, seed: int = 0,
                     tol: float = DEFAULT_TOL,
                     eq_tol: float = DEFAULT_EQ_TOL,
                     perturbation_scale: float = 0.2,
                     max_retries: int = 50) -> CheckResult:
    """Scan random admissible degree profiles for the variational minimum.

    Admissible means sum_v delta'_v mu_v = c*s.  Profiles are generated
    from the constant profile by symmetric pairwise mass transfers,
    rejected if they exit the phi domain, then re-centered exactly.
    The constant profile must attain the minimum of
    F(delta') = (1/s) sum_v f(delta'_v) mu_v.
    """
    cert = certify_shape(phi, profile.delta_min, profile.delta_max)
    if cert.shape != "strictly-convex":
        raise ShapeError(
            f"variational scan requires strictly convex f; got {cert.shape}")
    _require_interior_mean(profile, phi)

    inst = profile.instance
    mu = inst.v_space.masses
    p = inst.p
    s = profile.s
    dbar = profile.delta_bar
    target = profile.c * profile.s
    domain = phi.domain

    def F(delta: np.ndarray) -> float:
        return float(phi.f(delta) @ mu) / s

    f_const = F(np.full(p, dbar))
    rng = np.random.default_rng(seed)
    min_f = f_const
    strict_seen = True
    for _ in range(trials):
        if p == 1:
            min_f = min(min_f, f_const)
            continue
        for _retry in range(max_retries):
            delta = np.full(p, dbar)
            n_moves = int(rng.integers(1, 4))
            for _move in range(n_moves):
                i, j = rng.choice(p, size=2, replace=False)
                eps = rng.uniform(0.0, perturbation_scale * abs(dbar))
                delta[i] += eps / mu[i]
                delta[j] -= eps / mu[j]
            shift = (target - float(delta @ mu)) / profile.mu_total
            delta += shift
            if domain.strictly_contains(delta):
                break
        else:
            raise DomainError(
                "perturbation cannot stay inside the phi domain")
        value = F(delta)
        min_f = min(min_f, value)
        spread = float(delta.max() - delta.min())
        if spread > 1e-9 and value <= f_const + eq_tol:
            strict_seen = False
    return _result("variational", min_f, f_const, tol=tol, eq_tol=eq_tol,
                   phi_label=phi.label,
                   extras={"trials": trials,
                           "strict_on_nonconstant": strict_seen})


def _moment(profile: DegreeProfile, r: float, name: str) -> float:
    """B_r = (1/s) sum_{v,e} delta_v^r m_ve wt_e mu_v tau_e, both routes."""
    delta = profile.delta
    if np.any(delta < 0):
        raise DomainError("negative degree with a power-mean exponent")
    powered = np.power(delta, r)
    b_double = _double_sum(profile, powered)
    mu = profile.instance.v_space.masses
    b_single = float(np.power(delta, r + 1.0) @ mu) / profile.s
    _cross_check(name, b_double, b_single)
    return b_double


def power_mean_chain(profile: DegreeProfile, exponents,
                     variant: str = "normalized",
                     tol: float = DEFAULT_TOL,
                     eq_tol: float = DEFAULT_EQ_TOL) -> list[CheckResult]:
    """Moment-root monotonicity over an ascending list of exponents.

    ``normalized`` asserts (B_p / c)^(1/p) monotone, which is the
    moment-root (Lyapunov) monotonicity for the induced probability
    measure rho.  ``paper-literal`` evaluates the unnormalized roots
    B_p^(1/p); violations of that form are recorded, not raised.
    """
    exponents = [float(r) for r in exponents]
    if exponents != sorted(exponents) or len(exponents) < 2:
        raise InvalidValueError("exponents must be an ascending list")
    if any(r <= 0 for r in exponents):
        raise InvalidValueError("exponents must be positive")
    if variant not in ("normalized", "paper-literal"):
        raise InvalidValueError(f"unknown power-mean variant {variant!r}")
    if variant == "normalized" and not profile.c > 0:
        raise HypothesisViolation("normalized power means require c > 0")
    if np.any(profile.delta < 0):
        raise DomainError("power-mean chain requires nonnegative degrees")

    moments = {r: _moment(profile, r, f"power-mean[{r:g}]")
               for r in exponents}
    results = []
    for r_lo, r_hi in zip(exponents, exponents[1:]):
        if variant == "normalized":
            lhs = (moments[r_hi] / profile.c) ** (1.0 / r_hi)
            rhs = (moments[r_lo] / profile.c) ** (1.0 / r_lo)
        else:
            lhs = moments[r_hi] ** (1.0 / r_hi)
            rhs = moments[r_lo] ** (1.0 / r_lo)
        results.append(_result(
            f"power-mean[{r_lo:g},{r_hi:g}]:{variant}", lhs, rhs,
            tol=tol, eq_tol=eq_tol,
            extras={"B_lo": moments[r_lo], "B_hi": moments[r_hi]}))
    return results


def marginal_power_mean(profile: DegreeProfile, p: float,
                        tol: float = DEFAULT_TOL,
                        eq_tol: float = DEFAULT_EQ_TOL) -> CheckResult:
    """Power-mean inequality for the mu-average of the degrees.

    lhs = ((1/mu(V)) sum delta^p mu)^(1/p), rhs = mu-average of delta.
    ``bound`` carries the slack of the product form
    (1/s) sum delta^p mu >= c * delta_bar^(p-1).
    """
    if p < 1:
        raise InvalidValueError("marginal power mean requires p >= 1")
    delta = profile.delta
    if np.any(delta < 0):
        raise DomainError("marginal power mean requires nonnegative degrees")
    mu = profile.instance.v_space.masses
    mean_p = float(np.power(delta, p) @ mu) / profile.mu_total
    lhs = mean_p ** (1.0 / p)
    rhs = float(delta @ mu) / profile.mu_total

    product_lhs = _moment(profile, p - 1.0, f"marginal-power-mean[{p:g}]")
    product_rhs = profile.c * profile.delta_bar ** (p - 1.0)
    product_slack = product_lhs - product_rhs

    res = _result(f"marginal-power-mean[{p:g}]", lhs, rhs,
                  bound=product_slack, tol=tol, eq_tol=eq_tol)
    if product_slack < -_effective_tol(tol, product_lhs, product_rhs):
        res = CheckResult(**{**res.__dict__, "status": VIOLATED,
                             "equality_flag": False})
    return res


def entropy_check(profile: DegreeProfile,
                  tol: float = DEFAULT_TOL,
                  eq_tol: float = DEFAULT_EQ_TOL) -> CheckResult:
    """Entropy-type functional H <= 0, with H = 0 iff delta constant.

    H = -(1/(c s)) sum_v delta_v ln(delta_v / delta_bar) mu_v, with the
    double-sum route cross-checked.
    """
    delta = profile.delta
    if np.any(delta <= 0):
        raise DomainError("entropy requires strictly positive degrees")
    cs = profile.c * profile.s
    if not cs > 0:
        raise HypothesisViolation("entropy requires c * s > 0")
    mu = profile.instance.v_space.masses
    log_ratio = np.log(delta / profile.delta_bar)
    h_single = -float((delta * log_ratio) @ mu) / cs
    h_double = -_double_sum(profile, log_ratio) * profile.s / cs
    _cross_check("entropy", h_double, h_single)
    return _result("entropy", h_single, 0.0, direction="le",
                   tol=tol, eq_tol=eq_tol, phi_label="log")


def erasure_check(inst: Instance, erased, phi: PhiSpec,
                  tol: float = DEFAULT_TOL,
                  eq_tol: float = DEFAULT_EQ_TOL,
                  column_tol: float | None = None) -> CheckResult:
    """Main inequality after zeroing the weights on the erased e-atoms.

    The column constant c is unchanged (only weights were zeroed), so
    the restricted mean degree is c * s_restricted / mu(V).  The
    alternative constants using the tau-mass of the surviving set are
    reported in ``extras`` for comparison, not asserted.
    """
    restricted = restrict_edges(inst, erased)
    kwargs = {} if column_tol is None else {"column_tol": column_tol}
    profile = characterize(restricted, **kwargs)
    res = main_inequality(profile, phi, tol=tol, eq_tol=eq_tol,
                          check_name="erasure")
    mask = np.atleast_1d(np.asarray(erased, dtype=bool))
    surviving_tau = float(inst.e_space.masses[~mask].sum())
    extras = dict(res.extras)
    extras.update({
        "s_restricted": profile.s,
        "delta_bar_restricted": profile.delta_bar,
        "c_surviving_tau_mass": surviving_tau,
        "delta_bar_alt": surviving_tau * profile.s / profile.mu_total,
    })
    return CheckResult(**{**res.__dict__, "extras": extras,
                          "phi_label": phi.label})


def geometric_mean_check(profile: DegreeProfile,
                         tol: float = DEFAULT_TOL,
                         eq_tol: float = DEFAULT_EQ_TOL,
                         variant: str = "normalized") -> CheckResult:
    """Weighted geometric mean of the degrees against the mean degree.

    The normalized form exponentiates the log-degree double sum divided
    by c*s; it satisfies the constant-degree sanity identity lhs = rhs
    for any c.  The ``paper-literal`` variant divides by s only and is
    recorded for regression purposes.
    """
    delta = profile.delta
    if np.any(delta <= 0):
        raise DomainError("geometric mean requires strictly positive degrees")
    if variant not in ("normalized", "paper-literal"):
        raise InvalidValueError(f"unknown geometric-mean variant {variant!r}")
    mu = profile.instance.v_space.masses
    log_delta = np.log(delta)
    lg_double = _double_sum(profile, log_delta) * profile.s
    lg_single = float((delta * log_delta) @ mu)
    _cross_check("geometric-mean", lg_double, lg_single)
    if variant == "normalized":
        lhs = float(np.exp(lg_double / (profile.c * profile.s)))
        name = "geometric-mean"
    else:
        lhs = float(np.exp(lg_double / profile.s))
        name = "geometric-mean:paper-literal"
    rhs = profile.delta_bar
    return _result(name, lhs, rhs, tol=tol, eq_tol=eq_tol, phi_label="log")


def sequence_inequalities(model: SequenceModel, phi: PhiSpec,
                          tol: float = DEFAULT_TOL,
                          eq_tol: float = DEFAULT_EQ_TOL
                          ) -> tuple[CheckResult, CheckResult]:
    """The two truncated-sequence inequalities.

    First (diagonal kernel, c = 1, any convex f):
        (1/s) sum phi(u_i/a_i) u_i >= phi(s / sum a_i)  with s = sum u_i.
    Second (phi = ln, evaluated in the log domain to avoid overflow):
        sum u_i ln(u_i/a_i) >= (sum u_i) ln(sum u_i / sum a_i).
    Equality in both iff u_i / a_i is constant.
    """
    a, u = model.a, model.u
    s = float(u.sum())
    a_total = float(a.sum())
    ratios = u / a

    cert = certify_shape(phi, float(ratios.min()), float(ratios.max()))
    if not cert.is_convex:
        raise ShapeError(
            f"sequence inequality requires convex f on the ratio range; "
            f"certified {cert.shape}")
    mean_ratio = s / a_total
    if not phi.domain.strictly_contains(mean_ratio):
        raise DomainError("mean ratio outside the phi domain")
    lhs1 = float(phi.phi(ratios) @ u) / s
    rhs1 = float(phi.phi(mean_ratio))
    first = _result("sequence-diagonal", lhs1, rhs1, tol=tol, eq_tol=eq_tol,
                    phi_label=phi.label)

    log_ratios = np.log(ratios)
    lhs2 = float(u @ log_ratios)
    rhs2 = s * float(np.log(mean_ratio))
    second = _result("sequence-product-log", lhs2, rhs2, tol=tol,
                     eq_tol=eq_tol, phi_label="log")
    return first, second
