"""Degree functional, totals, induced probability measure, and the
structural hypotheses behind the main inequality."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convexity import PhiSpec
from .errors import HypothesisViolation, InvalidValueError
from .model import Instance

__all__ = ["DegreeProfile", "HypothesisReport", "characterize",
           "check_hypotheses", "DEFAULT_COLUMN_TOL"]

# Relative tolerance on column-integral constancy.  Exact constructors
# land around 1e-14; quadrature constructors at discretization level.
DEFAULT_COLUMN_TOL = 1e-9


@dataclass(frozen=True)
class DegreeProfile:
    """Per-atom degrees plus the scalar totals they determine.

    ``rho`` is the induced probability measure delta * mu / (c * s); it
    is populated only when c * s > 0 and every degree is nonnegative,
    and is ``None`` otherwise.
    """

    instance: Instance
    delta: np.ndarray
    s: float
    c: float
    delta_bar: float
    mu_total: float
    rho: np.ndarray | None

    @property
    def delta_min(self) -> float:
        return float(self.delta.min())

    @property
    def delta_max(self) -> float:
        return float(self.delta.max())

    @property
    def delta_spread(self) -> float:
        return self.delta_max - self.delta_min


def _column_integrals(inst: Instance) -> np.ndarray:
    return inst.v_space.masses @ inst.kernel


def characterize(inst: Instance,
                 column_tol: float = DEFAULT_COLUMN_TOL) -> DegreeProfile:
    """Compute delta, s, c, delta_bar, rho and verify the mean identity.

    Raises when the weight mass is not strictly positive or the
    mass-weighted column sums of the kernel are not constant within
    ``column_tol`` (relative to |c|).
    """
    mu = inst.v_space.masses
    tau = inst.e_space.masses
    wt = inst.weights

    s = float(wt @ tau)
    if not s > 0:
        raise HypothesisViolation(f"zero weight mass: s = {s:.17g}")

    cols = _column_integrals(inst)
    c = float(cols[0])
    allowed = column_tol * (abs(c) if c != 0 else 1.0)
    dev = float(np.abs(cols - c).max())
    if dev > allowed:
        raise HypothesisViolation(
            f"column integrals non-constant: max deviation {dev:.3e} "
            f"from c = {c:.17g} exceeds tolerance {allowed:.3e}")

    delta = inst.kernel @ (wt * tau)
    if not np.all(np.isfinite(delta)):
        raise InvalidValueError("non-finite degree value")

    mu_total = float(mu.sum())
    delta_bar = float(delta @ mu) / mu_total
    identity_value = c * s / mu_total
    if abs(delta_bar - identity_value) > 1e-10 * max(1.0, abs(delta_bar)):
        raise HypothesisViolation(
            f"mean-degree identity failed: {delta_bar:.17g} vs "
            f"{identity_value:.17g}")

    cs = c * s
    if cs > 0 and np.all(delta >= 0):
        rho = delta * mu / cs
    else:
        rho = None
    return DegreeProfile(instance=inst, delta=delta, s=s, c=c,
                         delta_bar=delta_bar, mu_total=mu_total, rho=rho)


@dataclass(frozen=True)
class HypothesisEntry:
    name: str
    passed: bool
    value: float
    detail: str


@dataclass(frozen=True)
class HypothesisReport:
    entries: tuple[HypothesisEntry, ...]

    @property
    def all_pass(self) -> bool:
        return all(e.passed for e in self.entries)

    def __getitem__(self, name: str) -> HypothesisEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def check_hypotheses(inst: Instance, phi: PhiSpec,
                     column_tol: float = DEFAULT_COLUMN_TOL
                     ) -> HypothesisReport:
    """Report each structural hypothesis (i)-(vi) as pass/fail.

    Failures are report entries, never exceptions.
    """
    mu = inst.v_space.masses
    tau = inst.e_space.masses
    wt = inst.weights
    entries = []

    mu_total = float(mu.sum())
    entries.append(HypothesisEntry(
        "i", 0 < mu_total < np.inf, mu_total, "total v-mass"))

    s = float(wt @ tau)
    entries.append(HypothesisEntry(
        "ii", 0 < s < np.inf, s, "weight mass s"))

    abs_mass = float(np.abs(inst.kernel) @ (np.abs(wt) * tau) @ mu)
    entries.append(HypothesisEntry(
        "iii", np.isfinite(abs_mass), abs_mass, "absolute kernel-weight mass"))

    cols = _column_integrals(inst)
    c = float(cols[0])
    allowed = column_tol * (abs(c) if c != 0 else 1.0)
    dev = float(np.abs(cols - c).max())
    entries.append(HypothesisEntry(
        "iv", dev <= allowed, dev,
        f"max column deviation from c = {c:.17g}"))

    delta = inst.kernel @ (wt * tau)
    domain = phi.domain
    if inst.interval_domain is not None:
        from .convexity import Interval
        lo, hi = inst.interval_domain
        domain = domain.intersect(Interval(lo, hi, False, False))
    in_domain = bool(np.all(np.isfinite(delta))) and domain.contains(delta)
    entries.append(HypothesisEntry(
        "v", in_domain, float(np.min(delta)),
        f"all degrees inside {domain}"))

    if in_domain:
        phi_abs = np.abs(phi.phi(delta))
        vi_mass = float((phi_abs * mu) @ np.abs(inst.kernel) @ (np.abs(wt) * tau))
        vi_ok = np.isfinite(vi_mass)
    else:
        vi_mass = float("nan")
        vi_ok = False
    entries.append(HypothesisEntry(
        "vi", vi_ok, vi_mass, "absolute phi-weighted mass"))

    return HypothesisReport(tuple(entries))
