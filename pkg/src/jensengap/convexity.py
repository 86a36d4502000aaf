"""The function phi, its derived f(t) = t*phi(t), and shape certification.

Analytic families (log, power, identity) are classified from the
closed-form second derivative of f and the result is exact.  Tabulated
functions are interpolated linearly and can only be certified via the
shape the user declared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidValueError, ShapeError

__all__ = [
    "Interval",
    "PhiSpec",
    "ShapeCertificate",
    "certify_shape",
    "estimate_alpha",
    "parse_phi",
]

# Absolute tolerance on finite-difference f'' for convexity claims.
FD_SHAPE_TOL = 1e-9

CONVEX = "convex"
STRICTLY_CONVEX = "strictly-convex"
CONCAVE = "concave"
STRICTLY_CONCAVE = "strictly-concave"
UNKNOWN = "unknown"

_CONVEX_SHAPES = (CONVEX, STRICTLY_CONVEX)
_CONCAVE_SHAPES = (CONCAVE, STRICTLY_CONCAVE)


@dataclass(frozen=True)
class Interval:
    """A real interval with open or closed endpoints, possibly infinite."""

    lo: float = -math.inf
    hi: float = math.inf
    lo_open: bool = True
    hi_open: bool = True

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        lo_ok = (x > self.lo) if self.lo_open else (x >= self.lo)
        hi_ok = (x < self.hi) if self.hi_open else (x <= self.hi)
        return bool(np.all(lo_ok & hi_ok))

    def strictly_contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all((x > self.lo) & (x < self.hi)))

    def intersect(self, other: "Interval") -> "Interval":
        if other.lo > self.lo or (other.lo == self.lo and other.lo_open):
            lo, lo_open = other.lo, other.lo_open
        else:
            lo, lo_open = self.lo, self.lo_open
        if other.hi < self.hi or (other.hi == self.hi and other.hi_open):
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open
        return Interval(lo, hi, lo_open, hi_open)

    def __str__(self):
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo}, {self.hi}{right}"


POSITIVE_REALS = Interval(0.0, math.inf, True, True)
ALL_REALS = Interval()


@dataclass(frozen=True)
class PhiSpec:
    """phi, its domain interval, and (for tabulated phi) a declared shape.

    ``family`` is one of ``log``, ``identity``, ``power`` (with
    ``exponent`` r, meaning phi(t) = t**r), or ``custom`` (linear
    interpolation of ``table``).
    """

    family: str
    exponent: float | None = None
    domain: Interval = field(default=None)  # resolved in __post_init__
    declared_shape: str = UNKNOWN
    table: tuple[tuple[float, ...], tuple[float, ...]] | None = None
    name: str | None = None

    def __post_init__(self):
        if self.family not in ("log", "identity", "power", "custom"):
            raise InvalidValueError(f"unknown phi family {self.family!r}")
        if self.family == "power" and self.exponent is None:
            raise InvalidValueError("power family requires an exponent")
        if self.family == "custom" and self.table is None:
            raise InvalidValueError("custom family requires a table")
        if self.domain is None:
            if self.family == "identity":
                dom = ALL_REALS
            elif self.family == "custom":
                ts = self.table[0]
                dom = Interval(min(ts), max(ts), False, False)
            else:
                dom = POSITIVE_REALS
            object.__setattr__(self, "domain", dom)
        if self.family in ("log",) and self.domain.lo < 0:
            raise InvalidValueError("log requires a domain inside (0, inf)")
        if (self.family == "power" and self.exponent < 0
                and self.domain.lo < 0):
            raise InvalidValueError(
                "negative power exponents require a domain inside (0, inf)")

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.family == "identity":
            return "id"
        if self.family == "power":
            return f"pow:{self.exponent:g}"
        return self.family

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        if not self.domain.contains(t):
            raise DomainError(f"phi argument outside domain {self.domain}")
        if self.family == "log":
            return np.log(t)
        if self.family == "identity":
            return t + 0.0
        if self.family == "power":
            return np.power(t, self.exponent)
        ts, vs = self.table
        return np.interp(t, ts, vs)

    def f(self, t):
        t = np.asarray(t, dtype=float)
        return t * self.phi(t)

    @property
    def analytic(self) -> bool:
        return self.family != "custom"

    def f_second(self, t):
        """Closed-form f'' for analytic families."""
        t = np.asarray(t, dtype=float)
        if self.family == "log":
            return 1.0 / t
        if self.family == "identity":
            return np.full_like(t, 2.0)
        if self.family == "power":
            r = self.exponent
            return (r + 1.0) * r * np.power(t, r - 1.0)
        raise ShapeError("custom phi has no closed-form second derivative")


@dataclass(frozen=True)
class ShapeCertificate:
    shape: str
    grid: np.ndarray
    min_f_second: float
    max_f_second: float
    tolerance: float

    @property
    def is_convex(self) -> bool:
        return self.shape in _CONVEX_SHAPES

    @property
    def is_concave(self) -> bool:
        return self.shape in _CONCAVE_SHAPES


def _classify(min_fpp: float, max_fpp: float, tol: float) -> str:
    if min_fpp > tol:
        return STRICTLY_CONVEX
    if min_fpp >= -tol:
        return CONVEX
    if max_fpp < -tol:
        return STRICTLY_CONCAVE
    if max_fpp <= tol:
        return CONCAVE
    return UNKNOWN


def certify_shape(phi: PhiSpec, lo: float, hi: float, grid_size: int = 64,
                  method: str = "auto") -> ShapeCertificate:
    """Classify f(t) = t*phi(t) on [lo, hi].

    ``method="auto"`` uses the closed-form second derivative for
    analytic families; ``method="finite-difference"`` forces central
    differences on the grid (used to cross-check the closed forms).
    """
    if hi < lo:
        raise InvalidValueError("empty certification range")
    if not phi.domain.contains([lo, hi]):
        raise DomainError(
            f"certification range [{lo}, {hi}] exits domain {phi.domain}")
    if grid_size < 3:
        raise InvalidValueError("grid_size must be at least 3")

    if lo == hi:
        # Constant delta: every inequality is an identity.  The
        # certificate classifies by the sign of f''(lo) so that both the
        # convex and the concave checks accept a constant profile, and
        # alpha = f''(lo) when convex.
        fpp = float(phi.f_second(lo)) if phi.analytic else 0.0
        shape = _classify(fpp, fpp, 0.0) if phi.analytic else CONVEX
        return ShapeCertificate(shape, np.array([lo]), fpp, fpp, FD_SHAPE_TOL)

    grid = np.linspace(lo, hi, grid_size)

    if method == "auto" and phi.family == "custom":
        shape = (phi.declared_shape
                 if phi.declared_shape != UNKNOWN else UNKNOWN)
        fpp = _finite_difference_f_second(phi, grid)
        return ShapeCertificate(shape, grid, float(fpp.min()),
                                float(fpp.max()), FD_SHAPE_TOL)

    if method == "auto" and phi.analytic:
        fpp = phi.f_second(grid)
        # f'' is monotone in t for each analytic family, so the extrema
        # over [lo, hi] are attained at the endpoints.
        ends = phi.f_second(np.array([lo, hi]))
        mn, mx = float(ends.min()), float(ends.max())
        shape = _classify(mn, mx, 0.0)
        return ShapeCertificate(shape, grid, mn, mx, 0.0)

    fpp = _finite_difference_f_second(phi, grid)
    mn, mx = float(fpp.min()), float(fpp.max())
    return ShapeCertificate(_classify(mn, mx, FD_SHAPE_TOL), grid, mn, mx,
                            FD_SHAPE_TOL)


def _finite_difference_f_second(phi: PhiSpec, grid: np.ndarray) -> np.ndarray:
    h = grid[1] - grid[0]
    inner = grid[1:-1]
    f = phi.f
    return (f(inner + h) - 2.0 * f(inner) + f(inner - h)) / (h * h)


def estimate_alpha(phi: PhiSpec, lo: float, hi: float,
                   grid_size: int = 64) -> float:
    """Lower bound alpha on f'' over [lo, hi] (0 when f'' touches 0)."""
    cert = certify_shape(phi, lo, hi, grid_size)
    if not cert.is_convex:
        raise ShapeError(
            f"alpha requires a convex f on [{lo}, {hi}]; got {cert.shape}")
    return max(0.0, cert.min_f_second)


def parse_phi(spec: str) -> PhiSpec:
    """Parse a phi specification string: ``log``, ``id``, or ``pow:<r>``."""
    spec = spec.strip()
    if spec == "log":
        return PhiSpec(family="log")
    if spec == "id":
        return PhiSpec(family="identity")
    if spec.startswith("pow:"):
        try:
            r = float(spec[4:])
        except ValueError as exc:
            raise InvalidValueError(f"bad power exponent in {spec!r}") from exc
        return PhiSpec(family="power", exponent=r)
    raise InvalidValueError(f"unrecognized phi spec {spec!r}")
