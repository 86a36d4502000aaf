"""Atomic measure-space instances and their constructors.

Every pairing of measure spaces handled by this package -- finite
matrices, truncated weighted sequence spaces, and quadrature-discretized
intervals -- is represented by the same atomic :class:`Instance`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DimensionError, GenerationError, InvalidValueError

__all__ = [
    "AtomicSpace",
    "Instance",
    "QuadratureScheme",
    "SequenceModel",
    "build_discrete",
    "from_sequences",
    "from_interval",
    "restrict_edges",
    "random_instance",
    "instance_to_dict",
    "instance_from_dict",
]


def _as_readonly(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class AtomicSpace:
    """A finite positive measure space: one mass per atom."""

    masses: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        masses = _as_readonly(np.atleast_1d(self.masses))
        object.__setattr__(self, "masses", masses)
        if masses.ndim != 1 or masses.size == 0:
            raise DimensionError("masses must be a non-empty 1-d array")
        if not np.all(np.isfinite(masses)):
            raise InvalidValueError("non-finite mass")
        if np.any(masses <= 0):
            raise InvalidValueError("non-positive mass")
        if self.labels is not None and len(self.labels) != masses.size:
            raise DimensionError("labels length does not match atom count")

    @property
    def atom_count(self) -> int:
        return int(self.masses.size)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())


@dataclass(frozen=True)
class Instance:
    """A pair of atomic spaces with a kernel and edge weights.

    ``kernel[v, e]`` is the kernel value on the (v-atom, e-atom) pair;
    ``weights[e]`` is the weight attached to each e-atom.  Column
    constancy of the mass-weighted kernel sums is *not* enforced here;
    it is checked on demand by :func:`jensengap.degree.characterize`.
    """

    v_space: AtomicSpace
    e_space: AtomicSpace
    kernel: np.ndarray
    weights: np.ndarray
    interval_domain: tuple[float, float] | None = None
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        kernel = _as_readonly(np.atleast_2d(self.kernel))
        weights = _as_readonly(np.atleast_1d(self.weights))
        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "weights", weights)
        p, q = self.v_space.atom_count, self.e_space.atom_count
        if kernel.shape != (p, q):
            raise DimensionError(
                f"kernel shape {kernel.shape} does not match spaces ({p}, {q})"
            )
        if weights.shape != (q,):
            raise DimensionError("weights length does not match e-atom count")
        if not np.all(np.isfinite(kernel)):
            raise InvalidValueError("non-finite kernel entry")
        if not np.all(np.isfinite(weights)):
            raise InvalidValueError("non-finite weight")

    @property
    def p(self) -> int:
        return self.v_space.atom_count

    @property
    def q(self) -> int:
        return self.e_space.atom_count

    @property
    def instance_id(self) -> str:
        return str(self.meta.get("id", "instance"))


@dataclass(frozen=True)
class QuadratureScheme:
    """A fixed quadrature rule on a closed interval."""

    rule: str  # "midpoint" | "trapezoid-periodic" | "gauss-legendre"
    node_count: int
    interval: tuple[float, float]

    _RULES = ("midpoint", "trapezoid-periodic", "gauss-legendre")

    def __post_init__(self):
        if self.rule not in self._RULES:
            raise InvalidValueError(f"unknown quadrature rule {self.rule!r}")
        if self.node_count < 1:
            raise InvalidValueError("node_count must be positive")
        a, b = self.interval
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise InvalidValueError("interval must be finite with a < b")

    def nodes_weights(self) -> tuple[np.ndarray, np.ndarray]:
        a, b = self.interval
        n = self.node_count
        length = b - a
        if self.rule == "midpoint":
            x = a + (np.arange(n) + 0.5) * (length / n)
            w = np.full(n, length / n)
        elif self.rule == "trapezoid-periodic":
            # n distinct nodes; the endpoint b is identified with a.
            x = a + np.arange(n) * (length / n)
            w = np.full(n, length / n)
        else:  # gauss-legendre
            x, w = np.polynomial.legendre.leggauss(n)
            x = a + 0.5 * length * (x + 1.0)
            w = 0.5 * length * w
        assert np.all((x >= a) & (x <= b))
        assert np.all(w > 0)
        assert abs(w.sum() - length) <= 1e-12 * max(1.0, abs(length))
        return x, w


@dataclass(frozen=True)
class SequenceModel:
    """Truncated weighted counting measures on the nonnegative integers.

    ``a`` carries the v-space masses, ``b`` the e-space masses, ``w``
    the weight sequence, and ``u = w * b`` the combined weight that the
    checks report in.
    """

    a: np.ndarray
    b: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        a = _as_readonly(np.atleast_1d(self.a))
        b = _as_readonly(np.atleast_1d(self.b))
        w = _as_readonly(np.atleast_1d(self.w))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "w", w)
        if not (a.size == b.size == w.size) or a.size == 0:
            raise DimensionError("a, b, w must share a positive truncation length")
        for name, seq in (("a", a), ("b", b), ("w", w)):
            if not np.all(np.isfinite(seq)):
                raise InvalidValueError(f"non-finite entry in {name}")
            if np.any(seq <= 0):
                raise InvalidValueError(f"non-positive entry in {name}")

    @classmethod
    def from_a_u(cls, a, u) -> "SequenceModel":
        """Build from (a, u) with unit b, so that w == u."""
        a = np.atleast_1d(np.asarray(a, dtype=float))
        u = np.atleast_1d(np.asarray(u, dtype=float))
        return cls(a=a, b=np.ones_like(u), w=u)

    @property
    def u(self) -> np.ndarray:
        return self.w * self.b

    @property
    def truncation_length(self) -> int:
        return int(self.a.size)


def build_discrete(v_masses, e_masses, kernel, weights, *, meta=None) -> Instance:
    """Finite matrix instance: all integrals become finite sums."""
    return Instance(
        v_space=AtomicSpace(np.asarray(v_masses, dtype=float)),
        e_space=AtomicSpace(np.asarray(e_masses, dtype=float)),
        kernel=np.asarray(kernel, dtype=float),
        weights=np.asarray(weights, dtype=float),
        meta=meta or {},
    )


def from_sequences(model: SequenceModel, kernel_spec: Callable[[int, int], float],
                   *, meta=None) -> Instance:
    """Instance over truncated sequence spaces.

    ``kernel_spec(i, j)`` gives the kernel entry on the truncated index
    square.  Tail mass beyond the truncation is the caller's
    responsibility; the truncated totals are recorded in ``meta``.
    """
    n = model.truncation_length
    kernel = np.array(
        [[float(kernel_spec(i, j)) for j in range(n)] for i in range(n)]
    )
    base = dict(meta or {})
    base.setdefault("truncated_mu_total", float(model.a.sum()))
    base.setdefault("truncated_u_total", float(model.u.sum()))
    return Instance(
        v_space=AtomicSpace(model.a.copy()),
        e_space=AtomicSpace(model.b.copy()),
        kernel=kernel,
        weights=model.w.copy(),
        meta=base,
    )


def diagonal_kernel(a) -> Callable[[int, int], float]:
    """The kernel with 1 / a_i on the diagonal, zero elsewhere."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    return lambda i, j: 1.0 / a[i] if i == j else 0.0


def from_interval(kernel_fn: Callable[[float, float], float],
                  wt_fn: Callable[[float], float],
                  scheme_v: QuadratureScheme,
                  scheme_e: QuadratureScheme,
                  *, meta=None) -> Instance:
    """Quadrature-discretized instance on a pair of real intervals.

    Atoms are quadrature nodes, masses are quadrature weights, and the
    kernel and weights are pointwise evaluations.
    """
    xv, wv = scheme_v.nodes_weights()
    xe, we = scheme_e.nodes_weights()
    kernel = np.array([[float(kernel_fn(v, e)) for e in xe] for v in xv])
    weights = np.array([float(wt_fn(e)) for e in xe])
    if not np.all(np.isfinite(kernel)) or not np.all(np.isfinite(weights)):
        raise InvalidValueError("function evaluation returned a non-finite value")
    return Instance(
        v_space=AtomicSpace(wv, labels=tuple(xv)),
        e_space=AtomicSpace(we, labels=tuple(xe)),
        kernel=kernel,
        weights=weights,
        meta=meta or {},
    )


def restrict_edges(inst: Instance, erased) -> Instance:
    """Zero the weights on the erased e-atoms, leaving everything else.

    The e-space masses are unchanged, so the constant column integral c
    is unchanged too.
    """
    mask = np.atleast_1d(np.asarray(erased, dtype=bool))
    if mask.shape != (inst.q,):
        raise DimensionError("erased mask length does not match e-atom count")
    weights = inst.weights.copy()
    weights[mask] = 0.0
    return Instance(
        v_space=inst.v_space,
        e_space=inst.e_space,
        kernel=inst.kernel,
        weights=weights,
        interval_domain=inst.interval_domain,
        meta=dict(inst.meta),
    )


def random_instance(p: int, q: int, c: float, seed: int,
                    weight_range: tuple[float, float] = (0.5, 2.0),
                    *, max_redraws: int = 100) -> Instance:
    """Random admissible instance with unit masses.

    Kernel entries are drawn nonnegative and each column rescaled so its
    mass-weighted sum equals ``c``; weights are uniform in
    ``weight_range``.  Deterministic in ``seed``.
    """
    if p < 1 or q < 1:
        raise InvalidValueError("p and q must be at least 1")
    if not (c > 0):
        raise InvalidValueError("c must be positive")
    lo, hi = weight_range
    if not (0 < lo <= hi):
        raise InvalidValueError("weight_range must be a positive interval")
    rng = np.random.default_rng(seed)
    kernel = rng.uniform(0.0, 1.0, size=(p, q))
    for _ in range(max_redraws):
        colsums = kernel.sum(axis=0)  # unit masses
        bad = colsums <= 0
        if not bad.any():
            break
        kernel[:, bad] = rng.uniform(0.0, 1.0, size=(p, int(bad.sum())))
    else:
        raise GenerationError("degenerate kernel column after retry budget")
    kernel = kernel * (c / kernel.sum(axis=0))
    weights = rng.uniform(lo, hi, size=q)
    return build_discrete(
        np.ones(p), np.ones(q), kernel, weights,
        meta={"id": f"matrix-p{p}-q{q}-seed{seed}"},
    )


def instance_to_dict(inst: Instance) -> dict:
    d = {
        "v_masses": inst.v_space.masses.tolist(),
        "e_masses": inst.e_space.masses.tolist(),
        "kernel": inst.kernel.tolist(),
        "weights": inst.weights.tolist(),
    }
    if inst.interval_domain is not None:
        d["interval_domain"] = list(inst.interval_domain)
    if inst.meta:
        d["meta"] = dict(inst.meta)
    return d


def instance_from_dict(d: Mapping) -> Instance:
    try:
        v_masses = d["v_masses"]
        e_masses = d["e_masses"]
        kernel = d["kernel"]
        weights = d["weights"]
    except KeyError as exc:
        raise InvalidValueError(f"instance object missing key {exc}") from exc
    domain = d.get("interval_domain")
    return Instance(
        v_space=AtomicSpace(np.asarray(v_masses, dtype=float)),
        e_space=AtomicSpace(np.asarray(e_masses, dtype=float)),
        kernel=np.asarray(kernel, dtype=float),
        weights=np.asarray(weights, dtype=float),
        interval_domain=tuple(domain) if domain is not None else None,
        meta=dict(d.get("meta", {})),
    )
