"""Uniform hypergraphs: ingestion, generation, degree statistics, and
the geometric-mean-of-geometric-means degree inequality."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .checks import CheckResult, DEFAULT_EQ_TOL, DEFAULT_TOL, _result
from .errors import (DimensionError, GenerationError, InvalidValueError)
from .model import Instance, build_discrete

__all__ = [
    "Hypergraph",
    "DegreeSummary",
    "validate_and_degrees",
    "to_instance",
    "gm_of_gms_check",
    "random_hypergraph",
    "hypergraph_to_dict",
    "hypergraph_from_dict",
]


@dataclass(frozen=True)
class Hypergraph:
    """A k-uniform hypergraph given by its vertex-edge incidence matrix.

    ``incidence[v, e]`` is the multiplicity of vertex v on edge e; every
    column sums to k exactly and no row is all-zero (no isolated
    vertices).  Edge weights default to 1; weights in (0, 1] model
    fuzzy edges.
    """

    incidence: np.ndarray
    k: int
    edge_weights: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        inc = np.array(self.incidence, dtype=int)
        if inc.ndim != 2 or inc.size == 0:
            raise DimensionError("incidence must be a non-empty 2-d array")
        if np.any(inc < 0):
            raise InvalidValueError("incidence entries must be nonnegative")
        inc.setflags(write=False)
        object.__setattr__(self, "incidence", inc)
        if self.k < 1:
            raise InvalidValueError("uniformity constant k must be positive")
        colsums = inc.sum(axis=0)
        if np.any(colsums != self.k):
            raise InvalidValueError(
                f"non-uniform column: sums {colsums.tolist()} vs k = {self.k}")
        if np.any(inc.sum(axis=1) == 0):
            raise InvalidValueError("isolated vertex (all-zero row)")
        if self.edge_weights is None:
            w = np.ones(inc.shape[1])
        else:
            w = np.array(self.edge_weights, dtype=float)
        if w.shape != (inc.shape[1],):
            raise DimensionError("edge_weights length does not match edges")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InvalidValueError("edge weights must be positive and finite")
        w.setflags(write=False)
        object.__setattr__(self, "edge_weights", w)

    @property
    def p(self) -> int:
        return int(self.incidence.shape[0])

    @property
    def q(self) -> int:
        return int(self.incidence.shape[1])

    @property
    def degrees(self) -> np.ndarray:
        return self.incidence.sum(axis=1)

    @property
    def weighted_degrees(self) -> np.ndarray:
        return self.incidence @ self.edge_weights

    @property
    def d_bar(self) -> float:
        return float(Fraction(self.k * self.q, self.p))

    @property
    def regular(self) -> bool:
        d = self.degrees
        return bool(np.all(d == d[0]))


@dataclass(frozen=True)
class DegreeSummary:
    degrees: np.ndarray
    weighted_degrees: np.ndarray
    d_bar: float
    regular: bool


def validate_and_degrees(h: Hypergraph) -> DegreeSummary:
    """Degree summary of an (already validated) hypergraph.

    Uniformity and the absence of isolated vertices are enforced at
    construction; this re-derives the degree statistics.
    """
    return DegreeSummary(degrees=h.degrees,
                         weighted_degrees=h.weighted_degrees,
                         d_bar=h.d_bar,
                         regular=h.regular)


def to_instance(h: Hypergraph) -> Instance:
    """Embed the hypergraph as an instance with unit counting masses.

    The resulting column constant is k and the degree functional equals
    the weighted degrees.
    """
    meta = {"id": h.meta.get("id", f"hypergraph-p{h.p}-q{h.q}-k{h.k}"),
            "kind": "hypergraph", "k": h.k}
    return build_discrete(np.ones(h.p), np.ones(h.q),
                          h.incidence.astype(float), h.edge_weights,
                          meta=meta)


def gm_of_gms_check(h: Hypergraph, tol: float = DEFAULT_TOL,
                    eq_tol: float = DEFAULT_EQ_TOL) -> CheckResult:
    """Geometric mean over edges of per-edge degree geometric means.

    Evaluated in the log domain:
        (1/q) sum_j (1/k) sum_i m_ij ln d_i  >=  ln d_bar,
    with equality iff the hypergraph is regular.  Requires unit edge
    weights and positive degrees.
    """
    if not np.allclose(h.edge_weights, 1.0):
        raise InvalidValueError("gm-of-gms requires unit edge weights")
    d = h.degrees
    if np.any(d <= 0):
        raise InvalidValueError("zero degree")
    log_d = np.log(d.astype(float))
    lhs_log = float(log_d @ h.incidence @ np.ones(h.q)) / (h.k * h.q)
    lhs = float(np.exp(lhs_log))
    rhs = h.d_bar
    return _result("gm-of-gms", lhs, rhs, tol=tol, eq_tol=eq_tol,
                   extras={"regular": h.regular})


def random_hypergraph(p: int, q: int, k: int, seed: int,
                      regular: bool = False,
                      *, max_repairs: int = 1000) -> Hypergraph:
    """Random k-uniform hypergraph, deterministic in ``seed``.

    Each edge is a multiset of k vertices drawn with replacement.
    Isolated vertices are repaired by replacing a slot on a random edge
    rather than redrawing the whole graph, preserving (p, q, k).  With
    ``regular=True`` a round-robin construction guarantees equal
    degrees; infeasible when p does not divide k*q.
    """
    if p < 1 or q < 1 or k < 1:
        raise InvalidValueError("p, q, k must all be at least 1")
    if k * q < p:
        raise GenerationError(
            f"only {k * q} slots for {p} vertices: isolated vertices are "
            f"unavoidable")
    rng = np.random.default_rng(seed)
    meta = {"id": f"hypergraph-p{p}-q{q}-k{k}-seed{seed}"}

    if regular:
        if (k * q) % p != 0:
            raise GenerationError(
                f"regular construction infeasible: {k * q}/{p} is not an "
                f"integer")
        perm = rng.permutation(p)
        inc = np.zeros((p, q), dtype=int)
        slot = 0
        for j in range(q):
            for _ in range(k):
                inc[perm[slot % p], j] += 1
                slot += 1
        return Hypergraph(incidence=inc, k=k, meta=meta)

    inc = np.zeros((p, q), dtype=int)
    for j in range(q):
        for v in rng.integers(0, p, size=k):
            inc[v, j] += 1
    for _ in range(max_repairs):
        isolated = np.flatnonzero(inc.sum(axis=1) == 0)
        if isolated.size == 0:
            break
        v = int(isolated[0])
        # Move one slot to v from the highest-degree vertex; since
        # k*q >= p, some vertex has degree >= 2 while any is isolated.
        donor = int(np.argmax(inc.sum(axis=1)))
        j = int(rng.choice(np.flatnonzero(inc[donor, :] > 0)))
        inc[donor, j] -= 1
        inc[v, j] += 1
    else:
        raise GenerationError("could not repair isolated vertices")
    return Hypergraph(incidence=inc, k=k, meta=meta)


def hypergraph_to_dict(h: Hypergraph) -> dict:
    return {"k": h.k, "incidence": h.incidence.tolist(),
            "edge_weights": h.edge_weights.tolist()}


def hypergraph_from_dict(d) -> Hypergraph:
    try:
        k = int(d["k"])
        incidence = d["incidence"]
    except KeyError as exc:
        raise InvalidValueError(f"hypergraph object missing key {exc}") from exc
    return Hypergraph(incidence=np.asarray(incidence, dtype=int), k=k,
                      edge_weights=(np.asarray(d["edge_weights"], dtype=float)
                                    if "edge_weights" in d else None))
