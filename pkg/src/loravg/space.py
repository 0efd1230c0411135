"""Finite atomic metric measure spaces.

A space is a finite set of atoms 0..n-1 with a metric given by a full
distance matrix and a strictly positive weight per atom.  Every closed
ball B(x, r) = {y : d(x, y) <= r} then has measure in (0, mu(X)], and all
set operations are finite enumerations, so the quantities studied here
(doubling constants, Vitali subfamilies, symmetric differences) are exact
up to floating-point rounding.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, MetricViolationError

DEFAULT_MAX_ATOMS = 5000
MAX_ATOMS_ENV = "LORAVG_MAX_ATOMS"

# Relative fuzz for triangle validation; computed metrics (e.g. euclidean
# distances) can violate the exact inequality by a few ulps.
_TRIANGLE_RTOL = 1e-12


def _max_atoms() -> int:
    raw = os.environ.get(MAX_ATOMS_ENV)
    return int(raw) if raw else DEFAULT_MAX_ATOMS


def validate_metric(dist: np.ndarray) -> None:
    """Check symmetry, zero diagonal, nonnegativity and all triangles.

    O(n^3), vectorized one pivot at a time.  Raises MetricViolationError
    with a witness triple (i, k, j) on the first triangle failure.
    """
    n = dist.shape[0]
    if dist.shape != (n, n):
        raise MetricViolationError("distance matrix must be square")
    if not np.all(np.isfinite(dist)):
        raise MetricViolationError("distances must be finite")
    if np.any(dist < 0):
        raise MetricViolationError("distances must be nonnegative")
    if np.any(np.diagonal(dist) != 0):
        raise MetricViolationError("diagonal must be zero")
    if not np.array_equal(dist, dist.T):
        i, j = np.argwhere(dist != dist.T)[0]
        raise MetricViolationError(f"matrix not symmetric at ({i},{j})")
    tol = _TRIANGLE_RTOL * max(dist.max(), 1.0)
    for k in range(n):
        bad = dist > dist[:, k, None] + dist[None, k, :] + tol
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise MetricViolationError(
                f"triangle violation: d({i},{j})={dist[i, j]} > "
                f"d({i},{k})+d({k},{j})={dist[i, k] + dist[k, j]}",
                witness=(i, k, j),
            )


@dataclass(frozen=True)
class MetricMeasureSpace:
    """Atoms 0..n-1 with a distance matrix and positive atom weights."""

    dist: np.ndarray
    weights: np.ndarray
    metric_by_construction: bool = field(default=False, compare=False)

    def __post_init__(self):
        dist = np.ascontiguousarray(np.asarray(self.dist, dtype=float))
        weights = np.ascontiguousarray(np.asarray(self.weights, dtype=float))
        if weights.ndim != 1 or dist.shape != (weights.size, weights.size):
            raise DomainError("need an n x n distance matrix and n weights")
        if weights.size == 0:
            raise DomainError("space must contain at least one atom")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise DomainError("atom weights must be positive and finite")
        if not self.metric_by_construction:
            if weights.size > _max_atoms():
                raise DomainError(
                    f"{weights.size} atoms exceeds the validation cap "
                    f"({_max_atoms()}); set {MAX_ATOMS_ENV} or build with "
                    "metric_by_construction=True for a metric known to be valid"
                )
            validate_metric(dist)
        dist.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "weights", weights)

    @property
    def natoms(self) -> int:
        return self.weights.size

    @property
    def total_measure(self) -> float:
        return float(self.weights.sum())

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    def measure(self, atoms) -> float:
        """mu(A) for A given as an index array or boolean mask."""
        atoms = np.asarray(atoms)
        if atoms.dtype == bool:
            return float(self.weights[atoms].sum())
        return float(self.weights[atoms].sum())

    def ball_mask(self, x: int, r: float) -> np.ndarray:
        """Boolean mask of the closed ball B(x, r)."""
        self._check_atom(x)
        if r < 0:
            raise DomainError("radius must be nonnegative")
        return self.dist[x] <= r

    def ball_masks(self, r: float) -> np.ndarray:
        """(n, n) boolean array; row x is the mask of B(x, r)."""
        if r < 0:
            raise DomainError("radius must be nonnegative")
        return self.dist <= r

    def ball_measures(self, r: float) -> np.ndarray:
        """mu(B(x, r)) for every atom x at once."""
        return (self.ball_masks(r) * self.weights).sum(axis=1)

    def _check_atom(self, x: int) -> None:
        if not 0 <= x < self.natoms:
            raise DomainError(f"atom index {x} out of range 0..{self.natoms - 1}")

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_matrix(cls, dist, weights, skip_validation: bool = False):
        return cls(np.asarray(dist, dtype=float), np.asarray(weights, dtype=float),
                   metric_by_construction=skip_validation)

    @classmethod
    def from_cloud(cls, coords, metric: str = "euclidean", weights=None):
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        if coords.ndim != 2:
            raise DomainError("coords must be a 2-D array of points")
        diff = coords[:, None, :] - coords[None, :, :]
        if metric == "euclidean":
            dist = np.sqrt((diff ** 2).sum(axis=2))
        elif metric == "l1":
            dist = np.abs(diff).sum(axis=2)
        elif metric == "linf":
            dist = np.abs(diff).max(axis=2)
        else:
            raise DomainError(f"unknown metric {metric!r}")
        dist = np.maximum(dist, dist.T)  # exact symmetry despite rounding
        np.fill_diagonal(dist, 0.0)
        if weights is None:
            weights = np.ones(coords.shape[0])
        return cls(dist, np.asarray(weights, dtype=float), metric_by_construction=True)

    @classmethod
    def lattice(cls, L: int):
        """Atoms {0..L} on the line, distance |x - y|, unit weights."""
        if L < 0:
            raise DomainError("lattice size must be >= 0")
        idx = np.arange(L + 1, dtype=float)
        dist = np.abs(idx[:, None] - idx[None, :])
        return cls(dist, np.ones(L + 1), metric_by_construction=True)

    @classmethod
    def from_graph(cls, n: int, edges, weights=None):
        """Shortest-path metric of an undirected positively weighted graph."""
        from scipy.sparse import coo_matrix
        from scipy.sparse.csgraph import shortest_path

        edges = list(edges)
        if any(len(e) != 3 for e in edges):
            raise DomainError("edges must be (u, v, weight) triples")
        u = np.array([e[0] for e in edges], dtype=int)
        v = np.array([e[1] for e in edges], dtype=int)
        w = np.array([e[2] for e in edges], dtype=float)
        if np.any(w <= 0):
            raise DomainError("edge weights must be positive")
        if edges and (u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= n):
            raise DomainError("edge endpoint out of range")
        graph = coo_matrix((np.r_[w, w], (np.r_[u, v], np.r_[v, u])), shape=(n, n))
        dist = shortest_path(graph, method="D", directed=False)
        if not np.all(np.isfinite(dist)):
            raise DomainError("graph is not connected")
        dist = np.minimum(dist, dist.T)
        if weights is None:
            weights = np.ones(n)
        return cls(dist, np.asarray(weights, dtype=float), metric_by_construction=True)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        """Canonical JSON form: explicit matrix plus weights."""
        return {
            "kind": "matrix",
            "dist": self.dist.tolist(),
            "weights": self.weights.tolist(),
        }


def build_space(spec: dict) -> MetricMeasureSpace:
    """Build a space from its JSON description.

    kind "matrix" needs "dist"; "cloud" needs "coords" (+ optional
    "metric"); "lattice" needs "L"; "graph" needs "n" and "edges" as
    [u, v, weight] triples.  "weights" defaults to 1.0 per atom.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("space description must be an object with a 'kind'")
    kind = spec["kind"]
    weights = spec.get("weights")
    if kind == "matrix":
        if "dist" not in spec:
            raise DomainError("matrix space needs a 'dist' field")
        dist = np.asarray(spec["dist"], dtype=float)
        if weights is None:
            weights = np.ones(dist.shape[0])
        return MetricMeasureSpace.from_matrix(
            dist, weights, skip_validation=bool(spec.get("skip_validation", False)))
    if kind == "cloud":
        if "coords" not in spec:
            raise DomainError("cloud space needs a 'coords' field")
        return MetricMeasureSpace.from_cloud(
            spec["coords"], metric=spec.get("metric", "euclidean"), weights=weights)
    if kind == "lattice":
        if "L" not in spec:
            raise DomainError("lattice space needs an 'L' field")
        space = MetricMeasureSpace.lattice(int(spec["L"]))
        if weights is not None:
            return MetricMeasureSpace.from_matrix(space.dist, weights,
                                                  skip_validation=True)
        return space
    if kind == "graph":
        if "n" not in spec or "edges" not in spec:
            raise DomainError("graph space needs 'n' and 'edges' fields")
        return MetricMeasureSpace.from_graph(int(spec["n"]), spec["edges"],
                                             weights=weights)
    raise DomainError(f"unknown space kind {kind!r}")


def ball(space: MetricMeasureSpace, x: int, r: float):
    """Closed ball B(x, r): (sorted atom indices, measure)."""
    mask = space.ball_mask(x, r)
    return np.flatnonzero(mask), float(space.weights[mask].sum())


@dataclass(frozen=True)
class DoublingReport:
    """Tight doubling data at one scale: gamma = sup_x mu(B(x,2s))/mu(B(x,s))."""

    scale: float
    gamma: float
    ratios: np.ndarray
    argmax_atom: int


def doubling_constant(space: MetricMeasureSpace, s: float) -> DoublingReport:
    """Tight s-doubling constant; finite spaces are always s-doubling."""
    if s <= 0:
        raise DomainError("doubling scale must be positive")
    small = space.ball_measures(s)
    big = space.ball_measures(2 * s)
    ratios = big / small
    argmax = int(np.argmax(ratios))
    return DoublingReport(scale=float(s), gamma=float(ratios[argmax]),
                          ratios=ratios, argmax_atom=argmax)


def separated_points(space: MetricMeasureSpace, delta: float, k: int) -> list[int]:
    """Up to k atoms with pairwise distance strictly greater than delta.

    Greedy scan in index order starting from atom 0; may return fewer
    than k points when the space cannot host them.
    """
    if delta <= 0:
        raise DomainError("separation delta must be positive")
    if k < 1:
        raise DomainError("need k >= 1")
    chosen: list[int] = []
    for x in range(space.natoms):
        if all(space.dist[x, y] > delta for y in chosen):
            chosen.append(x)
            if len(chosen) == k:
                break
    return chosen


def vitali_subfamily(space: MetricMeasureSpace, balls):
    """Disjoint subfamily whose 5x-enlarged balls cover the input union.

    Greedy in decreasing radius (ties by lower center index); a ball is
    kept iff it shares no atom with any previously kept ball.  Both the
    disjointness and the 5x coverage are asserted before returning.
    """
    balls = [(int(c), float(r)) for c, r in balls]
    for c, r in balls:
        space._check_atom(c)
        if not (np.isfinite(r) and r >= 0):
            raise DomainError("ball radii must be finite and nonnegative")
    order = sorted(range(len(balls)), key=lambda i: (-balls[i][1], balls[i][0]))
    kept: list[tuple[int, float]] = []
    covered = np.zeros(space.natoms, dtype=bool)
    for i in order:
        c, r = balls[i]
        mask = space.ball_mask(c, r)
        if not (mask & covered).any():
            kept.append((c, r))
            covered |= mask
    kept_union5 = np.zeros(space.natoms, dtype=bool)
    for c, r in kept:
        kept_union5 |= space.ball_mask(c, 5 * r)
    input_union = np.zeros(space.natoms, dtype=bool)
    for c, r in balls:
        input_union |= space.ball_mask(c, r)
    assert not np.any(input_union & ~kept_union5), "5r enlargement must cover"
    kept_masks = [space.ball_mask(c, r) for c, r in kept]
    for i in range(len(kept_masks)):
        for j in range(i + 1, len(kept_masks)):
            assert not (kept_masks[i] & kept_masks[j]).any(), "kept balls overlap"
    return kept


def symm_diff_measure(space: MetricMeasureSpace, x: int, y: int, r: float) -> float:
    """mu(B(x,r) symmetric-difference B(y,r)); zero iff equal atom sets."""
    mx = space.ball_mask(x, r)
    my = space.ball_mask(y, r)
    return float(space.weights[mx ^ my].sum())


@dataclass(frozen=True)
class BoundednessReport:
    """The quantities linking boundedness, doubling and total boundedness."""

    radius: float
    diameter: float
    total_measure: float
    min_ball_measure: float
    min_ball_ratio: float  # inf_x mu(B(x,r)) / mu(B(x,2r))
    doubling_r: DoublingReport
    doubling_2r: DoublingReport
    doubling_4r: DoublingReport


def min_ball_ratio(space: MetricMeasureSpace, r: float) -> float:
    """inf over atoms of mu(B(x,r))/mu(B(x,2r)); the witness separation constant."""
    if r <= 0:
        raise DomainError("radius must be positive")
    return float((space.ball_measures(r) / space.ball_measures(2 * r)).min())


def boundedness_report(space: MetricMeasureSpace, r: float) -> BoundednessReport:
    if r <= 0:
        raise DomainError("radius must be positive")
    return BoundednessReport(
        radius=float(r),
        diameter=space.diameter,
        total_measure=space.total_measure,
        min_ball_measure=float(space.ball_measures(r).min()),
        min_ball_ratio=min_ball_ratio(space, r),
        doubling_r=doubling_constant(space, r),
        doubling_2r=doubling_constant(space, 2 * r),
        doubling_4r=doubling_constant(space, 4 * r),
    )
