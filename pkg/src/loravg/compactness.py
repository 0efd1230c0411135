"""Numerical compactness diagnostics for the averaging operator.

On a bounded space the image of the unit sphere under averaging is
totally bounded: greedy epsilon-nets of sampled images stay small as the
sample grows.  On a family of growing truncations the witness
construction (bump functions at 4r-separated centers) produces images
that stay pairwise separated by at least

    c_lower = inf_x mu(B(x, r)) / mu(B(x, 2r)),

so the number of pairwise-separated images, and with it any epsilon-net
at epsilon < c_lower, grows without bound.  The probe tabulates both
effects across a family of spaces.
"""

import math
from dataclasses import dataclass

import numpy as np

from .averaging import AveragingKernel
from .errors import DomainError
from .norms import NormSpec, holder_constants, lorentz_norm
from .rearrange import FunctionOnSpace
from .space import MetricMeasureSpace, min_ball_ratio, separated_points


def norm_distance(f: FunctionOnSpace, g: FunctionOnSpace, spec: NormSpec) -> float:
    return lorentz_norm(f - g, spec)


def sample_unit_sphere(space: MetricMeasureSpace, spec: NormSpec, n: int,
                       seed: int) -> list[FunctionOnSpace]:
    """n random signed simple functions normalized to unit spec-norm.

    Each draw is a single signed ball bump: the support is the closed
    ball at a uniform random center whose radius is a mid-range quantile
    (0.45..0.55) of that center's distance row, and the level is standard
    normal.  Keeping the supports at a common scale keeps the metric
    entropy of the averaged images modest, so greedy nets of the image
    cloud saturate at desk-scale sample sizes; per-atom noise supports
    would instead spread the images over a high-dimensional ellipsoid
    whose nets keep growing with the sample.

    Draws are sequential, so the first m samples of a longer run equal an
    m-sample run with the same seed.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        center = int(rng.integers(space.natoms))
        quantile = rng.uniform(0.45, 0.55)
        radius = np.sort(space.dist[center])[int(quantile * (space.natoms - 1))]
        level = rng.standard_normal()
        f = FunctionOnSpace(space, np.where(space.ball_mask(center, radius),
                                            level, 0.0))
        norm = lorentz_norm(f, spec)
        if norm > 0:
            out.append(f * (1.0 / norm))
    return out


@dataclass(frozen=True)
class CoveringReport:
    epsilon: float
    n_points: int
    k: int
    net_indices: list[int]
    max_residual: float  # largest distance from a sample to the net


def covering_number(points: list[FunctionOnSpace], epsilon: float,
                    spec: NormSpec) -> CoveringReport:
    """Greedy sequential net: scan in order, keep a point iff it is more
    than epsilon away from every kept point.  The net size upper-bounds
    the true epsilon-covering number of the sample."""
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    net: list[int] = []
    max_residual = 0.0
    for i, f in enumerate(points):
        dists = [norm_distance(f, points[j], spec) for j in net]
        if not dists or min(dists) > epsilon:
            net.append(i)
        else:
            max_residual = max(max_residual, min(dists))
    return CoveringReport(epsilon=float(epsilon), n_points=len(points),
                          k=len(net), net_indices=net, max_residual=max_residual)


@dataclass(frozen=True)
class WitnessReport:
    centers: list[int]
    bounded_regime: bool       # fewer than 2 centers with separation > 4r
    c_lower: float             # inf_x mu(B(x,r))/mu(B(x,2r))
    functions: list[FunctionOnSpace]
    images: list[FunctionOnSpace]
    distances: np.ndarray | None  # pairwise spec-norm distances of images
    min_pairwise: float | None
    witness_norms: list[float]


def witness_sequence(space: MetricMeasureSpace, r: float, k: int,
                     spec: NormSpec) -> WitnessReport:
    """Bump functions alpha(B(x_n,r)) chi_{B(x_n,2r)} / mu(B(x_n,r)) at up
    to k centers with pairwise distance > 4r.

    Their averaged images are pairwise at least c_lower apart in any
    admissible norm; with fewer than two such centers the space is in the
    bounded regime and no witness exists.
    """
    if r <= 0:
        raise DomainError("radius must be positive")
    centers = separated_points(space, 4 * r, k)
    c_lower = min_ball_ratio(space, r)
    if len(centers) < 2:
        return WitnessReport(centers=centers, bounded_regime=True, c_lower=c_lower,
                             functions=[], images=[], distances=None,
                             min_pairwise=None, witness_norms=[])
    kernel = AveragingKernel.build(space, r)
    functions = []
    for x in centers:
        mass = float(space.weights[space.ball_mask(x, r)].sum())
        alpha = holder_constants(spec, mass).alpha
        bump = FunctionOnSpace.indicator(space, space.ball_mask(x, 2 * r))
        functions.append(bump * (alpha / mass))
    images = [kernel.apply(f) for f in functions]
    m = len(images)
    distances = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            d = norm_distance(images[i], images[j], spec)
            distances[i, j] = distances[j, i] = d
    min_pairwise = float(distances[np.triu_indices(m, k=1)].min())
    witness_norms = [lorentz_norm(f, spec) for f in functions]
    return WitnessReport(centers=centers, bounded_regime=False, c_lower=c_lower,
                         functions=functions, images=images, distances=distances,
                         min_pairwise=min_pairwise, witness_norms=witness_norms)


@dataclass(frozen=True)
class SimpleApproximation:
    centers: list[int]
    radii: list[float]
    coefficients: list[float]
    function: FunctionOnSpace  # the simple function sum a_i chi_{B(x_i, r_i)}
    error: float               # spec-norm of (g - simple function)
    remainder_norm: float      # spec-norm of g outside the kept balls


def simple_approximation(space: MetricMeasureSpace, g: FunctionOnSpace, r: float,
                         epsilon: float, spec: NormSpec) -> SimpleApproximation:
    """Approximate g by a combination of indicator functions of disjoint
    balls, aiming at spec-norm error epsilon.

    Candidate balls keep the oscillation of g around the center value
    below epsilon / (2 ||chi_X||); they are scanned in decreasing measure
    (ties by center) and kept when disjoint from all previous picks,
    until the remainder norm drops to epsilon / 2.  The achieved error is
    reported as is; for g far from an averaged function it can exceed
    epsilon.
    """
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    chi_x_norm = lorentz_norm(FunctionOnSpace.indicator(space, np.ones(space.natoms, bool)), spec)
    osc_cap = epsilon / (2.0 * chi_x_norm)

    def oscillation_radius(x: int) -> float:
        """Largest radius whose closed ball keeps |g - g(x)| <= osc_cap."""
        row = space.dist[x]
        bad = np.abs(g.values - g.values[x]) > osc_cap
        if not bad.any():
            return float(row.max())
        below = row[row < row[bad].min()]
        # row[x] = 0 is always below unless a violator sits at distance 0
        return float(below.max()) if below.size else 0.0

    candidates = []
    for x in range(space.natoms):
        radius = oscillation_radius(x)
        candidates.append((float(space.weights[space.ball_mask(x, radius)].sum()),
                           x, radius))
    candidates.sort(key=lambda c: (-c[0], c[1]))

    covered = np.zeros(space.natoms, dtype=bool)
    centers: list[int] = []
    radii: list[float] = []
    coefficients: list[float] = []
    simple = np.zeros(space.natoms)

    def remainder_norm() -> float:
        rem = FunctionOnSpace(space, np.where(covered, 0.0, g.values))
        return lorentz_norm(rem, spec)

    for _, x, radius in candidates:
        if remainder_norm() <= epsilon / 2.0:
            break
        if covered[x]:
            continue
        if covered.any():
            # shrink below the nearest covered atom to stay disjoint
            nearest = float(space.dist[x][covered].min())
            if nearest == 0.0:
                continue
            below = space.dist[x][space.dist[x] < nearest]
            radius = min(radius, float(below.max()))
        mask = space.ball_mask(x, radius)
        centers.append(x)
        radii.append(float(radius))
        coefficients.append(float(g.values[x]))
        simple[mask] = g.values[x]
        covered |= mask
    approx = FunctionOnSpace(space, simple)
    return SimpleApproximation(centers=centers, radii=radii,
                               coefficients=coefficients, function=approx,
                               error=norm_distance(g, approx, spec),
                               remainder_norm=remainder_norm())


@dataclass(frozen=True)
class ProbeRow:
    label: str
    natoms: int
    k: int                      # greedy net size of the sampled images
    witness_count: int          # pairwise-(>epsilon)-separated witness images
    witness_min: float | None   # min pairwise distance of witness images
    c_lower: float


def _separated_count(distances: np.ndarray, epsilon: float) -> int:
    """Greedy count of pairwise-(> epsilon) points from a distance matrix."""
    kept: list[int] = []
    for i in range(distances.shape[0]):
        if all(distances[i, j] > epsilon for j in kept):
            kept.append(i)
    return len(kept)


def compactness_probe(spaces: list[MetricMeasureSpace], r: float, spec: NormSpec,
                      epsilon: float, n: int, seed: int,
                      labels: list[str] | None = None) -> list[ProbeRow]:
    """Trend table over a family of spaces.

    Per space: sample n unit-sphere functions (seeded by seed + index so
    runs are reproducible space by space), average them, record the
    greedy epsilon-net size of the images, and when 4r-separated centers
    exist record the witness-image separation statistics.
    """
    if labels is None:
        labels = [str(s.natoms) for s in spaces]
    rows = []
    for index, (space, label) in enumerate(zip(spaces, labels)):
        kernel = AveragingKernel.build(space, r)
        samples = sample_unit_sphere(space, spec, n, seed + index)
        images = [kernel.apply(f) for f in samples]
        cover = covering_number(images, epsilon, spec)
        witness = witness_sequence(space, r, space.natoms, spec)
        if witness.bounded_regime:
            count, wmin = 0, None
        else:
            count = _separated_count(witness.distances, epsilon)
            wmin = witness.min_pairwise
        rows.append(ProbeRow(label=str(label), natoms=space.natoms, k=cover.k,
                             witness_count=count, witness_min=wmin,
                             c_lower=witness.c_lower))
    return rows
