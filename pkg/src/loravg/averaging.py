"""The ball-averaging operator and the inequalities that control it.

For a radius r, averaging replaces f(x) by the mu-mean of f over the
closed ball B(x, r).  The verification operations compute, per space, the
tight constants entering the paper-style bounds:

* the maximal-type distribution inequality with c = g1*g2*g3 + 1, where
  g1, g2, g3 are the tight doubling constants at scales r, 2r, 4r;
* the rearrangement bound (A_r f)*(t) <= c f**(t);
* the operator-norm bound  ||A_r f|| <= (c p/(p-1)) ||f||  for both
  Lorentz norm variants;
* the equicontinuity modulus of {A_r f : ||f|| <= 1} between two atoms.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .norms import NormSpec, holder_constants, lebesgue_norm, lorentz_norm
from .rearrange import FunctionOnSpace, distribution_function, maximal_profile, rearrangement
from .space import MetricMeasureSpace, doubling_constant, symm_diff_measure


@dataclass(frozen=True)
class AveragingKernel:
    """Row-stochastic matrix of the averaging operator at radius r.

    Row x holds w_y / mu(B(x, r)) on B(x, r) and 0 elsewhere, so applying
    the kernel to a value vector is exactly the ball averaging.
    """

    space: MetricMeasureSpace
    r: float
    matrix: np.ndarray
    ball_measures: np.ndarray

    @classmethod
    def build(cls, space: MetricMeasureSpace, r: float) -> "AveragingKernel":
        if r <= 0:
            raise DomainError("averaging radius must be positive")
        masks = space.ball_masks(r)
        weighted = masks * space.weights
        measures = weighted.sum(axis=1)
        matrix = weighted / measures[:, None]
        row_sums = matrix.sum(axis=1)
        assert np.all(np.abs(row_sums - 1.0) <= 1e-12), "kernel rows must sum to 1"
        return cls(space=space, r=float(r), matrix=matrix, ball_measures=measures)

    def apply(self, f: FunctionOnSpace) -> FunctionOnSpace:
        return FunctionOnSpace(self.space, self.matrix @ f.values)


def average(space: MetricMeasureSpace, f: FunctionOnSpace, r: float) -> FunctionOnSpace:
    """A_r f: the mu-mean of f over B(x, r) at every atom x."""
    return AveragingKernel.build(space, r).apply(f)


def pointwise_bound(space: MetricMeasureSpace, x: int, r: float,
                    spec: NormSpec) -> float:
    """alpha(B(x,r)) / mu(B(x,r)): bounds |A_r f(x)| for every unit-norm f."""
    mass = float(space.weights[space.ball_mask(x, r)].sum())
    return holder_constants(spec, mass).alpha / mass


def equicontinuity_modulus(space: MetricMeasureSpace, x: int, y: int, r: float,
                           spec: NormSpec):
    """(bound, exact) modulus of |A_r f(x) - A_r f(y)| over the unit ball.

    bound = |1/mu(B(x,r)) - 1/mu(B(y,r))| alpha(B(x,r))
            + alpha(B(x,r) symm-diff B(y,r)) / mu(B(y,r)).

    exact is the attained supremum, available on the plain Lebesgue
    diagonal p = q where it is the dual norm of the kernel-row difference
    density; None otherwise.
    """
    mu_x = float(space.weights[space.ball_mask(x, r)].sum())
    mu_y = float(space.weights[space.ball_mask(y, r)].sum())
    alpha_x = holder_constants(spec, mu_x).alpha
    sd = symm_diff_measure(space, x, y, r)
    alpha_sd = holder_constants(spec, sd).alpha
    bound = abs(1.0 / mu_x - 1.0 / mu_y) * alpha_x + alpha_sd / mu_y
    exact = None
    if spec.variant == "plain" and spec.p == spec.q and math.isfinite(spec.p):
        g = _kernel_difference_density(space, x, y, r)
        exact = lebesgue_norm(g, spec.p / (spec.p - 1.0))
    return bound, exact


def _kernel_difference_density(space: MetricMeasureSpace, x: int, y: int,
                               r: float) -> FunctionOnSpace:
    """Density g with A_r f(x) - A_r f(y) = integral of g f d(mu)."""
    mask_x = space.ball_mask(x, r)
    mask_y = space.ball_mask(y, r)
    g = (mask_x / space.weights[mask_x].sum()
         - mask_y / space.weights[mask_y].sum())
    return FunctionOnSpace(space, g)


def extremal_pair_function(space: MetricMeasureSpace, x: int, y: int, r: float,
                           p: float) -> FunctionOnSpace:
    """Unit-p-norm f attaining sup |A_r f(x) - A_r f(y)| on the diagonal.

    The maximizer is sign(g) |g|^{p'-1} normalized, with g the kernel-row
    difference density and p' the conjugate exponent.
    """
    if not (1 < p < math.inf):
        raise DomainError("extremal construction needs p in (1, inf)")
    g = _kernel_difference_density(space, x, y, r).values
    pp = p / (p - 1.0)
    values = np.sign(g) * np.abs(g) ** (pp - 1.0)
    f = FunctionOnSpace(space, values)
    norm = lebesgue_norm(f, p)
    if norm == 0.0:
        return f
    return f * (1.0 / norm)


def distribution_constant(space: MetricMeasureSpace, r: float):
    """(c, (g1, g2, g3)) with c = g1*g2*g3 + 1 from the tight doubling
    constants at scales r, 2r and 4r."""
    g1 = doubling_constant(space, r).gamma
    g2 = doubling_constant(space, 2 * r).gamma
    g3 = doubling_constant(space, 4 * r).gamma
    return g1 * g2 * g3 + 1.0, (g1, g2, g3)


@dataclass(frozen=True)
class DistributionInequalityReport:
    constant_c: float
    gammas: tuple[float, float, float]
    t: float
    lhs: float  # mu_{A_r f}(c t)
    rhs: float  # (1/t) integral of |f| over {|f| > t}
    passed: bool


def verify_distribution_inequality(space: MetricMeasureSpace, f: FunctionOnSpace,
                                   r: float, t: float) -> DistributionInequalityReport:
    """Check mu_{A_r f}(c t) <= (1/t) integral_{|f|>t} |f| at one threshold."""
    if t <= 0:
        raise DomainError("threshold t must be positive")
    c, gammas = distribution_constant(space, r)
    lhs = distribution_function(average(space, f, r))(c * t)
    av = np.abs(f.values)
    above = av > t
    rhs = float(np.sum(space.weights[above] * av[above])) / t
    passed = lhs <= rhs + 1e-12 * (1.0 + rhs)
    return DistributionInequalityReport(constant_c=c, gammas=gammas, t=float(t),
                                        lhs=lhs, rhs=rhs, passed=passed)


def threshold_sweep(f: FunctionOnSpace) -> np.ndarray:
    """Thresholds probing every step of |f|: the distinct positive values,
    geometric midpoints between consecutive ones, half the smallest and
    twice the largest."""
    av = np.abs(f.values)
    vals = np.unique(av[av > 0])
    if vals.size == 0:
        return np.array([])
    mids = np.sqrt(vals[:-1] * vals[1:])
    return np.unique(np.concatenate((vals, mids, [vals[0] / 2, 2 * vals[-1]])))


@dataclass(frozen=True)
class RearrangementBoundReport:
    constant_c: float
    max_ratio: float  # max over the grid of (A_r f)*(t) / f**(t)
    worst_t: float
    passed: bool


def verify_rearrangement_bound(space: MetricMeasureSpace, f: FunctionOnSpace,
                               r: float) -> RearrangementBoundReport:
    """Check (A_r f)*(t) <= c f**(t) over the joint breakpoint grid."""
    if not np.any(f.values != 0):
        raise DomainError("the bound is trivial for the zero function")
    c, _ = distribution_constant(space, r)
    avg_star = rearrangement(average(space, f, r))
    profile = maximal_profile(f)
    grid = np.unique(np.concatenate((avg_star.breakpoints, profile.breakpoints)))
    grid = grid[grid > 0]
    mids = np.sqrt(grid[:-1] * grid[1:])
    grid = np.unique(np.concatenate((grid, mids, [grid[0] / 2, 2 * grid[-1]])))
    ratios = avg_star(grid) / profile(grid)
    worst = int(np.argmax(ratios))
    max_ratio = float(ratios[worst])
    return RearrangementBoundReport(constant_c=c, max_ratio=max_ratio,
                                    worst_t=float(grid[worst]),
                                    passed=max_ratio <= c * (1.0 + 1e-12))


@dataclass(frozen=True)
class OperatorBoundReport:
    constant_c: float
    factor: float  # c p / (p - 1)
    lhs: float     # ||A_r f||
    rhs: float     # factor * ||f||
    passed: bool


def verify_operator_bound(space: MetricMeasureSpace, f: FunctionOnSpace, r: float,
                          spec: NormSpec) -> OperatorBoundReport:
    """Check ||A_r f|| <= (c p/(p-1)) ||f|| in the requested norm."""
    if spec.p <= 1:
        raise DomainError("operator bound needs p > 1")
    c, _ = distribution_constant(space, r)
    factor = c if math.isinf(spec.p) else c * spec.p / (spec.p - 1.0)
    lhs = lorentz_norm(average(space, f, r), spec)
    rhs = factor * lorentz_norm(f, spec)
    return OperatorBoundReport(constant_c=c, factor=factor, lhs=lhs, rhs=rhs,
                               passed=lhs <= rhs + 1e-12 * (1.0 + rhs))


def equicontinuity_bound_matrix(space: MetricMeasureSpace, r: float,
                                spec: NormSpec) -> np.ndarray:
    """bound(x, y) for all atom pairs at once (vectorized form of
    equicontinuity_modulus's first component)."""
    masks = space.ball_masks(r)
    weighted = masks * space.weights
    mu = weighted.sum(axis=1)
    common = weighted @ masks.T
    sd = mu[:, None] + mu[None, :] - 2.0 * common
    sd = np.maximum(sd, 0.0)
    lam = holder_constants(spec, 1.0).lam
    one_minus = 1.0 - 1.0 / spec.p
    alpha_x = lam * mu ** one_minus
    alpha_sd = lam * sd ** one_minus
    return (np.abs(1.0 / mu[:, None] - 1.0 / mu[None, :]) * alpha_x[:, None]
            + alpha_sd / mu[None, :])
