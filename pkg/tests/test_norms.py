import math

import numpy as np
import pytest
from scipy.integrate import quad

from loravg import (
    DOUBLE_STAR,
    PLAIN,
    DomainError,
    FunctionOnSpace,
    MetricMeasureSpace,
    NormSpec,
    NotInSpaceError,
    chi_norm_closed_form,
    holder_check,
    holder_constants,
    lebesgue_norm,
    lorentz_norm,
    maximal_profile,
    norm_equivalence_check,
    rearrangement,
)
from conftest import random_function, random_space

PS = [1.5, 2.0, 3.0, 10.0]
QS = [1.0, 2.0, 3.0, 3.5, math.inf]


def quad_plain_norm(f, p, q):
    """Quadrature oracle for the plain norm at q < inf.

    The first interval of f* is a constant level, where the integral of
    t^{q/p-1} is the elementary power formula; interior intervals are
    integrated numerically.
    """
    star = rearrangement(f)
    if star.levels.size == 0:
        return 0.0
    acc = star.levels[0] ** q * (p / q) * star.breakpoints[1] ** (q / p)
    for v, t1, t2 in zip(star.levels[1:], star.breakpoints[1:-1], star.breakpoints[2:]):
        val, _ = quad(lambda t: t ** (q / p - 1) * v ** q, t1, t2,
                      epsabs=0, epsrel=1e-13)
        acc += val
    return acc ** (1 / q)


def quad_double_star_norm(f, p, q):
    """Quadrature oracle for the double-star norm at q < inf."""
    prof = maximal_profile(f)
    if prof.total == 0.0:
        return 0.0
    t1 = prof.breakpoints[1]
    acc = prof.slopes[0] ** q * (p / q) * t1 ** (q / p)
    for a, b in zip(prof.breakpoints[1:-1], prof.breakpoints[2:]):
        val, _ = quad(lambda t: t ** (q / p - 1) * prof(t) ** q, a, b,
                      epsabs=0, epsrel=1e-13, limit=200)
        acc += val
    tk = prof.breakpoints[-1]
    acc += prof.total ** q * tk ** (q / p - q) / (q - q / p)
    return acc ** (1 / q)


def sup_norm_oracle(f, spec):
    """Dense-grid oracle for the q = inf norms."""
    star = rearrangement(f)
    if star.levels.size == 0:
        return 0.0
    T = star.breakpoints[-1]
    grid = np.unique(np.concatenate((np.linspace(1e-9, 3 * T, 40001),
                                     star.breakpoints[1:],
                                     star.breakpoints[1:] - 1e-12)))
    fn = star if spec.variant == PLAIN else maximal_profile(f)
    vals = fn(grid)
    return float(np.max(grid ** (1 / spec.p) * vals)) if math.isfinite(spec.p) \
        else float(np.max(vals))


def test_chi_closed_form_values():
    assert chi_norm_closed_form(4.0, NormSpec(2, 1, PLAIN)) == pytest.approx(4.0)
    assert chi_norm_closed_form(4.0, NormSpec(2, 1, DOUBLE_STAR)) == pytest.approx(8.0)
    assert chi_norm_closed_form(9.0, NormSpec(2, math.inf, PLAIN)) == pytest.approx(3.0)
    assert chi_norm_closed_form(9.0, NormSpec(2, math.inf, DOUBLE_STAR)) == pytest.approx(3.0)
    # measure 1: prefactor only
    assert chi_norm_closed_form(1.0, NormSpec(3, 2, PLAIN)) == pytest.approx((3 / 2) ** 0.5)
    # p = q = 2 agrees with the Lebesgue norm of the indicator
    assert chi_norm_closed_form(4.0, NormSpec(2, 2, PLAIN)) == pytest.approx(2.0)


def test_chi_closed_form_matches_lorentz_norm(rng):
    for _ in range(60):
        sp = random_space(rng)
        size = int(rng.integers(1, sp.natoms + 1))
        atoms = rng.choice(sp.natoms, size=size, replace=False)
        chi = FunctionOnSpace.indicator(sp, atoms)
        mu = float(sp.weights[atoms].sum())
        p = PS[int(rng.integers(len(PS)))]
        q = QS[int(rng.integers(len(QS)))]
        variant = PLAIN if rng.uniform() < 0.5 else DOUBLE_STAR
        spec = NormSpec(p, q, variant)
        assert lorentz_norm(chi, spec) == pytest.approx(
            chi_norm_closed_form(mu, spec), rel=1e-12)


def test_lorentz_vs_quadrature_oracle(rng):
    for _ in range(25):
        f = random_function(rng, random_space(rng, max_atoms=15))
        p = PS[int(rng.integers(len(PS)))]
        q = QS[int(rng.integers(len(QS)))]
        if math.isinf(q):
            for variant in (PLAIN, DOUBLE_STAR):
                spec = NormSpec(p, q, variant)
                assert lorentz_norm(f, spec) == pytest.approx(
                    sup_norm_oracle(f, spec), rel=1e-6)
        else:
            assert lorentz_norm(f, NormSpec(p, q, PLAIN)) == pytest.approx(
                quad_plain_norm(f, p, q), rel=1e-10)
            assert lorentz_norm(f, NormSpec(p, q, DOUBLE_STAR)) == pytest.approx(
                quad_double_star_norm(f, p, q), rel=1e-10)


def test_logarithmic_exponent_case(rng):
    # p = q = 2 puts one binomial term of the double-star closed form at
    # exponent exactly -1.
    f = random_function(rng, MetricMeasureSpace.lattice(9))
    assert lorentz_norm(f, NormSpec(2, 2, DOUBLE_STAR)) == pytest.approx(
        quad_double_star_norm(f, 2.0, 2.0), rel=1e-10)


def test_lebesgue_examples():
    sp = MetricMeasureSpace.from_matrix([[0, 1, 2], [1, 0, 1], [2, 1, 0]], [1, 2, 1])
    f = FunctionOnSpace(sp, [3, 1, 2])
    assert lebesgue_norm(f, 2) == pytest.approx(math.sqrt(15))
    assert lebesgue_norm(f, math.inf) == 3.0
    assert lebesgue_norm(FunctionOnSpace(sp, [0, 0, 0]), 1.7) == 0.0


def test_lebesgue_diagonal(rng):
    for _ in range(40):
        f = random_function(rng, random_space(rng), allow_zero=True)
        p = [1.0, 1.5, 2.0, 3.0, 10.0][int(rng.integers(5))]
        assert lorentz_norm(f, NormSpec(p, p, PLAIN)) == pytest.approx(
            lebesgue_norm(f, p), rel=1e-12, abs=1e-300)
    f = random_function(rng, random_space(rng))
    assert lorentz_norm(f, NormSpec(math.inf, math.inf, PLAIN)) == pytest.approx(
        lebesgue_norm(f, math.inf), rel=1e-12)


def test_trivial_space_errors():
    sp = MetricMeasureSpace.lattice(3)
    f = FunctionOnSpace(sp, [1, 0, 0, 0])
    for variant in (PLAIN, DOUBLE_STAR):
        with pytest.raises(NotInSpaceError):
            lorentz_norm(f, NormSpec(math.inf, 2, variant))
    zero = FunctionOnSpace(sp, np.zeros(4))
    assert lorentz_norm(zero, NormSpec(math.inf, 2, PLAIN)) == 0.0


def test_norm_spec_validation():
    with pytest.raises(DomainError):
        NormSpec(1.0, 2.0, DOUBLE_STAR)
    with pytest.raises(DomainError):
        NormSpec(0.5, 2.0, PLAIN)
    with pytest.raises(DomainError):
        NormSpec(2.0, 0.5, PLAIN)
    with pytest.raises(DomainError):
        NormSpec(2.0, 2.0, "starry")
    assert NormSpec(3, 2).normable
    assert not NormSpec(2, 3).normable
    assert NormSpec(2, 3, DOUBLE_STAR).normable
    assert NormSpec(math.inf, 2).trivial_space


def test_scaling_and_monotonicity(rng):
    for _ in range(20):
        sp = random_space(rng)
        f = random_function(rng, sp)
        p = PS[int(rng.integers(len(PS)))]
        q = QS[int(rng.integers(len(QS)))]
        variant = PLAIN if rng.uniform() < 0.5 else DOUBLE_STAR
        spec = NormSpec(p, q, variant)
        c = float(rng.uniform(0.1, 5))
        assert lorentz_norm(c * f, spec) == pytest.approx(
            c * lorentz_norm(f, spec), rel=1e-12)
        assert lorentz_norm(-1.0 * f, spec) == pytest.approx(
            lorentz_norm(f, spec), rel=1e-12)
        # 0 <= g <= |f| pointwise implies smaller norm
        g = FunctionOnSpace(sp, np.abs(f.values) * rng.uniform(0, 1, sp.natoms))
        assert lorentz_norm(g, spec) <= lorentz_norm(f, spec) * (1 + 1e-12)


def test_triangle_inequality_where_norm(rng):
    for _ in range(20):
        sp = random_space(rng)
        f, g = random_function(rng, sp), random_function(rng, sp)
        p = PS[int(rng.integers(len(PS)))]
        q = QS[int(rng.integers(len(QS)))]
        ds = NormSpec(p, q, DOUBLE_STAR)
        assert lorentz_norm(f + g, ds) <= (
            lorentz_norm(f, ds) + lorentz_norm(g, ds)) * (1 + 1e-12)
        if q <= p:
            plain = NormSpec(p, q, PLAIN)
            assert lorentz_norm(f + g, plain) <= (
                lorentz_norm(f, plain) + lorentz_norm(g, plain)) * (1 + 1e-12)


def test_absolute_continuity_sequence():
    sp = MetricMeasureSpace.lattice(40)
    rng = np.random.default_rng(3)
    f = FunctionOnSpace(sp, rng.standard_normal(41))
    spec = NormSpec(2.5, 2.0, PLAIN)
    sets = [np.arange(k) for k in (30, 17, 9, 4, 2, 1)]
    norms = []
    for atoms in sets:
        masked = FunctionOnSpace(sp, np.where(np.isin(np.arange(41), atoms),
                                              f.values, 0.0))
        norms.append(lorentz_norm(masked, spec))
        # q = inf norm of the indicator is exactly mu(A_n)^{1/p}
        chi = FunctionOnSpace.indicator(sp, atoms)
        assert lorentz_norm(chi, NormSpec(2.5, math.inf, PLAIN)) == pytest.approx(
            len(atoms) ** (1 / 2.5), rel=1e-12)
    assert all(a >= b for a, b in zip(norms, norms[1:]))
    tiny = FunctionOnSpace(sp, np.zeros(41))
    assert lorentz_norm(tiny, spec) == 0.0


def test_holder_constant_values():
    assert holder_constants(NormSpec(2, 2), 1.0).lam == pytest.approx(1.0)
    assert holder_constants(NormSpec(2, 1), 1.0).lam == pytest.approx(1.0)
    assert holder_constants(NormSpec(2, math.inf), 1.0).lam == pytest.approx(2.0)
    # alpha(A) = lam * mu(A)^{1-1/p}
    assert holder_constants(NormSpec(2, 2), 9.0).alpha == pytest.approx(3.0)
    with pytest.raises(DomainError):
        holder_constants(NormSpec(1, 2, PLAIN), 1.0)
    with pytest.raises(DomainError):
        holder_constants(NormSpec(math.inf, 2, PLAIN), 1.0)


def test_holder_lambda_shape(rng):
    # lam >= 1 whenever q >= p; alpha is monotone in the measure.
    for p, q in [(1.5, 2.0), (2.0, 3.0), (2.0, 2.0), (3.0, math.inf), (2.0, 1.0)]:
        if q >= p:
            assert holder_constants(NormSpec(p, q), 1.0).lam >= 1.0 - 1e-15
    for _ in range(10):
        p = PS[int(rng.integers(len(PS)))]
        q = QS[int(rng.integers(len(QS)))]
        m1, m2 = sorted(rng.uniform(0.1, 10, 2))
        assert (holder_constants(NormSpec(p, q), m1).alpha
                <= holder_constants(NormSpec(p, q), m2).alpha + 1e-15)


def test_holder_check_examples_and_property(rng):
    sp = MetricMeasureSpace.lattice(7)
    A = [1, 2, 5]
    chi = FunctionOnSpace.indicator(sp, A)
    lhs, rhs = holder_check(chi, A, NormSpec(2, 2))
    assert lhs == pytest.approx(3.0) and rhs == pytest.approx(3.0)

    off = FunctionOnSpace.indicator(sp, [0, 7])
    lhs, rhs = holder_check(off, A, NormSpec(2, 2))
    assert lhs == 0.0 and rhs >= 0.0

    for _ in range(40):
        space = random_space(rng)
        f = random_function(rng, space, allow_zero=True)
        size = int(rng.integers(1, space.natoms + 1))
        atoms = rng.choice(space.natoms, size=size, replace=False)
        p = PS[int(rng.integers(len(PS)))]
        q = QS[int(rng.integers(len(QS)))]
        lhs, rhs = holder_check(f, atoms, NormSpec(p, q))
        assert lhs <= rhs * (1 + 1e-12) + 1e-15


def test_norm_equivalence_examples():
    sp = MetricMeasureSpace.lattice(9)
    chi = FunctionOnSpace.indicator(sp, [0, 1, 2, 3])
    plain, ds = norm_equivalence_check(chi, 2.0, 1.0)
    assert plain == pytest.approx(4.0) and ds == pytest.approx(8.0)
    assert ds == pytest.approx(2.0 * plain, rel=1e-12)  # upper edge attained
    zero = FunctionOnSpace(sp, np.zeros(10))
    assert norm_equivalence_check(zero, 3.0, 2.0) == (0.0, 0.0)


def test_norm_equivalence_sandwich(rng):
    for _ in range(30):
        f = random_function(rng, random_space(rng))
        p = PS[int(rng.integers(len(PS)))]
        q = QS[int(rng.integers(len(QS)))]
        plain, ds = norm_equivalence_check(f, p, q)
        assert plain <= ds * (1 + 1e-10)
        assert ds <= (p / (p - 1)) * plain * (1 + 1e-10)
    # p = inf: the two variants coincide at q = inf
    f = random_function(rng, random_space(rng))
    plain, ds = norm_equivalence_check(f, math.inf, math.inf)
    assert plain == pytest.approx(ds, rel=1e-12)
