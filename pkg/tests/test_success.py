import itertools
import math

import numpy as np
import pytest

from boxdet.errors import DimensionMismatchError, PatternBudgetError
from boxdet.gaussbox import FINITE, IntegratorConfig, IntegratorMethod, box_probability
from boxdet.model import BoundaryTag, BoxConstraint, classify, parse_pattern
from boxdet.rng import RngStream
from boxdet.success import (
    SuccessReport,
    p_bb_bounds,
    p_bb_deterministic,
    p_bb_uniform,
    p_br_deterministic,
    p_br_uniform,
    phi,
)

EX1 = np.array([[2.0, -1.0], [0.0, 1.0]])
QUAD = IntegratorConfig(method=IntegratorMethod.QUADRATURE)
QMC = IntegratorConfig(method=IntegratorMethod.SEQ_QMC, samples=4096)


def _random_triangular(rng, n, diag_lo=0.4, diag_hi=2.0):
    r = np.triu(rng.standard_normal((n, n)))
    r[np.diag_indices(n)] = rng.uniform(diag_lo, diag_hi, n)
    return r


def _point_average_bb(r, sigma, box):
    """Direct average of the deterministic Babai probability over every
    box point (oracle for the closed-form uniform expression)."""
    ranges = [range(int(lo), int(hi) + 1) for lo, hi in zip(box.lower, box.upper)]
    total = 0.0
    for pt in itertools.product(*ranges):
        total += p_bb_deterministic(r, sigma, classify(np.array(pt), box))
    return total / box.num_points()


class TestPhi:
    def test_zero(self):
        assert phi(0.0, 1.0) == 0.0

    def test_reference_values(self):
        assert phi(1.0, 1.0) == pytest.approx(0.3829249225480261, abs=1e-12)
        assert phi(2.0, 1.0) == pytest.approx(0.6826894921370859, abs=1e-12)

    def test_matches_integral_form(self):
        # second form: (zeta / (sqrt(2 pi) sigma)) * int_{-1/2}^{1/2}
        # exp(-zeta^2 t^2 / (2 sigma^2)) dt, by quadrature
        from scipy.integrate import quad as sciquad

        for zeta, sigma in [(0.5, 1.0), (1.7, 0.6), (3.0, 2.0)]:
            integral, _ = sciquad(
                lambda t: math.exp(-(zeta ** 2) * t ** 2 / (2 * sigma ** 2)),
                -0.5, 0.5,
            )
            expected = zeta / (math.sqrt(2 * math.pi) * sigma) * integral
            assert phi(zeta, sigma) == pytest.approx(expected, abs=1e-12)

    def test_monotone(self):
        values = [phi(z, 1.0) for z in np.linspace(0.0, 5.0, 30)]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert phi(1.0, 0.5) > phi(1.0, 1.0) > phi(1.0, 2.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            phi(-1.0, 1.0)
        with pytest.raises(ValueError):
            phi(1.0, 0.0)


class TestBabaiDeterministic:
    def test_example_all_lower(self):
        p = p_bb_deterministic(EX1, 1.0, parse_pattern("LL"))
        assert p == pytest.approx(0.5818, abs=5e-4)
        expected = 0.25 * (1 + phi(2.0, 1.0)) * (1 + phi(1.0, 1.0))
        assert p == pytest.approx(expected, rel=1e-15)

    def test_all_interior_collapses_to_product(self):
        rng = np.random.default_rng(2)
        r = _random_triangular(rng, 4)
        p = p_bb_deterministic(r, 0.7, parse_pattern("IIII"))
        assert p == pytest.approx(
            float(np.prod([phi(r[i, i], 0.7) for i in range(4)])), rel=1e-15
        )

    def test_all_singleton_is_one(self):
        assert p_bb_deterministic(EX1, 0.5, parse_pattern("SS")) == 1.0

    def test_pattern_length_checked(self):
        with pytest.raises(DimensionMismatchError):
            p_bb_deterministic(EX1, 1.0, parse_pattern("L"))


class TestBabaiUniform:
    def test_scalar_reference(self):
        p = p_bb_uniform(np.eye(1), 1.0, BoxConstraint([0], [3]))
        assert p == pytest.approx(0.537194, abs=1e-6)

    def test_small_noise_limit(self):
        p = p_bb_uniform(np.eye(1), 1e-6, BoxConstraint([0], [3]))
        assert abs(p - 1.0) <= 1e-9

    def test_singleton_coordinates_contribute_one(self):
        box = BoxConstraint([1, 1], [1, 4])
        p = p_bb_uniform(EX1, 0.8, box)
        w = 3.0
        assert p == pytest.approx(
            1.0 / (w + 1) + w / (w + 1) * phi(1.0, 0.8), rel=1e-15
        )

    def test_equals_point_average(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            n = int(rng.integers(1, 4))
            r = _random_triangular(rng, n)
            sigma = float(rng.uniform(0.2, 1.5))
            lower = rng.integers(-2, 1, n)
            upper = lower + rng.integers(0, 4, n)
            box = BoxConstraint(lower, upper)
            direct = _point_average_bb(r, sigma, box)
            assert p_bb_uniform(r, sigma, box) == pytest.approx(direct, rel=1e-12)


class TestBabaiBounds:
    def test_example_values(self):
        lower, upper = p_bb_bounds(EX1, 1.0)
        assert lower == pytest.approx(0.2614188209009449, abs=1e-12)
        assert upper == pytest.approx(0.5818, abs=5e-4)

    def test_equality_cases_are_exact(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            r = _random_triangular(rng, n)
            sigma = float(rng.uniform(0.2, 1.5))
            lower, upper = p_bb_bounds(r, sigma)
            interior = p_bb_deterministic(r, sigma, (BoundaryTag.INTERIOR,) * n)
            boundary = p_bb_deterministic(r, sigma, (BoundaryTag.LOWER,) * n)
            assert abs(interior - lower) <= 1e-15
            assert abs(boundary - upper) <= 1e-15

    def test_sandwich_over_random_patterns(self):
        rng = np.random.default_rng(7)
        tags = [BoundaryTag.LOWER, BoundaryTag.INTERIOR, BoundaryTag.UPPER]
        for _ in range(20):
            n = int(rng.integers(1, 6))
            r = _random_triangular(rng, n)
            sigma = float(rng.uniform(0.2, 1.5))
            lower, upper = p_bb_bounds(r, sigma)
            pattern = tuple(tags[i] for i in rng.integers(0, 3, n))
            p = p_bb_deterministic(r, sigma, pattern)
            assert lower - 1e-15 <= p <= upper + 1e-15

    def test_scalar_gap(self):
        lower, upper = p_bb_bounds(np.eye(1), 1.0)
        assert upper - lower == pytest.approx((1 - phi(1.0, 1.0)) / 2, rel=1e-12)
        assert upper >= lower


class TestRoundingDeterministic:
    def test_example_quadrature(self):
        est = p_br_deterministic(EX1, 1.0, parse_pattern("LL"), QUAD)
        assert est.value == pytest.approx(0.6192, abs=1e-3)

    def test_example_monte_carlo(self):
        cfg = IntegratorConfig(method=IntegratorMethod.MONTE_CARLO, samples=200_000)
        est = p_br_deterministic(EX1, 1.0, parse_pattern("LL"), cfg, RngStream(0))
        assert abs(est.value - 0.6192) <= 3 * est.stderr + 1e-3

    def test_interior_is_all_finite_box_probability(self):
        rng = np.random.default_rng(8)
        r = _random_triangular(rng, 3)
        est = p_br_deterministic(r, 0.6, parse_pattern("III"), QUAD)
        direct = box_probability(r, 0.6, (FINITE,) * 3, QUAD)
        assert est.value == direct.value

    def test_diagonal_r_matches_babai_formula(self):
        rng = np.random.default_rng(9)
        tags = "LIU"
        for _ in range(10):
            n = int(rng.integers(1, 4))
            r = np.diag(rng.uniform(0.4, 2.0, n))
            sigma = float(rng.uniform(0.3, 1.2))
            pattern = parse_pattern("".join(tags[i] for i in rng.integers(0, 3, n)))
            est = p_br_deterministic(r, sigma, pattern, QUAD)
            assert est.value == pytest.approx(
                p_bb_deterministic(r, sigma, pattern), abs=1e-9
            )


class TestRoundingUniform:
    def test_scalar_matches_babai(self):
        est = p_br_uniform(np.eye(1), 1.0, BoxConstraint([0], [3]), QUAD)
        assert est.value == pytest.approx(0.537194, abs=1e-6)

    def test_small_noise_limit(self):
        est = p_br_uniform(EX1, 0.01, BoxConstraint([0, 0], [3, 3]), QUAD)
        assert est.value == pytest.approx(1.0, abs=1e-6)

    def test_matches_direct_point_sum(self):
        rng = np.random.default_rng(10)
        box = BoxConstraint([0, 0], [2, 2])
        for _ in range(5):
            r = _random_triangular(rng, 2)
            sigma = float(rng.uniform(0.3, 1.0))
            est = p_br_uniform(r, sigma, box, QUAD)
            total = 0.0
            for pt in itertools.product(range(3), repeat=2):
                pat = classify(np.array(pt), box)
                total += p_br_deterministic(r, sigma, pat, QUAD).value
            assert est.value == pytest.approx(total / 9.0, rel=1e-12)

    def test_pattern_budget(self):
        r = np.eye(2)
        box = BoxConstraint([0, 0], [3, 3])
        with pytest.raises(PatternBudgetError):
            p_br_uniform(r, 1.0, box, QUAD, max_patterns=8)

    def test_stderr_combines_in_quadrature(self):
        est = p_br_uniform(EX1, 0.5, BoxConstraint([0, 0], [3, 3]), QMC, RngStream(4))
        assert est.stderr >= 0.0
        assert est.value <= 1.0

    def test_uniform_ordering_vs_babai(self):
        # rounding never beats Babai when the true vector is uniform
        rng = np.random.default_rng(11)
        for k in range(5):
            n = int(rng.integers(2, 4))
            r = _random_triangular(rng, n)
            sigma = float(rng.uniform(0.2, 1.0))
            box = BoxConstraint.cube(0, 3, n)
            est = p_br_uniform(r, sigma, box, QMC, RngStream(50 + k))
            assert est.value <= p_bb_uniform(r, sigma, box) + 3 * est.stderr


class TestSuccessReport:
    def test_validation(self):
        SuccessReport("demo", p_bb_det=0.5, bounds=(0.1, 0.9))
        with pytest.raises(ValueError):
            SuccessReport("demo", p_bb_det=1.5)
        with pytest.raises(ValueError):
            SuccessReport("demo", bounds=(0.9, 0.1))
