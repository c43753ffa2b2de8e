"""Graded quadrature: exactness, singular weights, convergence behavior."""

import numpy as np
import pytest
from scipy import integrate

from fle.domain import Domain
from fle.errors import GridMismatch, RuleMismatch, WeightNotIntegrable
from fle.quadrature import build_graded_rule, integrate_weighted


def doubling_oracle(f, gamma, domain=None, start_panels=6, order=20, tol=1e-12):
    """Adaptive panel-doubling reference value for int f(x) |x|^-gamma."""
    domain = domain or Domain.interval()
    prev = None
    panels = start_panels
    for _ in range(12):
        rule = build_graded_rule(domain, gamma, panels=panels, order=order)
        val = integrate_weighted(f(rule.nodes), gamma, rule)
        if prev is not None and abs(val - prev) < tol * max(1.0, abs(val)):
            return val
        prev = val
        panels += 4
    raise AssertionError("oracle did not settle")


class TestConstruction:
    def test_weights_positive_and_sum_to_measure_interval(self):
        rule = build_graded_rule(Domain.interval(), gamma=0.5)
        assert np.all(rule.weights > 0.0)
        assert rule.weights.sum() == pytest.approx(2.0, abs=1e-12)

    def test_weights_sum_to_measure_square(self):
        rule = build_graded_rule(Domain.square(), gamma=0.5, panels=8, order=10)
        assert np.all(rule.weights > 0.0)
        assert rule.weights.sum() == pytest.approx(4.0, abs=1e-12)

    def test_no_node_at_origin(self):
        rule = build_graded_rule(Domain.interval(), gamma=0.9)
        assert np.min(np.abs(rule.nodes)) > 0.0
        rule2 = build_graded_rule(Domain.square(), gamma=1.5, panels=6, order=6)
        assert np.min(rule2.radii) > 0.0

    def test_innermost_panel_width(self):
        rule = build_graded_rule(Domain.interval(), gamma=0.5, panels=10, order=4)
        pos = np.sort(rule.nodes[rule.nodes > 0.0])
        # all nodes of the innermost panel lie below 2^-panels
        assert pos[0] < 2.0 ** -10
        assert pos[3] < 2.0 ** -10

    def test_nonintegrable_weight_rejected(self):
        with pytest.raises(WeightNotIntegrable):
            build_graded_rule(Domain.interval(), gamma=1.0)
        with pytest.raises(WeightNotIntegrable):
            build_graded_rule(Domain.square(), gamma=2.0)

    def test_bad_parameters_rejected(self):
        with pytest.raises(ValueError):
            build_graded_rule(Domain.interval(), gamma=0.5, panels=1)
        with pytest.raises(ValueError):
            build_graded_rule(Domain.interval(), gamma=0.5, order=1)
        with pytest.raises(ValueError):
            build_graded_rule(Domain.interval(), gamma=0.5, grading=1.0)
        with pytest.raises(ValueError):
            build_graded_rule(Domain.interval(), gamma=-0.2)


class TestWeightedIntegrals:
    def test_plain_constant(self):
        rule = build_graded_rule(Domain.interval(), gamma=0.5)
        assert integrate_weighted(np.ones_like(rule.nodes), 0.0, rule) == pytest.approx(
            2.0, abs=1e-12
        )

    def test_inverse_sqrt_weight(self):
        # int_{-1}^{1} |x|^{-1/2} dx = 4, already at modest panel counts
        rule = build_graded_rule(Domain.interval(), gamma=0.5, panels=16, order=8)
        val = integrate_weighted(np.ones_like(rule.nodes), 0.5, rule)
        assert val == pytest.approx(4.0, abs=1e-10)

    def test_inverse_sqrt_times_square(self):
        # int_{-1}^{1} |x|^{-1/2} x^2 dx = 4/5
        rule = build_graded_rule(Domain.interval(), gamma=0.5, panels=16, order=8)
        val = integrate_weighted(rule.nodes**2, 0.5, rule)
        assert val == pytest.approx(0.8, abs=1e-10)

    def test_weighted_mode_pair_against_doubling_oracle(self):
        f = lambda x: np.sin(0.5 * np.pi * (x + 1.0)) ** 2
        ref = doubling_oracle(f, 0.25)
        rule = build_graded_rule(Domain.interval(), gamma=0.25, panels=18, order=24)
        val = integrate_weighted(f(rule.nodes), 0.25, rule)
        assert val == pytest.approx(ref, abs=1e-9)

    def test_polynomial_exactness_unweighted(self):
        rng = np.random.default_rng(23)
        rule = build_graded_rule(Domain.interval(), gamma=0.0, panels=6, order=12)
        for _ in range(20):
            deg = int(rng.integers(0, 2 * rule.order - 1))
            coeffs = rng.uniform(-1, 1, size=deg + 1)
            poly = np.polynomial.Polynomial(coeffs)
            exact = poly.integ()(1.0) - poly.integ()(-1.0)
            got = rule.integrate(poly(rule.nodes))
            assert got == pytest.approx(exact, abs=1e-13 * max(1.0, abs(exact)))

    def test_square_radial_weight(self):
        # int over (-1,1)^2 of |x|^{-1/2}, checked against scipy on one quadrant
        quadrant, err = integrate.dblquad(
            lambda y, x: (x * x + y * y) ** -0.25, 0.0, 1.0, 0.0, 1.0,
            epsabs=1e-11, epsrel=1e-11,
        )
        assert err < 1e-8
        rule = build_graded_rule(Domain.square(), gamma=0.5, panels=14, order=14)
        val = integrate_weighted(np.ones(rule.weights.shape), 0.5, rule)
        assert val == pytest.approx(4.0 * quadrant, rel=1e-8)

    def test_strong_singularity_square(self):
        # gamma may approach N = 2 on the square
        quadrant, err = integrate.dblquad(
            lambda y, x: (x * x + y * y) ** -0.75, 0.0, 1.0, 0.0, 1.0,
            epsabs=1e-11, epsrel=1e-11,
        )
        rule = build_graded_rule(Domain.square(), gamma=1.5, panels=22, order=14)
        val = integrate_weighted(np.ones(rule.weights.shape), 1.5, rule)
        assert val == pytest.approx(4.0 * quadrant, rel=1e-7)


class TestErrors:
    def test_rule_mismatch(self):
        rule = build_graded_rule(Domain.interval(), gamma=0.25)
        with pytest.raises(RuleMismatch):
            integrate_weighted(np.ones_like(rule.nodes), 0.5, rule)

    def test_grid_mismatch(self):
        rule = build_graded_rule(Domain.interval(), gamma=0.25)
        with pytest.raises(GridMismatch):
            integrate_weighted(np.ones(3), 0.25, rule)

    def test_weaker_weight_through_stronger_rule_ok(self):
        rule = build_graded_rule(Domain.interval(), gamma=0.5, panels=16, order=16)
        val = integrate_weighted(np.ones_like(rule.nodes), 0.0, rule)
        assert val == pytest.approx(2.0, abs=1e-12)


class TestConvergence:
    @pytest.mark.parametrize("gamma,m", [(0.75, 0), (0.75, 2), (0.4, 1)])
    def test_panel_doubling_change_decreases(self, gamma, m):
        # relative change under panel doubling shrinks monotonically while
        # the error is still far from round-off
        vals = []
        for panels in (3, 6, 12, 24):
            rule = build_graded_rule(Domain.interval(), gamma, panels=panels, order=3)
            vals.append(integrate_weighted(np.abs(rule.nodes) ** m, gamma, rule))
        changes = [abs(b - a) / abs(b) for a, b in zip(vals, vals[1:])]
        assert changes[0] > changes[1] > changes[2]
