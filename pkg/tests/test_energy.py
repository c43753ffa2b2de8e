"""Energy functionals: Hamiltonians, J = Q - H, scale norms, E+/E- split."""

import numpy as np
import pytest

from fle.basis import Field, build_sine_basis, suggested_order
from fle.domain import Domain
from fle.energy import (
    EnergyReport,
    SolutionPair,
    eplus_eminus_decompose,
    hamiltonian_density,
    hamiltonian_gradients,
    lagrangian,
    quadratic_form,
    theta_norm,
    weak_residual,
)
from fle.errors import BasisMismatch, RuleMismatch, UnsupportedKind
from fle.exponents import ExponentPair, ProblemParams
from fle.operators import apply, assemble_restricted, build_spectral_operator
from fle.quadrature import build_graded_rule

RNG = np.random.default_rng(20240817)


def interval_setup(M=16, s=0.5, alpha=0.0, beta=0.0, p=1.0, q=1.0):
    basis = build_sine_basis(Domain.interval(), M)
    op = build_spectral_operator(basis, s)
    params = ProblemParams(N=1, s=s, alpha=alpha, beta=beta)
    pair = ExponentPair(p=p, q=q)
    return basis, op, params, pair


def phi(basis, k):
    coeffs = np.zeros(basis.M)
    coeffs[k - 1] = 1.0
    return Field(basis, coeffs)


def random_field(basis, scale=1.0):
    return Field(basis, scale * RNG.standard_normal(basis.M))


class TestSolutionPair:
    def test_domain_mismatch_rejected(self):
        bi = build_sine_basis(Domain.interval(), 4)
        bs = build_sine_basis(Domain.square(), 4)
        params = ProblemParams(N=1, s=0.5)
        pair = ExponentPair(p=2.0, q=2.0)
        with pytest.raises(BasisMismatch):
            SolutionPair(phi(bi, 1), phi(bs, 1), params, pair, t=0.5)

    @pytest.mark.parametrize("t", [0.0, 1.0, -0.2, 1.7])
    def test_scale_split_outside_open_interval_rejected(self, t):
        basis, _, params, pair = interval_setup(M=4, s=0.5)
        with pytest.raises(ValueError):
            SolutionPair(phi(basis, 1), phi(basis, 1), params, pair, t=t)

    def test_interior_scale_split_accepted(self):
        basis, _, params, pair = interval_setup(M=4, s=0.5)
        sol = SolutionPair(phi(basis, 1), phi(basis, 1), params, pair, t=0.5)
        assert sol.t == 0.5


class TestHamiltonianDensity:
    def test_zero_fields_give_zero(self):
        params = ProblemParams(N=1, s=0.5, alpha=0.25, beta=0.5)
        pair = ExponentPair(p=1.5, q=2.0)
        assert hamiltonian_density(0.0, 0.0, 0.3, params, pair) == 0.0
        assert hamiltonian_density(0.0, 0.0, 0.3, params, pair, modified=True) == 0.0

    def test_modified_vanishes_on_nonpositive_quadrant(self):
        params = ProblemParams(N=1, s=0.5)
        pair = ExponentPair(p=2.0, q=3.0)
        assert hamiltonian_density(-1.0, -1.0, 0.7, params, pair, modified=True) == 0.0

    def test_unweighted_unit_value(self):
        params = ProblemParams(N=1, s=0.5, alpha=0.0, beta=0.0)
        pair = ExponentPair(p=1.0, q=1.0)
        # v^2/2 + u^2/2 at u = v = 1
        assert hamiltonian_density(1.0, 1.0, 1.0, params, pair) == pytest.approx(1.0)

    def test_weighted_value(self):
        params = ProblemParams(N=1, s=0.5, alpha=0.5, beta=0.25)
        pair = ExponentPair(p=2.0, q=3.0)
        r = 0.5
        expected = 2.0**3 / 3.0 * r**-0.5 + 3.0**4 / 4.0 * r**-0.25
        got = hamiltonian_density(3.0, 2.0, r, params, pair)
        assert got == pytest.approx(expected, rel=1e-14)

    def test_modified_agrees_on_positive_quadrant(self):
        params = ProblemParams(N=1, s=0.5, alpha=0.3, beta=0.1)
        pair = ExponentPair(p=1.7, q=2.4)
        u = RNG.uniform(0.1, 2.0, size=32)
        v = RNG.uniform(0.1, 2.0, size=32)
        x = RNG.uniform(0.05, 1.0, size=32)
        raw = hamiltonian_density(u, v, x, params, pair)
        mod = hamiltonian_density(u, v, x, params, pair, modified=True)
        np.testing.assert_allclose(mod, raw, rtol=1e-15)

    def test_modified_continuous_across_axis(self):
        params = ProblemParams(N=1, s=0.5)
        pair = ExponentPair(p=1.5, q=2.5)
        at_zero = hamiltonian_density(0.0, 2.0, 0.5, params, pair, modified=True)
        near = hamiltonian_density(-1e-9, 2.0, 0.5, params, pair, modified=True)
        assert near == pytest.approx(at_zero, abs=1e-12)

    def test_origin_rejected(self):
        params = ProblemParams(N=1, s=0.5)
        pair = ExponentPair(p=1.0, q=1.0)
        with pytest.raises(ValueError):
            hamiltonian_density(1.0, 1.0, 0.0, params, pair)

    def test_planar_points_use_radius(self):
        params = ProblemParams(N=2, s=0.5, alpha=1.0, beta=0.0)
        pair = ExponentPair(p=1.0, q=1.0)
        pts = np.array([[3.0, 4.0]]) / 5.0  # radius 1 after scaling by 5/5
        got = hamiltonian_density(1.0, 1.0, pts, params, pair)
        assert got == pytest.approx(np.array([1.0]), rel=1e-14)


class TestHamiltonianGradients:
    def test_zero_point(self):
        params = ProblemParams(N=1, s=0.5)
        pair = ExponentPair(p=1.0, q=2.0)
        assert hamiltonian_gradients(0.0, 0.0, 0.5, params, pair) == (0.0, 0.0)

    def test_unweighted_example(self):
        params = ProblemParams(N=1, s=0.5)
        pair = ExponentPair(p=1.0, q=2.0)
        h_u, h_v = hamiltonian_gradients(2.0, 1.0, 1.0, params, pair)
        assert h_u == pytest.approx(4.0)
        assert h_v == pytest.approx(1.0)

    def test_modified_clips_negative_input(self):
        params = ProblemParams(N=1, s=0.5)
        pair = ExponentPair(p=2.0, q=2.0)
        h_u, h_v = hamiltonian_gradients(-3.0, 5.0, 1.0, params, pair, modified=True)
        assert h_u == 0.0
        assert h_v == pytest.approx(25.0)

    def test_raw_keeps_sign_for_integer_powers(self):
        params = ProblemParams(N=1, s=0.5)
        pair = ExponentPair(p=2.0, q=2.0)
        h_u, h_v = hamiltonian_gradients(-3.0, 5.0, 1.0, params, pair, modified=False)
        assert h_u == pytest.approx(9.0)
        assert h_v == pytest.approx(25.0)

    def test_raw_noninteger_power_falls_back_to_positive_part(self):
        # fractional powers of negatives are undefined; worst case is a clip
        params = ProblemParams(N=1, s=0.5)
        pair = ExponentPair(p=1.5, q=2.5)
        h_u, h_v = hamiltonian_gradients(-3.0, 5.0, 1.0, params, pair, modified=False)
        assert h_u == 0.0
        assert h_v == pytest.approx(5.0**1.5)

    def test_weights_enter_crosswise(self):
        # H_u carries beta, H_v carries alpha
        params = ProblemParams(N=1, s=0.5, alpha=0.5, beta=0.25)
        pair = ExponentPair(p=1.0, q=1.0)
        h_u, h_v = hamiltonian_gradients(1.0, 1.0, 0.25, params, pair)
        assert h_u == pytest.approx(0.25**-0.25, rel=1e-14)
        assert h_v == pytest.approx(0.25**-0.5, rel=1e-14)


class TestQuadraticForm:
    def test_first_mode_value(self):
        basis, op, params, pair = interval_setup(M=16, s=0.5)
        sol = SolutionPair(phi(basis, 1), phi(basis, 1), params, pair, t=0.5)
        assert quadratic_form(sol, op) == pytest.approx(np.pi / 2.0, abs=1e-12)

    def test_cross_modes_vanish(self):
        basis, op, params, pair = interval_setup(M=16)
        sol = SolutionPair(phi(basis, 1), phi(basis, 2), params, pair, t=0.5)
        assert quadratic_form(sol, op) == 0.0

    def test_symmetric_in_u_v(self):
        basis, op, params, pair = interval_setup(M=16)
        u, v = random_field(basis), random_field(basis)
        a = quadratic_form(SolutionPair(u, v, params, pair, t=0.5), op)
        b = quadratic_form(SolutionPair(v, u, params, pair, t=0.5), op)
        assert a == pytest.approx(b, rel=1e-15)

    def test_foreign_basis_rejected(self):
        basis, op, params, pair = interval_setup(M=16)
        other = build_sine_basis(Domain.interval(), 16)
        sol = SolutionPair(phi(other, 1), phi(other, 1), params, pair, t=0.5)
        with pytest.raises(BasisMismatch):
            quadratic_form(sol, op)

    def test_restricted_operator_rejected(self):
        basis, _, params, pair = interval_setup(M=8)
        op = assemble_restricted(Domain.interval(), 64, 0.5)
        sol = SolutionPair(phi(basis, 1), phi(basis, 1), params, pair, t=0.5)
        with pytest.raises(UnsupportedKind):
            quadratic_form(sol, op)


class TestLagrangian:
    def rule_for(self, basis, gamma=0.0):
        return build_graded_rule(
            basis.domain, gamma, panels=10, order=suggested_order(basis, 10)
        )

    def test_first_mode_linear_value(self):
        basis, op, params, pair = interval_setup(M=16, s=0.5, p=1.0, q=1.0)
        sol = SolutionPair(phi(basis, 1), phi(basis, 1), params, pair, t=0.5)
        report = lagrangian(sol, op, self.rule_for(basis))
        assert report.Q == pytest.approx(np.pi / 2.0, abs=1e-12)
        assert report.H_integral == pytest.approx(1.0, abs=1e-10)
        assert report.J == pytest.approx(np.pi / 2.0 - 1.0, abs=1e-10)

    def test_defect_identity_exact(self):
        basis, op, params, pair = interval_setup(M=16, p=1.3, q=2.1)
        u, v = random_field(basis, 0.3), random_field(basis, 0.3)
        sol = SolutionPair(u, v, params, pair, t=0.5)
        report = lagrangian(sol, op, self.rule_for(basis))
        assert report.J == report.Q - report.H_integral

    def test_zero_pair(self):
        basis, op, params, pair = interval_setup(M=16)
        zero = Field(basis, np.zeros(16))
        sol = SolutionPair(zero, zero, params, pair, t=0.5)
        report = lagrangian(sol, op, self.rule_for(basis))
        assert report.Q == 0.0
        assert report.H_integral == 0.0
        assert report.J == 0.0
        assert report.residual_sup == 0.0

    def test_residual_of_nonsolution(self):
        # phi_1 is an eigenfunction, not a solution; the defect in the
        # first mode is mu_1 - 1 and every other mode is orthogonal
        basis, op, params, pair = interval_setup(M=16, s=0.5, p=1.0, q=1.0)
        sol = SolutionPair(phi(basis, 1), phi(basis, 1), params, pair, t=0.5)
        report = lagrangian(sol, op, self.rule_for(basis))
        assert report.residual_sup == pytest.approx(np.pi / 2.0 - 1.0, abs=1e-10)

    def test_report_serializes(self):
        report = EnergyReport(Q=1.0, H_integral=0.25, J=0.75, residual_sup=1e-9)
        d = report.to_dict()
        assert set(d) == {"Q", "H_integral", "J", "residual_sup"}
        assert d["J"] == 0.75

    def test_weighted_needs_strong_enough_rule(self):
        basis, op, params, pair = interval_setup(M=8, alpha=0.5, beta=0.0)
        sol = SolutionPair(phi(basis, 1), phi(basis, 1), params, pair, t=0.5)
        weak_rule = self.rule_for(basis, gamma=0.25)
        with pytest.raises(RuleMismatch):
            lagrangian(sol, op, weak_rule)


class TestThetaNorm:
    def test_zero_scale_is_coefficient_norm(self):
        basis, op, _, _ = interval_setup(M=32)
        f = random_field(basis)
        assert theta_norm(f, 0.0, op) == pytest.approx(
            np.linalg.norm(f.coefficients), rel=1e-14
        )

    def test_first_mode_unit_scale(self):
        basis, op, _, _ = interval_setup(M=16, s=0.5)
        assert theta_norm(phi(basis, 1), 1.0, op) == pytest.approx(
            np.pi / 2.0, abs=1e-12
        )

    def test_matches_operator_pairing_at_t_equal_s(self):
        for s in (0.3, 0.5, 0.75):
            basis, op, _, _ = interval_setup(M=32, s=s)
            f = random_field(basis)
            pairing = float(apply(op, f).coefficients @ f.coefficients)
            assert theta_norm(f, s, op) ** 2 == pytest.approx(pairing, rel=1e-12)

    def test_duality_bound(self):
        basis, op, _, _ = interval_setup(M=32, s=0.5)
        for t in (0.25, 0.6, 0.9):
            f, g = random_field(basis), random_field(basis)
            inner = float(f.coefficients @ g.coefficients)
            assert abs(inner) <= theta_norm(f, t, op) * theta_norm(g, -t, op) + 1e-12

    def test_restricted_matches_discrete_pairing(self):
        op = assemble_restricted(Domain.interval(), 128, 0.5)
        values = np.sin(np.pi * (op.grid + 1.0) / 2.0) * (1.0 - op.grid**2)
        h = op.stiffness.h
        pairing = h * float(values @ apply(op, values))
        assert theta_norm(values, 0.5, op) ** 2 == pytest.approx(pairing, rel=1e-10)

    def test_restricted_zero_scale_is_discrete_l2(self):
        op = assemble_restricted(Domain.interval(), 128, 0.5)
        values = np.cos(op.grid) * (1.0 - op.grid**2)
        h = op.stiffness.h
        assert theta_norm(values, 0.0, op) == pytest.approx(
            np.sqrt(h * float(values @ values)), rel=1e-12
        )

    def test_spectral_requires_matching_field(self):
        basis, op, _, _ = interval_setup(M=8)
        with pytest.raises(BasisMismatch):
            theta_norm(np.ones(8), 0.5, op)
        other = build_sine_basis(Domain.interval(), 8)
        with pytest.raises(BasisMismatch):
            theta_norm(phi(other, 1), 0.5, op)


class TestSplitting:
    def setup_pair(self, s=0.5, t=0.7, M=24):
        basis, op, params, pair = interval_setup(M=M, s=s)
        u, v = random_field(basis), random_field(basis)
        return basis, op, SolutionPair(u, v, params, pair, t=t), params, pair

    def test_parts_sum_back(self):
        _, op, sol, _, _ = self.setup_pair()
        (up, vp), (um, vm) = eplus_eminus_decompose(sol, op)
        np.testing.assert_allclose(
            up.coefficients + um.coefficients, sol.u.coefficients, atol=1e-12
        )
        np.testing.assert_allclose(
            vp.coefficients + vm.coefficients, sol.v.coefficients, atol=1e-12
        )

    def test_idempotent(self):
        _, op, sol, params, pair = self.setup_pair()
        (up, vp), _ = eplus_eminus_decompose(sol, op)
        again = SolutionPair(up, vp, params, pair, t=sol.t)
        _, (um2, vm2) = eplus_eminus_decompose(again, op)
        assert np.max(np.abs(um2.coefficients)) < 1e-12
        assert np.max(np.abs(vm2.coefficients)) < 1e-12

    def test_pure_plus_diagonal(self):
        basis, op, params, pair = interval_setup(M=16, s=0.5)
        t = 0.7
        u = random_field(basis)
        lam = basis.eigenvalues
        v = Field(basis, lam ** (t - 0.5) * u.coefficients)
        sol = SolutionPair(u, v, params, pair, t=t)
        _, (um, vm) = eplus_eminus_decompose(sol, op)
        assert np.max(np.abs(um.coefficients)) < 1e-12
        assert np.max(np.abs(vm.coefficients)) < 1e-12

    def test_quadratic_form_signs(self):
        _, op, sol, params, pair = self.setup_pair()
        (up, vp), (um, vm) = eplus_eminus_decompose(sol, op)
        q_plus = quadratic_form(SolutionPair(up, vp, params, pair, t=sol.t), op)
        q_minus = quadratic_form(SolutionPair(um, vm, params, pair, t=sol.t), op)
        assert q_plus >= 0.0
        assert q_minus <= 0.0

    def test_restricted_rejected(self):
        basis, _, params, pair = interval_setup(M=8)
        sol = SolutionPair(phi(basis, 1), phi(basis, 1), params, pair, t=0.5)
        op = assemble_restricted(Domain.interval(), 64, 0.5)
        with pytest.raises(UnsupportedKind):
            eplus_eminus_decompose(sol, op)


class TestWeakResidual:
    def rule_for(self, basis):
        return build_graded_rule(
            basis.domain, 0.0, panels=10, order=suggested_order(basis, 10)
        )

    def test_zero_pair_zero_residual(self):
        basis, op, params, pair = interval_setup(M=16)
        zero = Field(basis, np.zeros(16))
        sol = SolutionPair(zero, zero, params, pair, t=0.5)
        F, G = weak_residual(sol, op, self.rule_for(basis))
        assert np.all(F == 0.0)
        assert np.all(G == 0.0)

    def test_linear_first_mode_defect(self):
        basis, op, params, pair = interval_setup(M=16, s=0.5, p=1.0, q=1.0)
        sol = SolutionPair(phi(basis, 1), phi(basis, 1), params, pair, t=0.5)
        F, G = weak_residual(sol, op, self.rule_for(basis))
        assert F[0] == pytest.approx(np.pi / 2.0 - 1.0, abs=1e-12)
        np.testing.assert_allclose(F[1:], 0.0, atol=1e-12)
        np.testing.assert_allclose(F, G, atol=1e-12)

    def test_quadratic_mode_coupling(self):
        # int phi_1^2 phi_1 = 8/(3 pi) after mapping to (0, pi)
        basis, op, params, pair = interval_setup(M=16, s=0.5, p=2.0, q=1.0)
        sol = SolutionPair(phi(basis, 1), phi(basis, 1), params, pair, t=0.5)
        F, _ = weak_residual(sol, op, self.rule_for(basis))
        assert F[0] == pytest.approx(np.pi / 2.0 - 8.0 / (3.0 * np.pi), abs=1e-10)

    def test_negative_source_is_clipped(self):
        basis, op, params, pair = interval_setup(M=16, p=1.5, q=1.5)
        u = phi(basis, 1)
        v = Field(basis, -u.coefficients)  # strictly negative inside
        sol = SolutionPair(u, v, params, pair, t=0.5)
        F, _ = weak_residual(sol, op, self.rule_for(basis))
        # v_+ = 0 so F reduces to the linear part only
        np.testing.assert_allclose(F, op.multipliers * u.coefficients, atol=1e-12)
