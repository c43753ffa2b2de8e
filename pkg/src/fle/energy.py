"""Variational quantities for the weighted system: J, Q, Hamiltonians, norms.

The functional whose critical points are weak solutions splits as
J(u,v) = Q(u,v) - int H(u,v,x), with the quadratic part Q diagonal in the
operator's eigenbasis and the Hamiltonian

    H(u,v,x) = v^{p+1} / ((p+1)|x|^alpha) + u^{q+1} / ((q+1)|x|^beta).

Nonpositive field values have no meaningful non-integer power, so the
working form is the modified Hamiltonian: every power acts on the positive
part, which agrees with H on the positive quadrant, vanishes on the
nonpositive one, and stays continuous across the axes.  The raw form is
kept for reporting on solutions that are already positive.

Alongside J live the scale-t norms on the eigencoefficients, the E+/E-
splitting that diagonalizes Q's sign, and the modal weak-form residual
used as the convergence certificate of the solver.
"""

from dataclasses import dataclass

import numpy as np

from .basis import Field
from .errors import BasisMismatch, RuleMismatch, UnsupportedKind
from .exponents import ExponentPair, ProblemParams
from .operators import SPECTRAL, DiscreteOperator
from .quadrature import QuadratureRule


@dataclass(frozen=True)
class SolutionPair:
    """A candidate pair (u, v) with the data that makes it checkable."""

    u: Field
    v: Field
    params: ProblemParams
    pair: ExponentPair
    t: float

    def __post_init__(self):
        if self.u.basis.domain != self.v.basis.domain:
            raise BasisMismatch("u and v must live on the same domain")
        if not 0.0 < self.t < 2.0 * self.params.s:
            raise ValueError(
                f"scale split t={self.t} outside (0, {2.0 * self.params.s})"
            )


@dataclass(frozen=True)
class EnergyReport:
    """Evaluated energy data; J is Q - H_integral by construction."""

    Q: float
    H_integral: float
    J: float
    residual_sup: float

    def to_dict(self) -> dict:
        return {
            "Q": self.Q,
            "H_integral": self.H_integral,
            "J": self.J,
            "residual_sup": self.residual_sup,
        }


def _radii(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    r = np.hypot(x[..., 0], x[..., 1]) if x.ndim == 2 else np.abs(x)
    if np.any(r == 0.0):
        raise ValueError("the density is evaluated away from the origin only")
    return r


def _power(values: np.ndarray, exponent: float, positive_part: bool):
    if positive_part or not float(exponent).is_integer():
        return np.clip(values, 0.0, None) ** exponent
    return values**exponent


def hamiltonian_density(
    u_val, v_val, x,
    params: ProblemParams, pair: ExponentPair, modified: bool = False,
):
    """Pointwise H(u,v,x); the modified flag switches to positive parts."""
    r = _radii(x)
    u_val = np.asarray(u_val, dtype=float)
    v_val = np.asarray(v_val, dtype=float)
    vterm = _power(v_val, pair.p + 1.0, modified) / (pair.p + 1.0)
    uterm = _power(u_val, pair.q + 1.0, modified) / (pair.q + 1.0)
    out = vterm * r**-params.alpha + uterm * r**-params.beta
    return float(out) if out.ndim == 0 else out


def hamiltonian_gradients(
    u_val, v_val, x,
    params: ProblemParams, pair: ExponentPair, modified: bool = True,
):
    """(H_u, H_v) = (u^q |x|^{-beta}, v^p |x|^{-alpha}), positive parts when modified."""
    r = _radii(x)
    u_val = np.asarray(u_val, dtype=float)
    v_val = np.asarray(v_val, dtype=float)
    h_u = _power(u_val, pair.q, modified) * r**-params.beta
    h_v = _power(v_val, pair.p, modified) * r**-params.alpha
    if h_u.ndim == 0:
        return float(h_u), float(h_v)
    return h_u, h_v


def _check_spectral(op: DiscreteOperator, *fields: Field) -> None:
    if op.kind != SPECTRAL:
        raise UnsupportedKind("modal energy evaluation needs the spectral kind")
    for fld in fields:
        if fld.basis is not op.basis:
            raise BasisMismatch("field expanded in a different basis than the operator")


def quadratic_form(sol: SolutionPair, op: DiscreteOperator) -> float:
    """Q = sum_k mu_k c_k d_k over the shared eigenbasis."""
    _check_spectral(op, sol.u, sol.v)
    return float(np.sum(op.multipliers * sol.u.coefficients * sol.v.coefficients))


def _weighted_node_weights(rule: QuadratureRule, gamma: float) -> np.ndarray:
    if gamma > rule.gamma:
        raise RuleMismatch(
            f"rule built for gamma <= {rule.gamma}, asked for {gamma}"
        )
    if gamma == 0.0:
        return rule.weights
    return rule.weights * rule.radii**-gamma


def lagrangian(
    sol: SolutionPair, op: DiscreteOperator, rule: QuadratureRule
) -> EnergyReport:
    """Evaluate J = Q - int H~ and attach the weak-residual certificate."""
    _check_spectral(op, sol.u, sol.v)
    Q = quadratic_form(sol, op)
    modes = op.basis.evaluate_modes(rule.nodes)
    u_nodes = modes @ sol.u.coefficients
    v_nodes = modes @ sol.v.coefficients
    wa = _weighted_node_weights(rule, sol.params.alpha)
    wb = _weighted_node_weights(rule, sol.params.beta)
    p, q = sol.pair.p, sol.pair.q
    H = float(
        wa @ (np.clip(v_nodes, 0.0, None) ** (p + 1.0) / (p + 1.0))
        + wb @ (np.clip(u_nodes, 0.0, None) ** (q + 1.0) / (q + 1.0))
    )
    F, G = _residual_from_nodes(sol, op, rule, modes, u_nodes, v_nodes)
    res = float(max(np.max(np.abs(F)), np.max(np.abs(G))))
    return EnergyReport(Q=Q, H_integral=H, J=Q - H, residual_sup=res)


def theta_norm(target, t: float, op: DiscreteOperator) -> float:
    """Scale-t norm (sum_k lambda_k^t xi_k^2)^{1/2}; t < 0 gives dual norms.

    Spectral: exact eigenvalue powers on a modal Field.  Restricted: grid
    values are expanded in the numerical eigenvectors and the multipliers
    are raised to t/s.
    """
    if op.kind == SPECTRAL:
        if not isinstance(target, Field) or target.basis is not op.basis:
            raise BasisMismatch("spectral theta norm needs a field on op's basis")
        lam = op.basis.eigenvalues
        return float(np.sqrt(np.sum(lam**t * target.coefficients**2)))
    values = np.asarray(target, dtype=float)
    xi = op.stiffness.h * (op.vectors.T @ values)
    return float(np.sqrt(np.sum(op.multipliers ** (t / op.s) * xi**2)))


def eplus_eminus_decompose(sol: SolutionPair, op: DiscreteOperator):
    """Split (u,v) into the diagonals v = +A^{t-s}u and v = -A^{t-s}u.

    Modewise, u±_k = (c_k ± lambda_k^{s-t} d_k)/2 and v± = ±A^{t-s}u±; the
    parts sum back to (u, v) and Q is sign-definite on each diagonal.
    """
    _check_spectral(op, sol.u, sol.v)
    lam = op.basis.eigenvalues
    shift = lam ** (op.s - sol.t)
    c, d = sol.u.coefficients, sol.v.coefficients
    u_plus = 0.5 * (c + shift * d)
    u_minus = 0.5 * (c - shift * d)
    v_plus = u_plus / shift
    v_minus = -u_minus / shift
    basis = op.basis
    return (
        (Field(basis, u_plus), Field(basis, v_plus)),
        (Field(basis, u_minus), Field(basis, v_minus)),
    )


def _residual_from_nodes(sol, op, rule, modes, u_nodes, v_nodes):
    wa = _weighted_node_weights(rule, sol.params.alpha)
    wb = _weighted_node_weights(rule, sol.params.beta)
    p, q = sol.pair.p, sol.pair.q
    rhs_u = modes.T @ (wa * np.clip(v_nodes, 0.0, None) ** p)
    rhs_v = modes.T @ (wb * np.clip(u_nodes, 0.0, None) ** q)
    F = op.multipliers * sol.u.coefficients - rhs_u
    G = op.multipliers * sol.v.coefficients - rhs_v
    return F, G


def weak_residual(sol: SolutionPair, op: DiscreteOperator, rule: QuadratureRule):
    """Modal residuals (F, G) of the weak formulation.

    F_k = mu_k c_k - int v_+^p |x|^{-alpha} phi_k and symmetrically for G;
    both vanish (to quadrature accuracy) exactly at weak solutions.
    """
    _check_spectral(op, sol.u, sol.v)
    modes = op.basis.evaluate_modes(rule.nodes)
    u_nodes = modes @ sol.u.coefficients
    v_nodes = modes @ sol.v.coefficients
    return _residual_from_nodes(sol, op, rule, modes, u_nodes, v_nodes)
