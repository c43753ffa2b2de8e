"""Dirichlet eigenbasis of the Laplacian on the model domains.

On (-1, 1) the eigenpairs are phi_k(x) = sin(k pi (x+1)/2) with
lambda_k = (k pi / 2)^2, already L^2-normalized.  On the square the basis
is the tensor product, sorted by eigenvalue with lexicographic wave-number
tie-break.  Spectral fractional operators act diagonally on coefficients
against this basis.
"""

from dataclasses import dataclass

import numpy as np

from .domain import Domain, INTERVAL, SQUARE
from .errors import BasisMismatch, GridMismatch, PointOutsideDomain
from .quadrature import QuadratureRule

_BOUNDARY_SLACK = 1e-12


@dataclass(frozen=True)
class EigenBasis:
    """First M Dirichlet sine modes on a model domain.

    ``modes`` holds wave-number tuples, shape (M, dim); ``eigenvalues``
    the matching Laplacian eigenvalues in ascending order.
    """

    domain: Domain
    M: int
    eigenvalues: np.ndarray
    modes: np.ndarray

    def _axis_points(self, points):
        points = np.asarray(points, dtype=float)
        if self.domain.dim == 1:
            pts = np.atleast_1d(points)
            if pts.ndim != 1:
                raise GridMismatch(f"interval points must be 1-d, got {pts.shape}")
            coords = pts[:, None]
        else:
            pts = np.atleast_2d(points)
            if pts.ndim != 2 or pts.shape[1] != 2:
                raise GridMismatch(f"square points must be (n, 2), got {pts.shape}")
            coords = pts
        if np.any(np.abs(coords) > 1.0 + _BOUNDARY_SLACK):
            raise PointOutsideDomain("evaluation point outside the closed domain")
        return coords

    def evaluate_modes(self, points) -> np.ndarray:
        """Matrix of mode values at the given points, shape (npts, M).

        Rows for points on the boundary are exactly zero: every mode
        satisfies the Dirichlet condition and the sine evaluation is
        replaced by the known zero there.
        """
        coords = self._axis_points(points)
        on_boundary = np.any(np.abs(coords) >= 1.0, axis=1)
        if self.domain.dim == 1:
            k = self.modes[:, 0].astype(float)
            phi = np.sin(0.5 * np.pi * np.outer(coords[:, 0] + 1.0, k))
        else:
            kx = self.modes[:, 0].astype(float)
            ky = self.modes[:, 1].astype(float)
            kmax = int(self.modes.max())
            sx = np.sin(
                0.5 * np.pi * np.outer(coords[:, 0] + 1.0, np.arange(1, kmax + 1))
            )
            sy = np.sin(
                0.5 * np.pi * np.outer(coords[:, 1] + 1.0, np.arange(1, kmax + 1))
            )
            phi = sx[:, self.modes[:, 0] - 1] * sy[:, self.modes[:, 1] - 1]
        phi[on_boundary, :] = 0.0
        return phi


def build_sine_basis(domain: Domain, M: int | None = None) -> EigenBasis:
    """First M Dirichlet sine modes; default M = 64 (interval), 256 (square)."""
    if M is None:
        M = 64 if domain.dim == 1 else 256
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    quarter_pi_sq = (np.pi / 2.0) ** 2
    if domain.dim == 1:
        k = np.arange(1, M + 1)
        modes = k[:, None].copy()
        eigenvalues = quarter_pi_sq * k.astype(float) ** 2
        return EigenBasis(domain, M, eigenvalues, modes)
    # enumerate enough tensor modes to cover M after sorting by eigenvalue
    side = max(int(np.ceil(np.sqrt(2.0 * M))) + 2, 8)
    j, k = np.meshgrid(np.arange(1, side + 1), np.arange(1, side + 1), indexing="ij")
    pairs = np.column_stack((j.ravel(), k.ravel()))
    lam = quarter_pi_sq * (pairs[:, 0].astype(float) ** 2 + pairs[:, 1].astype(float) ** 2)
    order = np.lexsort((pairs[:, 1], pairs[:, 0], lam))
    if order.size < M:
        raise ValueError(f"mode enumeration too small for M={M}")
    sel = order[:M]
    return EigenBasis(domain, M, lam[sel], pairs[sel])


@dataclass(frozen=True)
class Field:
    """Coefficient vector against an eigenbasis."""

    basis: EigenBasis
    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        if coeffs.shape != (self.basis.M,):
            raise BasisMismatch(
                f"expected {self.basis.M} coefficients, got shape {coeffs.shape}"
            )
        object.__setattr__(self, "coefficients", coeffs)

    def to_dict(self):
        return {
            "domain": self.basis.domain.kind,
            "M": self.basis.M,
            "coefficients": self.coefficients.tolist(),
        }


def zero_field(basis: EigenBasis) -> Field:
    return Field(basis, np.zeros(basis.M))


def evaluate_field(field: Field, points) -> np.ndarray:
    """Pointwise values sum_k xi_k phi_k(points); exact zero on the boundary."""
    return field.basis.evaluate_modes(points) @ field.coefficients


def project(values, rule: QuadratureRule, basis: EigenBasis) -> Field:
    """L^2 projection of node values onto the basis through a quadrature rule.

    xi_k = sum_i w_i values_i phi_k(x_i).  The rule must live on the same
    domain as the basis and supply one value per node.
    """
    values = np.asarray(values, dtype=float)
    if rule.domain != basis.domain:
        raise GridMismatch(
            f"rule domain {rule.domain.kind} != basis domain {basis.domain.kind}"
        )
    if values.shape != rule.weights.shape:
        raise GridMismatch(
            f"got {values.shape} values for {rule.weights.shape} nodes"
        )
    phi = basis.evaluate_modes(rule.nodes)
    return Field(basis, phi.T @ (rule.weights * values))


def suggested_order(basis: EigenBasis, panels: int) -> int:
    """Panel order resolving products of the basis's highest modes.

    The outermost graded panel has width ~1/2; a pair of top modes
    oscillates like sin(k_max pi x), so the Gauss order must grow linearly
    with the top wave number for the projection Gram matrix to be identity
    to ~1e-12.
    """
    kmax = int(basis.modes.max())
    return max(12, int(np.ceil(0.8 * kmax)) + 8)
