"""Composite Gauss-Legendre rules graded toward the origin singularity.

Weights of the form |x|^-gamma with gamma < N are integrable but defeat
uniform panels.  The rules here subdivide each side of the origin into
geometrically shrinking panels (ratio ``grading``, innermost panel width
``grading**-panels``) and place a Gauss-Legendre rule of fixed order on
every panel away from the origin.

The innermost panel [0, w] still touches the singularity, and plain Gauss
points there would cap the whole rule at a few digits.  That panel instead
gets Gauss points routed through the power map x = w*tau^kappa with an
integer kappa chosen from the design strength: the map absorbs |x|^-gamma
into a smooth (often polynomial) factor of tau, while the mapped weights
remain plain positive numbers.  Enough mapped points are used that ordinary
polynomials are still integrated exactly there, so the rule stays an
unweighted rule: the singular factor is applied pointwise at the nodes,
never folded into the stored weights, and one rule serves every weight up
to its design strength.

On the square the same 1-D graded partition of (0, 1] is tensorized in
each of the four quadrants, keeping the origin a corner of every block.
"""

from math import ceil

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .domain import Domain, INTERVAL
from .errors import GridMismatch, RuleMismatch, WeightNotIntegrable


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights of a graded composite rule plus its design data.

    ``gamma`` records the strongest singularity the rule was built for;
    integrating a stronger weight through it raises RuleMismatch.  For the
    square, ``axis_nodes``/``axis_weights`` hold the 1-D factor rule on
    (0, 1] so tensor structure can be exploited without materializing
    per-mode matrices.
    """

    domain: Domain
    nodes: np.ndarray
    weights: np.ndarray
    gamma: float
    panels: int
    order: int
    grading: float
    axis_nodes: np.ndarray | None = field(default=None, repr=False)
    axis_weights: np.ndarray | None = field(default=None, repr=False)

    @property
    def radii(self):
        if self.domain.dim == 1:
            return np.abs(self.nodes)
        return np.hypot(self.nodes[:, 0], self.nodes[:, 1])

    def integrate(self, values):
        values = np.asarray(values, dtype=float)
        if values.shape != self.weights.shape:
            raise GridMismatch(
                f"got {values.shape} values for {self.weights.shape} nodes"
            )
        return float(self.weights @ values)


# Strongest kappa the innermost map will use; keeps node counts bounded for
# design strengths within a hair of the non-integrable threshold.
_KAPPA_CAP = 128


def _power_kappa(gamma: float, dim: int) -> int:
    """Map exponent for the innermost panel.

    kappa*(1 - gamma/dim) >= 2 makes the mapped integrand vanish at the
    origin like tau or better for every weight up to the design strength.
    """
    return min(_KAPPA_CAP, max(2, ceil(2.0 * dim / (dim - gamma))))


def _innermost_rule(width: float, order: int, kappa: int):
    """Gauss points on [0, width] under the power map x = width*tau^kappa.

    kappa*order points keep plain polynomials up to degree 2*order - 1
    exactly integrated despite the map, so the rule stays unweighted.
    """
    tg, vg = leggauss(kappa * order)
    tau = 0.5 * (tg + 1.0)
    vtau = 0.5 * vg
    nodes = width * tau**kappa
    weights = width * kappa * tau ** (kappa - 1) * vtau
    return nodes, weights


def _axis_rule(gamma: float, dim: int, panels: int, order: int, grading: float):
    """Composite rule on (0, 1]: mapped innermost panel, Gauss panels above."""
    width = grading**-panels
    nodes = [np.empty(0)]
    weights = [np.empty(0)]
    nodes[0], weights[0] = _innermost_rule(width, order, _power_kappa(gamma, dim))
    xg, wg = leggauss(order)
    edges = grading ** -np.arange(panels, -1.0, -1.0)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes.append((mid[:, None] + half[:, None] * xg[None, :]).ravel())
    weights.append((half[:, None] * wg[None, :]).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def build_graded_rule(
    domain: Domain,
    gamma: float,
    panels: int = 14,
    order: int = 24,
    grading: float = 2.0,
) -> QuadratureRule:
    """Build a graded composite Gauss rule able to resolve |x|^-gamma.

    Parameters
    ----------
    domain : Domain
        Interval or square.
    gamma : float
        Design singularity strength; must satisfy gamma < N for the weight
        to be integrable at the origin.
    panels : int
        Number of geometric refinement levels per side (>= 2).
    order : int
        Gauss-Legendre points per panel (>= 2).
    grading : float
        Geometric ratio between adjacent panel widths (> 1).
    """
    if gamma >= domain.dim:
        raise WeightNotIntegrable(
            f"|x|^-{gamma} is not integrable in dimension {domain.dim}"
        )
    if gamma < 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if panels < 2:
        raise ValueError(f"panels must be >= 2, got {panels}")
    if order < 2:
        raise ValueError(f"order must be >= 2, got {order}")
    if grading <= 1.0:
        raise ValueError(f"grading must exceed 1, got {grading}")

    pos_nodes, pos_weights = _axis_rule(gamma, domain.dim, panels, order, grading)

    if domain.dim == 1:
        nodes = np.concatenate((-pos_nodes[::-1], pos_nodes))
        weights = np.concatenate((pos_weights[::-1], pos_weights))
        return QuadratureRule(
            domain, nodes, weights, gamma, panels, order, grading
        )

    # square: tensor the positive-axis rule in each quadrant
    nx = pos_nodes.size
    pts = []
    wts = []
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            gx = np.repeat(sx * pos_nodes, nx)
            gy = np.tile(sy * pos_nodes, nx)
            pts.append(np.column_stack((gx, gy)))
            wts.append(np.repeat(pos_weights, nx) * np.tile(pos_weights, nx))
    nodes = np.concatenate(pts, axis=0)
    weights = np.concatenate(wts)
    return QuadratureRule(
        domain,
        nodes,
        weights,
        gamma,
        panels,
        order,
        grading,
        axis_nodes=pos_nodes,
        axis_weights=pos_weights,
    )


def integrate_weighted(values, gamma: float, rule: QuadratureRule) -> float:
    """Integrate values * |x|^-gamma over the rule's domain.

    ``values`` are samples of the smooth factor at ``rule.nodes``; the
    singular weight is applied analytically at the nodes.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != rule.weights.shape:
        raise GridMismatch(
            f"got {values.shape} values for {rule.weights.shape} nodes"
        )
    if gamma > rule.gamma:
        raise RuleMismatch(
            f"rule built for gamma <= {rule.gamma}, asked for {gamma}"
        )
    if gamma == 0.0:
        return float(rule.weights @ values)
    return float(rule.weights @ (values * rule.radii ** -gamma))
