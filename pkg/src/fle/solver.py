"""Positive-solution solver: normalized power iteration plus damped Newton.

The map T(u) = Linv(|x|^{-alpha} (Linv(|x|^{-beta} u_+^q))_+^p) is positive
and homogeneous of degree pq; in the superlinear regime pq > 1 its
normalized direction iteration u <- T(u)/||T(u)|| has a nontrivial fixed
direction by construction, sidestepping the trivial solution.  The fixed
direction is rescaled by the Rayleigh factor kappa = <T(u), u> through
u = kappa^{-1/(pq-1)} u, which turns an exact fixed direction into an
exact solution of the discrete weak system.  A damped Newton pass on the
stacked modal residual then drives the defect to tolerance; Jacobians of
sublinear branches (p < 1 or q < 1) are built with a smoothed power whose
epsilon follows a continuation schedule down to zero.

Everything runs in the coefficient space of the operator's eigenbasis:
exact sine modes for the spectral kind, numerical eigenvectors (evaluated
between collocation points by cubic interpolation) for the restricted one.
No randomness enters anywhere and summation orders are fixed, so reruns
are bit-identical.
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import CubicSpline

from .basis import Field, suggested_order
from .domain import Domain
from .energy import EnergyReport, SolutionPair, lagrangian, theta_norm
from .errors import (
    AdmissibilityFailure,
    FleError,
    NotConverged,
    SingularJacobian,
    TrivialCollapse,
    UnsupportedRegime,
)
from .exponents import (
    ExponentPair,
    ProblemParams,
    admissible_t_interval,
    check_problem,
    hyperbole_gap,
)
from .operators import SPECTRAL, DiscreteOperator
from .quadrature import QuadratureRule, build_graded_rule


@dataclass(frozen=True)
class SolverConfig:
    """Discretization sizes, tolerances and continuation knobs."""

    M: int = 64
    panels: int = 10
    order: int | None = None
    tol_fix: float = 1e-13
    tol_res: float = 1e-10
    max_iter_power: int = 400
    max_iter_newton: int = 60
    damping: float = 1.0
    smoothing_eps: tuple = (1e-2, 1e-4, 1e-6, 1e-8, 0.0)
    min_norm: float = 1e-8
    fine_points: int = 2001

    def __post_init__(self):
        if not (self.tol_fix > 0.0 and self.tol_res > 0.0):
            raise ValueError("tolerances must be positive")
        if self.min_norm <= 0.0:
            raise ValueError("min_norm must be positive")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError(f"damping must lie in (0, 1], got {self.damping}")


@dataclass(frozen=True)
class GridPair:
    """Restricted-operator counterpart of SolutionPair: values on the grid."""

    u: np.ndarray
    v: np.ndarray
    grid: np.ndarray
    params: ProblemParams
    pair: ExponentPair
    t: float

    def to_dict(self):
        return {
            "kind": "grid",
            "u": self.u.tolist(),
            "v": self.v.tolist(),
            "grid_size": int(self.grid.size),
            "t": self.t,
        }


@dataclass(frozen=True)
class SolveResult:
    """One solve: the pair, its energy data and the convergence record."""

    pair: SolutionPair | GridPair
    energy: EnergyReport
    iterations: tuple
    positivity_min: float
    converged: bool

    def to_dict(self):
        if isinstance(self.pair, GridPair):
            pair_dict = self.pair.to_dict()
        else:
            pair_dict = {
                "kind": "modal",
                "u": self.pair.u.to_dict(),
                "v": self.pair.v.to_dict(),
                "t": self.pair.t,
            }
        p = self.pair.params
        e = self.pair.pair
        return {
            "params": {"N": p.N, "s": p.s, "alpha": p.alpha, "beta": p.beta},
            "exponents": {"p": e.p, "q": e.q},
            "pair": pair_dict,
            "energy": self.energy.to_dict(),
            "iterations": {
                "power": self.iterations[0],
                "newton": self.iterations[1],
            },
            "positivity_min": self.positivity_min,
            "converged": self.converged,
        }


def _smoothed_power(values, expo, eps):
    """(v_+^2 + eps^2)^{(expo-1)/2} v_+ ; plain positive power at eps = 0."""
    pos = np.clip(values, 0.0, None)
    if eps == 0.0 or expo >= 1.0:
        return pos**expo
    return pos * (pos * pos + eps * eps) ** ((expo - 1.0) / 2.0)


def _smoothed_power_prime(values, expo, eps):
    pos = np.clip(values, 0.0, None)
    if eps == 0.0 or expo >= 1.0:
        out = np.zeros_like(pos)
        mask = pos > 0.0
        out[mask] = expo * pos[mask] ** (expo - 1.0)
        return out
    sq = pos * pos + eps * eps
    out = sq ** ((expo - 3.0) / 2.0) * (expo * pos * pos + eps * eps)
    out[np.asarray(values) <= 0.0] = 0.0
    return out


class _ModalFrame:
    """Operator, basis values and weighted quadrature in one coordinate frame.

    Iterations live on eigen-coefficients; this object owns the node
    matrix of basis functions, the alpha/beta-weighted node weights and
    the conversion back to the user-facing solution containers.
    """

    def __init__(self, op: DiscreteOperator, params: ProblemParams, rule: QuadratureRule):
        self.op = op
        self.params = params
        self.rule = rule
        self.mu = op.multipliers
        if op.kind == SPECTRAL:
            self.modes = op.basis.evaluate_modes(rule.nodes)
        else:
            grid = op.grid
            xs = np.concatenate(([-1.0], grid, [1.0]))
            cols = np.empty((rule.nodes.size, grid.size))
            for k in range(grid.size):
                ys = np.concatenate(([0.0], op.vectors[:, k], [0.0]))
                cols[:, k] = CubicSpline(xs, ys, bc_type="natural")(rule.nodes)
            self.modes = cols
        radii = rule.radii
        self.wa = rule.weights * (radii**-params.alpha if params.alpha else 1.0)
        self.wb = rule.weights * (radii**-params.beta if params.beta else 1.0)

    def apply_T(self, c, p, q):
        """One application of the composed positive map; returns (Tc, d)."""
        u_nodes = self.modes @ c
        d = (self.modes.T @ (self.wb * _smoothed_power(u_nodes, q, 0.0))) / self.mu
        v_nodes = self.modes @ d
        c_new = (self.modes.T @ (self.wa * _smoothed_power(v_nodes, p, 0.0))) / self.mu
        return c_new, d

    def residual(self, c, d, p, q, eps=0.0):
        u_nodes = self.modes @ c
        v_nodes = self.modes @ d
        F = self.mu * c - self.modes.T @ (self.wa * _smoothed_power(v_nodes, p, eps))
        G = self.mu * d - self.modes.T @ (self.wb * _smoothed_power(u_nodes, q, eps))
        return F, G, u_nodes, v_nodes

    def to_pair(self, c, d, pairexp, t):
        if self.op.kind == SPECTRAL:
            basis = self.op.basis
            return SolutionPair(
                Field(basis, c), Field(basis, d), self.params, pairexp, t
            )
        return GridPair(
            u=self.op.vectors @ c,
            v=self.op.vectors @ d,
            grid=self.op.grid,
            params=self.params,
            pair=pairexp,
            t=t,
        )

    def energy_report(self, c, d, pairexp, t):
        if self.op.kind == SPECTRAL:
            return lagrangian(self.to_pair(c, d, pairexp, t), self.op, self.rule)
        p, q = pairexp.p, pairexp.q
        F, G, u_nodes, v_nodes = self.residual(c, d, p, q)
        Q = float(np.sum(self.mu * c * d))
        H = float(
            self.wa @ (np.clip(v_nodes, 0.0, None) ** (p + 1.0) / (p + 1.0))
            + self.wb @ (np.clip(u_nodes, 0.0, None) ** (q + 1.0) / (q + 1.0))
        )
        res = float(max(np.max(np.abs(F)), np.max(np.abs(G))))
        return EnergyReport(Q=Q, H_integral=H, J=Q - H, residual_sup=res)


def build_solve_rule(op: DiscreteOperator, params: ProblemParams, config: SolverConfig) -> QuadratureRule:
    """Quadrature rule strong enough for both weights and the basis size."""
    gamma = max(params.alpha, params.beta)
    if op.kind == SPECTRAL:
        order = config.order or suggested_order(op.basis, config.panels)
        domain = op.basis.domain
    else:
        order = config.order or 24
        domain = Domain.interval()
    return build_graded_rule(domain, gamma, panels=config.panels, order=order)


def _superlinearity_gate(pairexp):
    if pairexp.p * pairexp.q <= 1.0:
        raise UnsupportedRegime(
            f"needs pq > 1, got pq = {pairexp.p * pairexp.q}"
        )


def resolve_t(params: ProblemParams, pairexp: ExponentPair) -> float:
    """Midpoint of the admissible t-window.

    Exactly critical data pinches the window to a point; the pinch value
    is still a valid splitting for the truncated discrete system, so it
    is returned rather than refused.  A genuinely empty window raises.
    """
    interval = admissible_t_interval(params, pairexp)
    if not interval.empty:
        return interval.midpoint
    if abs(interval.hi - interval.lo) <= 1e-12:
        return 0.5 * (interval.lo + interval.hi)
    raise AdmissibilityFailure(
        f"t-window ({interval.lo}, {interval.hi}) is empty"
    )


def default_fine_grid(domain, n: int = 2001):
    """Uniform sampling used for positivity and sup-norm reporting."""
    if domain.dim == 1:
        return np.linspace(-1.0, 1.0, n)
    side = np.linspace(-1.0, 1.0, min(n, 129))
    X, Y = np.meshgrid(side, side, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()])


def evaluate_pair(pair, grid):
    """Sample (u, v) on a grid: modal pairs by synthesis, grid pairs by spline."""
    if isinstance(pair, GridPair):
        xs = np.concatenate(([-1.0], pair.grid, [1.0]))
        u = CubicSpline(xs, np.concatenate(([0.0], pair.u, [0.0])))(grid)
        v = CubicSpline(xs, np.concatenate(([0.0], pair.v, [0.0])))(grid)
        return u, v
    modes = pair.u.basis.evaluate_modes(grid)
    return modes @ pair.u.coefficients, modes @ pair.v.coefficients


def positivity_check(result: SolveResult, fine_grid) -> float:
    """Minimum of min(u, v) over the sampling grid; negative means failure."""
    u, v = evaluate_pair(result.pair, np.asarray(fine_grid, dtype=float))
    return float(min(np.min(u), np.min(v)))


def _finish(frame, c, d, pairexp, t, iters, config):
    pair = frame.to_pair(c, d, pairexp, t)
    energy = frame.energy_report(c, d, pairexp, t)
    domain = frame.rule.domain
    u_fine, v_fine = evaluate_pair(pair, default_fine_grid(domain, config.fine_points))
    pos_min = float(min(np.min(u_fine), np.min(v_fine)))
    norm_u = float(np.linalg.norm(c))
    converged = energy.residual_sup <= config.tol_res and norm_u >= config.min_norm
    return SolveResult(
        pair=pair,
        energy=energy,
        iterations=iters,
        positivity_min=pos_min,
        converged=converged,
    )


def nonlinear_power_iteration(
    params: ProblemParams,
    pairexp: ExponentPair,
    op: DiscreteOperator,
    config: SolverConfig,
    t: float | None = None,
    start: np.ndarray | None = None,
) -> SolveResult:
    """Iterate the normalized positive map to its fixed direction.

    Starts from the first eigenmode unless a warm-start direction is given.
    On convergence the direction is rescaled by kappa^{-1/(pq-1)} so an
    exact fixed direction becomes an exact discrete solution.
    """
    _superlinearity_gate(pairexp)
    if t is None:
        t = resolve_t(params, pairexp)
    frame = _ModalFrame(op, params, build_solve_rule(op, params, config))
    M = frame.mu.size
    if start is None:
        c = np.zeros(M)
        c[0] = 1.0
    else:
        c = np.asarray(start, dtype=float)
        nrm = np.linalg.norm(c)
        if nrm < config.min_norm:
            raise TrivialCollapse("warm-start direction has negligible norm")
        c = c / nrm
    p, q = pairexp.p, pairexp.q
    kappa = np.nan
    steps = 0
    for steps in range(1, config.max_iter_power + 1):
        tc, _ = frame.apply_T(c, p, q)
        nrm = float(np.linalg.norm(tc))
        if nrm < config.min_norm:
            raise TrivialCollapse(f"|T(u)| = {nrm} below min_norm")
        kappa = float(tc @ c)
        c_next = tc / nrm
        drift = float(np.linalg.norm(c_next - c))
        c = c_next
        if drift <= config.tol_fix:
            break
    else:
        raise NotConverged(
            f"direction drift stayed above {config.tol_fix} for "
            f"{config.max_iter_power} iterations"
        )
    if kappa <= 0.0:
        raise TrivialCollapse(f"Rayleigh factor {kappa} not positive")
    scale = kappa ** (-1.0 / (p * q - 1.0))
    c = scale * c
    _, d = frame.apply_T(c, p, q)
    if float(np.linalg.norm(c)) < config.min_norm:
        raise TrivialCollapse("rescaled solution collapsed below min_norm")
    return _finish(frame, c, d, pairexp, t, (steps, 0), config)


def newton_refine(
    seed: SolveResult, op: DiscreteOperator, config: SolverConfig
) -> SolveResult:
    """Damped Newton on the stacked modal residual (F, G).

    Every accepted step strictly decreases the residual norm; sublinear
    powers get smoothed Jacobians with epsilon walked down the schedule.
    The zero pair is a fixed point and is returned unchanged.
    """
    params = seed.pair.params
    pairexp = seed.pair.pair
    t = seed.pair.t
    frame = _ModalFrame(op, params, build_solve_rule(op, params, config))
    if isinstance(seed.pair, GridPair):
        h = op.stiffness.h
        c = h * (op.vectors.T @ seed.pair.u)
        d = h * (op.vectors.T @ seed.pair.v)
    else:
        c = seed.pair.u.coefficients.copy()
        d = seed.pair.v.coefficients.copy()
    if np.linalg.norm(c) < config.min_norm and np.linalg.norm(d) < config.min_norm:
        return replace(seed, iterations=(seed.iterations[0], 0))
    p, q = pairexp.p, pairexp.q
    if p >= 1.0 and q >= 1.0:
        schedule = (0.0,)
    else:
        schedule = tuple(config.smoothing_eps)
        if schedule[-1] != 0.0:
            schedule = schedule + (0.0,)
    M = frame.mu.size
    mu = frame.mu
    accepted = 0
    for eps in schedule:
        stage_tol = config.tol_res if eps == 0.0 else max(config.tol_res, 1e-3 * eps)
        F, G, u_nodes, v_nodes = frame.residual(c, d, p, q, eps)
        rnorm = float(np.hypot(np.linalg.norm(F), np.linalg.norm(G)))
        for _ in range(config.max_iter_newton):
            sup = max(np.max(np.abs(F)), np.max(np.abs(G)))
            if sup <= stage_tol:
                break
            da = frame.wa * _smoothed_power_prime(v_nodes, p, eps)
            db = frame.wb * _smoothed_power_prime(u_nodes, q, eps)
            A = frame.modes.T @ (frame.modes * da[:, None])
            B = frame.modes.T @ (frame.modes * db[:, None])
            J = np.zeros((2 * M, 2 * M))
            J[:M, :M] = np.diag(mu)
            J[M:, M:] = np.diag(mu)
            J[:M, M:] = -A
            J[M:, :M] = -B
            try:
                delta = np.linalg.solve(J, -np.concatenate([F, G]))
            except np.linalg.LinAlgError as exc:
                raise SingularJacobian(str(exc)) from exc
            lam = config.damping
            for _ in range(40):
                c_try = c + lam * delta[:M]
                d_try = d + lam * delta[M:]
                F_t, G_t, u_t, v_t = frame.residual(c_try, d_try, p, q, eps)
                r_try = float(np.hypot(np.linalg.norm(F_t), np.linalg.norm(G_t)))
                if r_try < rnorm:
                    break
                lam *= 0.5
            else:
                raise NotConverged(
                    "line search could not decrease the residual "
                    f"(stage eps={eps}, residual {rnorm:.3e})"
                )
            c, d = c_try, d_try
            F, G, u_nodes, v_nodes = F_t, G_t, u_t, v_t
            rnorm = r_try
            accepted += 1
        else:
            raise NotConverged(
                f"residual {float(max(np.max(np.abs(F)), np.max(np.abs(G)))):.3e} "
                f"above {stage_tol} after {config.max_iter_newton} steps at eps={eps}"
            )
    return _finish(
        frame, c, d, pairexp, t, (seed.iterations[0], accepted), config
    )


def solve_positive(
    params: ProblemParams,
    pairexp: ExponentPair,
    op: DiscreteOperator,
    config: SolverConfig | None = None,
    t: float | None = None,
    start: np.ndarray | None = None,
) -> SolveResult:
    """Power iteration seeded at the ground mode, then Newton refinement."""
    config = config or SolverConfig()
    seed = nonlinear_power_iteration(params, pairexp, op, config, t=t, start=start)
    return newton_refine(seed, op, config)


@dataclass(frozen=True)
class SweepRow:
    theta: float
    p: float
    q: float
    gap: float
    sup_u: float
    theta_norm_u: float
    J: float
    iter_power: int
    iter_newton: int
    converged: bool
    error: str | None = None

    def csv_cells(self):
        def num(x):
            return repr(float(x))

        return [
            num(self.p), num(self.q), num(self.gap), num(self.sup_u),
            num(self.theta_norm_u), num(self.J),
            str(self.iter_power), str(self.iter_newton),
            "true" if self.converged else "false",
        ]


SWEEP_HEADER = "p,q,gap,sup_u,theta_norm_u,J,iter_power,iter_newton,converged"


@dataclass(frozen=True)
class SweepReport:
    params: ProblemParams
    ray: tuple
    rows: tuple

    def to_csv_lines(self):
        lines = [SWEEP_HEADER]
        lines.extend(",".join(row.csv_cells()) for row in self.rows)
        return lines

    def to_dict(self):
        return {
            "ray": list(self.ray),
            "rows": [
                {
                    "theta": r.theta, "p": r.p, "q": r.q, "gap": r.gap,
                    "sup_u": r.sup_u, "theta_norm_u": r.theta_norm_u, "J": r.J,
                    "iter_power": r.iter_power, "iter_newton": r.iter_newton,
                    "converged": r.converged, "error": r.error,
                }
                for r in self.rows
            ],
        }


def _failed_row(theta, p, q, gap, err):
    return SweepRow(
        theta=theta, p=p, q=q, gap=gap,
        sup_u=float("nan"), theta_norm_u=float("nan"), J=float("nan"),
        iter_power=0, iter_newton=0, converged=False,
        error=f"{type(err).__name__}: {err}",
    )


def sweep_to_critical(
    params: ProblemParams,
    ray: tuple,
    thetas,
    op: DiscreteOperator,
    config: SolverConfig | None = None,
) -> SweepReport:
    """Solve along (p, q) = theta*(p0, q0), warm-starting each row.

    Inadmissible rows are recorded as failures and the sweep continues;
    a failed warm start falls back to a cold start before giving up on
    the row.
    """
    config = config or SolverConfig()
    p0, q0 = ray
    rows = []
    warm = None
    for theta in thetas:
        pairexp = ExponentPair(p=theta * p0, q=theta * q0)
        gap = hyperbole_gap(params, pairexp)
        try:
            t_row = resolve_t(params, pairexp)
            report = check_problem(params, pairexp, t_row)
            if not report.admissible:
                raise AdmissibilityFailure(
                    "row not admissible: " + ", ".join(report.failed_conditions())
                )
        except FleError as err:
            rows.append(_failed_row(theta, pairexp.p, pairexp.q, gap, err))
            continue
        result = None
        try:
            result = solve_positive(params, pairexp, op, config, t=t_row, start=warm)
        except FleError:
            try:
                result = solve_positive(params, pairexp, op, config, t=t_row)
            except FleError as err:
                rows.append(_failed_row(theta, pairexp.p, pairexp.q, gap, err))
                warm = None
                continue
        pair = result.pair
        if isinstance(pair, GridPair):
            sup_u = float(np.max(np.abs(pair.u)))
            tn = theta_norm(pair.u, t_row, op)
            warm_next = op.stiffness.h * (op.vectors.T @ pair.u)
        else:
            grid = default_fine_grid(pair.u.basis.domain, config.fine_points)
            u_fine, _ = evaluate_pair(pair, grid)
            sup_u = float(np.max(np.abs(u_fine)))
            tn = theta_norm(pair.u, t_row, op)
            warm_next = pair.u.coefficients
        rows.append(
            SweepRow(
                theta=theta, p=pairexp.p, q=pairexp.q, gap=gap,
                sup_u=sup_u, theta_norm_u=tn, J=result.energy.J,
                iter_power=result.iterations[0],
                iter_newton=result.iterations[1],
                converged=result.converged,
            )
        )
        warm = warm_next if result.converged else None
    return SweepReport(params=params, ray=tuple(ray), rows=tuple(rows))
