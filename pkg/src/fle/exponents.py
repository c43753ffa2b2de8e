"""Exponent algebra for the weighted fractional Lane-Emden system.

The system couples two unknowns through power nonlinearities v^p/|x|^alpha
and u^q/|x|^beta.  Everything in this module is closed-form arithmetic on
the exponents: the critical hyperbole in the (p, q) plane,

    (N - alpha)/(p + 1) + (N - beta)/(q + 1) = N - 2s,

its asymptotes, its intersection with the sublinearity boundary pq = 1,
and the interval of auxiliary regularity exponents t for which the
variational framework is available.
"""

from dataclasses import dataclass

from .errors import AdmissibilityFailure, DegenerateWeight


@dataclass(frozen=True)
class ProblemParams:
    """Dimension N, fractional order s and weight exponents alpha, beta.

    Valid parameters satisfy N in {1, 2}, 0 < s < 1 with N > 2s, and
    alpha, beta < N so the weights are integrable.  Construction does not
    validate; call :meth:`validate` where a guarantee is needed so that
    deliberately broken inputs can still be fed to :func:`check_problem`.
    """

    N: int
    s: float
    alpha: float = 0.0
    beta: float = 0.0

    def validate(self):
        if self.N not in (1, 2):
            raise ValueError(f"N must be 1 or 2, got {self.N}")
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")
        if self.N - 2.0 * self.s <= 0.0:
            raise ValueError(f"need N > 2s, got N={self.N}, s={self.s}")
        if not (self.alpha < self.N and self.beta < self.N):
            raise ValueError(
                f"weights need alpha, beta < N, got {self.alpha}, {self.beta}"
            )
        return self


@dataclass(frozen=True)
class ExponentPair:
    """Nonlinearity powers (p, q), both positive."""

    p: float
    q: float

    def validate(self):
        if not (self.p > 0.0 and self.q > 0.0):
            raise ValueError(f"exponents must be positive, got {self.p}, {self.q}")
        return self


@dataclass(frozen=True)
class TInterval:
    """Open interval (lo, hi) of admissible auxiliary exponents t."""

    lo: float
    hi: float

    @property
    def empty(self):
        return not self.lo < self.hi

    @property
    def midpoint(self):
        if self.empty:
            raise AdmissibilityFailure("t-interval is empty")
        return 0.5 * (self.lo + self.hi)

    def contains(self, t):
        # boundary values are not admissible
        return (not self.empty) and self.lo < t < self.hi


def hyperbole_gap(params: ProblemParams, pair: ExponentPair) -> float:
    """Signed distance of (p, q) from the critical hyperbole.

    Returns (N-alpha)/(p+1) + (N-beta)/(q+1) - (N-2s); positive means
    subcritical, zero critical, negative supercritical.
    """
    N, s = params.N, params.s
    return (
        (N - params.alpha) / (pair.p + 1.0)
        + (N - params.beta) / (pair.q + 1.0)
        - (N - 2.0 * s)
    )


def asymptotes(params: ProblemParams) -> tuple[float, float]:
    """(vertical, horizontal) asymptotes of the critical hyperbole.

    The vertical asymptote is p = (2s - alpha)/(N - 2s), approached as
    q -> inf; the horizontal one is q = (2s - beta)/(N - 2s).  Either may
    be negative, in which case the curve enters the first quadrant only
    partially.
    """
    d = params.N - 2.0 * params.s
    return (2.0 * params.s - params.alpha) / d, (2.0 * params.s - params.beta) / d


def critical_q_of_p(params: ProblemParams, p: float):
    """q on the critical hyperbole at abscissa p, or None left of the asymptote."""
    rem = (params.N - 2.0 * params.s) - (params.N - params.alpha) / (p + 1.0)
    if rem <= 0.0:
        return None
    return (params.N - params.beta) / rem - 1.0


def pq_one_intersection_roots(params: ProblemParams) -> tuple[float, float]:
    """Both closed-form roots for the hyperbole meeting pq = 1.

    Substituting p = 1/q into the hyperbole equation gives a quadratic
    whose two branches are q = (beta - 2s)/(2s - alpha) and the spurious
    root q = -1 (which solves the cleared equation but corresponds to the
    excluded point p + 1 = 0).  Returned as (genuine, spurious).
    """
    s2 = 2.0 * params.s
    if params.alpha == s2:
        raise DegenerateWeight("alpha = 2s: no finite pq = 1 intersection")
    genuine = (params.beta - s2) / (s2 - params.alpha)
    return genuine, -1.0


def pq1_intersection(params: ProblemParams):
    """First-quadrant intersection of the hyperbole with pq = 1, if any.

    Returns (p*, q*) with q* = (beta - 2s)/(2s - alpha) and p* = 1/q*
    when q* > 0, and None when the curves only meet outside the first
    quadrant.  Raises DegenerateWeight when alpha = 2s.
    """
    q_star, _ = pq_one_intersection_roots(params)
    if q_star <= 0.0:
        return None
    return 1.0 / q_star, q_star


def is_superlinear(pair: ExponentPair) -> bool:
    """Whether 1 > 1/(p+1) + 1/(q+1), equivalently pq > 1."""
    return 1.0 > 1.0 / (pair.p + 1.0) + 1.0 / (pair.q + 1.0)


def admissible_t_interval(params: ProblemParams, pair: ExponentPair) -> TInterval:
    """Open interval of auxiliary exponents t splitting the regularity 2s.

    For 2s < N < 4s the whole window (N/2, 2s) works.  For N >= 4s the
    windows t > 0 must additionally satisfy q+1 < 2(N-beta)/(N-2t) and
    p+1 < 2(N-alpha)/(N-(4s-2t)), which pin t between two affine bounds.
    """
    N, s = params.N, params.s
    if 2.0 * s < N < 4.0 * s:
        return TInterval(N / 2.0, 2.0 * s)
    lo = 0.5 * (N - 2.0 * (N - params.beta) / (pair.q + 1.0))
    hi = 0.5 * (2.0 * (N - params.alpha) / (pair.p + 1.0) - N + 4.0 * s)
    return TInterval(max(lo, 0.0), min(hi, 2.0 * s))


def default_t(params: ProblemParams, pair: ExponentPair) -> float:
    """Midpoint of the admissible t-interval; raises if the interval is empty."""
    return admissible_t_interval(params, pair).midpoint


@dataclass(frozen=True)
class AdmissibilityReport:
    """Pass/fail per admissibility condition with numeric margins."""

    subcritical: bool
    gap: float
    superlinear: bool
    pq_margin: float
    t_in_range: bool
    t: float
    t_lo: float
    t_hi: float
    t_margin: float
    weights_integrable: bool
    weight_margin: float
    admissible: bool

    def to_dict(self):
        return {
            "subcritical": self.subcritical,
            "gap": self.gap,
            "superlinear": self.superlinear,
            "pq_margin": self.pq_margin,
            "t_in_range": self.t_in_range,
            "t": self.t,
            "t_lo": self.t_lo,
            "t_hi": self.t_hi,
            "t_margin": self.t_margin,
            "weights_integrable": self.weights_integrable,
            "weight_margin": self.weight_margin,
            "admissible": self.admissible,
        }

    def failed_conditions(self):
        names = []
        if not self.subcritical:
            names.append("subcritical")
        if not self.superlinear:
            names.append("superlinear")
        if not self.t_in_range:
            names.append("t_in_range")
        if not self.weights_integrable:
            names.append("weights_integrable")
        return names


def check_problem(params: ProblemParams, pair: ExponentPair, t: float) -> AdmissibilityReport:
    """Evaluate every admissibility condition; never raises.

    Conditions: strict subcriticality (gap > 0), superlinearity (pq > 1),
    t strictly inside the admissible interval, and integrable weights
    (alpha, beta < N).  The report is admissible iff all four pass.
    """
    gap = hyperbole_gap(params, pair)
    pq_margin = pair.p * pair.q - 1.0
    interval = admissible_t_interval(params, pair)
    if interval.empty:
        t_margin = interval.lo - interval.hi  # negative: how far from opening up
        t_ok = False
    else:
        t_margin = min(t - interval.lo, interval.hi - t)
        t_ok = interval.contains(t)
    weight_margin = min(params.N - params.alpha, params.N - params.beta)
    weights_ok = weight_margin > 0.0
    subcritical = gap > 0.0
    superlinear = is_superlinear(pair)
    return AdmissibilityReport(
        subcritical=subcritical,
        gap=gap,
        superlinear=superlinear,
        pq_margin=pq_margin,
        t_in_range=t_ok,
        t=t,
        t_lo=interval.lo,
        t_hi=interval.hi,
        t_margin=t_margin,
        weights_integrable=weights_ok,
        weight_margin=weight_margin,
        admissible=subcritical and superlinear and t_ok and weights_ok,
    )
