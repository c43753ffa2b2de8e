"""Lebesgue-exponent bootstrap for solutions of the coupled system.

Rewriting the system as L u = a(x) v^r and L v = b(x) u^m with the powers
split into a coefficient part and a linear-ish part, each inversion of L
trades integrability of the right-hand side for a strictly better
exponent on the left.  The module implements that arithmetic: the ranges
the coefficient functions a, b live in, one inversion round, and the
iterated chain that either certifies boundedness or gives up after a
step budget.  Everything here is exact reciprocal bookkeeping on floats;
no quadrature and no fields are involved except in the norm diagnostic.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .basis import evaluate_field
from .errors import BasisMismatch, InvalidChain, RuleMismatch, WeightNotIntegrable
from .exponents import ExponentPair, ProblemParams

LINFINITY = "Linfinity"
MAX_STEPS = "MaxSteps"

# the coefficient ranges are open at the top; the chain walks just inside
RANGE_SHRINK = 0.99


def _inv(x):
    return 0.0 if math.isinf(x) else 1.0 / x


def _sup_from_denominator(numerator, denominator):
    # a nonpositive denominator means the range is unbounded above
    if denominator <= 0.0:
        return math.inf
    return numerator / denominator


@dataclass(frozen=True)
class StepRecord:
    """Exponents produced by one inversion round, all as plain floats."""

    gamma: float
    tau: float
    theta: float
    eta: float
    delta: float

    def to_dict(self):
        return {
            "gamma": self.gamma, "tau": self.tau, "theta": self.theta,
            "eta": self.eta, "delta": self.delta,
        }

    def csv_cells(self):
        return [repr(float(v)) for v in
                (self.gamma, self.tau, self.theta, self.eta, self.delta)]


@dataclass(frozen=True)
class ChainInputs:
    N: int
    s: float
    p: float
    q: float
    alpha: float
    beta: float
    t: float
    gamma0: float
    c: float
    d: float

    def to_dict(self):
        return {
            "N": self.N, "s": self.s, "p": self.p, "q": self.q,
            "alpha": self.alpha, "beta": self.beta, "t": self.t,
            "gamma0": self.gamma0, "c": self.c, "d": self.d,
        }


@dataclass(frozen=True)
class BootstrapChain:
    """Recorded bootstrap run: inputs, the improvement steps, the verdict."""

    inputs: ChainInputs
    steps: tuple
    terminal: str

    def __post_init__(self):
        if self.terminal not in (LINFINITY, MAX_STEPS):
            raise ValueError(f"unknown terminal {self.terminal!r}")
        previous = None
        for step in self.steps:
            if step.tau >= step.gamma:
                raise InvalidChain(
                    f"step must lose integrability on the product side, "
                    f"tau = {step.tau} vs gamma = {step.gamma}"
                )
            if step.delta <= step.gamma:
                raise InvalidChain(
                    f"step must improve, delta = {step.delta} "
                    f"vs gamma = {step.gamma}"
                )
            if min(step.gamma, step.tau, step.theta, step.eta, step.delta) <= 0:
                raise InvalidChain("chain exponents must stay positive")
            if previous is not None and step.gamma <= previous.gamma:
                raise InvalidChain("gamma sequence must increase strictly")
            previous = step

    def to_dict(self):
        return {
            "inputs": self.inputs.to_dict(),
            "steps": [s.to_dict() for s in self.steps],
            "terminal": self.terminal,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv_lines(self):
        lines = ["step,gamma,tau,theta,eta,delta"]
        for k, step in enumerate(self.steps):
            lines.append(",".join([str(k)] + step.csv_cells()))
        return lines


def coefficient_exponent_ranges(params: ProblemParams, pair: ExponentPair, t: float):
    """Open-range suprema for the coefficient functions of the split system.

    The split puts a(x) = v^{p-1}/|x|^alpha (or v^{p/2}/|x|^alpha when
    p < 1) next to u's equation and b(x) = u^{q-1}/|x|^beta (or the
    half-power form) next to v's; their integrability comes from the
    embedding exponents of the t-splitting via the Hoelder inequality.
    Returns (c_sup, d_sup, branch) where branch names the form used on
    each side and a nonpositive denominator is reported as an unbounded
    range (math.inf).
    """
    params.validate()
    pair.validate()
    if not 0.0 < t < 2.0 * params.s:
        raise ValueError(f"need 0 < t < 2s, got t = {t}")
    N, s, alpha, beta = params.N, params.s, params.alpha, params.beta
    p, q = pair.p, pair.q
    smooth_u = N - 2.0 * t
    smooth_v = N - (4.0 * s - 2.0 * t)
    if p >= 1.0:
        c_sup = _sup_from_denominator(2.0 * N, (p - 1.0) * smooth_v + 2.0 * alpha)
        c_form = "p-1"
    else:
        c_sup = _sup_from_denominator(4.0 * N, p * smooth_v + 4.0 * alpha)
        c_form = "p/2"
    if q >= 1.0:
        d_sup = _sup_from_denominator(2.0 * N, (q - 1.0) * smooth_u + 2.0 * beta)
        d_form = "q-1"
    else:
        d_sup = _sup_from_denominator(4.0 * N, q * smooth_u + 4.0 * beta)
        d_form = "q/2"
    return c_sup, d_sup, (c_form, d_form)


def chain_step(gamma, d, c, p, N, s):
    """One inversion round: multiply, smooth, multiply, smooth.

    Walks w in L^gamma through b-multiplication (tau), the half-power of
    the first inversion (theta), a-multiplication (eta) and the second
    inversion (delta).  Returns the LINFINITY marker as soon as the eta
    exponent clears N/2s, the threshold where the inverse operator maps
    into bounded functions; d and c may be math.inf for coefficientless
    splits.
    """
    if gamma <= 1.0:
        raise ValueError(f"need gamma > 1, got {gamma}")
    if d <= 1.0 or c <= 1.0:
        raise ValueError("coefficient exponents must exceed 1")
    if not (p > 0.0 and 0.0 < s < 1.0 and N >= 1):
        raise ValueError("powers and orders out of range")
    gain = 2.0 * s / N
    inv_tau = _inv(d) + 1.0 / gamma
    inv_theta = 0.5 * p * (inv_tau - gain)
    if inv_theta <= 0.0:
        raise InvalidChain(
            f"first inversion already clears the product exponent "
            f"(1/tau = {inv_tau} <= 2s/N = {gain}); no half-power step exists"
        )
    inv_eta = _inv(c) + inv_theta
    if inv_eta <= gain:
        return LINFINITY
    inv_delta = inv_eta - gain
    return StepRecord(
        gamma=gamma,
        tau=1.0 / inv_tau,
        theta=1.0 / inv_theta,
        eta=1.0 / inv_eta,
        delta=1.0 / inv_delta,
    )


def _embedding_exponent(N, smoothness):
    # L^{2N/(N-2r)} from the order-r space; all finite exponents once 2r >= N
    if N <= smoothness:
        return math.inf
    return 2.0 * N / (N - smoothness)


def run_chain(
    start_gamma,
    params: ProblemParams,
    pair: ExponentPair,
    t: float,
    max_steps: int = 20,
) -> BootstrapChain:
    """Iterate chain_step, re-widening the coefficient ranges every round.

    Each completed round raises u's exponent to delta and v's to p*theta/2,
    which in turn widens the ranges of both coefficient functions; the
    widened ranges are what make the iteration escape to LINFINITY instead
    of stalling at the fixed point of any single pair (c, d).  Ranges are
    entered at RANGE_SHRINK times their supremum since the ranges are open.
    """
    if start_gamma <= 1.0:
        raise ValueError(f"need start_gamma > 1, got {start_gamma}")
    if max_steps < 0:
        raise ValueError("max_steps must be nonnegative")
    c_sup0, d_sup0, _ = coefficient_exponent_ranges(params, pair, t)
    c0, d0 = RANGE_SHRINK * c_sup0, RANGE_SHRINK * d_sup0
    if c0 <= 1.0 or d0 <= 1.0:
        raise InvalidChain(
            f"coefficient ranges degenerate (c <= {c0}, d <= {d0}); "
            "the splitting has nothing to bootstrap from"
        )
    N, s, alpha, beta = params.N, params.s, params.alpha, params.beta
    p, q = pair.p, pair.q
    gain = 2.0 * s / N
    inputs = ChainInputs(
        N=N, s=s, p=p, q=q, alpha=alpha, beta=beta, t=t,
        gamma0=float(start_gamma), c=c0, d=d0,
    )
    # the solution already lives in the embedding spaces of the t-splitting
    gamma_u = max(float(start_gamma), _embedding_exponent(N, 2.0 * t))
    gamma_v = _embedding_exponent(N, 4.0 * s - 2.0 * t)

    def current_d():
        expo = (q - 1.0) if q >= 1.0 else 0.5 * q
        return RANGE_SHRINK * _sup_from_denominator(
            1.0, expo * _inv(gamma_u) + beta / N
        )

    def current_c():
        expo = (p - 1.0) if p >= 1.0 else 0.5 * p
        return RANGE_SHRINK * _sup_from_denominator(
            1.0, expo * _inv(gamma_v) + alpha / N
        )

    steps = []
    terminal = MAX_STEPS
    for _ in range(max_steps):
        d_now, c_now = current_d(), current_c()
        inv_tau = _inv(d_now) + _inv(gamma_u)
        if inv_tau <= gain:
            # the product side clears the threshold outright, so v is
            # bounded and only the a-coefficient limits u
            c_limit = math.inf if alpha == 0.0 else RANGE_SHRINK * N / alpha
            inv_eta = _inv(c_limit)
            if inv_eta <= gain:
                terminal = LINFINITY
                break
            delta = 1.0 / (inv_eta - gain)
            if delta <= gamma_u:
                # the a-weight caps u's exponent below what it already has
                break
            steps.append(StepRecord(
                gamma=gamma_u,
                tau=1.0 / inv_tau,
                theta=math.inf,
                eta=c_limit,
                delta=delta,
            ))
            gamma_v = math.inf
            gamma_u = delta
            continue
        record = chain_step(gamma_u, d_now, c_now, p, N, s)
        if record == LINFINITY:
            terminal = LINFINITY
            break
        if record.delta <= gamma_u:
            break
        steps.append(record)
        gamma_v = max(gamma_v, 0.5 * p * record.theta)
        gamma_u = record.delta
    return BootstrapChain(inputs=inputs, steps=tuple(steps), terminal=terminal)


@dataclass(frozen=True)
class HolderReport:
    """Whether each weight is mild enough for continuity to kick in."""

    u_side: bool
    v_side: bool
    params: ProblemParams
    pair: ExponentPair

    @property
    def eligible(self):
        return self.u_side and self.v_side

    def to_dict(self):
        return {
            "u_side": self.u_side,
            "v_side": self.v_side,
            "eligible": self.eligible,
        }


def holder_trigger(params: ProblemParams, pair: ExponentPair) -> HolderReport:
    """Continuity trigger once both components are bounded.

    With u bounded, u^q/|x|^beta reaches the L^{N/2s} class exactly when
    beta < 2s, which upgrades v to a Hoelder class; the v-side weight
    alpha plays the same role for u.  The thresholds do not involve the
    powers, which only enter through boundedness.
    """
    params.validate()
    pair.validate()
    return HolderReport(
        u_side=params.beta < 2.0 * params.s,
        v_side=params.alpha < 2.0 * params.s,
        params=params,
        pair=pair,
    )


def weighted_norm_diagnostic(field, delta, gamma_weight, rule):
    """(integral of |field|^delta |x|^{-gamma_weight})^{1/delta} on the rule.

    Direct check that a computed solution has the weighted integrability
    the chain promises; delta may be large, so values are raised in
    one vectorized power after the weight is applied.
    """
    if delta < 1.0:
        raise ValueError(f"need delta >= 1, got {delta}")
    if gamma_weight < 0.0:
        raise ValueError("gamma_weight must be nonnegative")
    N = rule.domain.dim
    if gamma_weight >= N:
        raise WeightNotIntegrable(
            f"weight power {gamma_weight} >= dimension {N} is not integrable"
        )
    if gamma_weight > rule.gamma + 1e-12:
        raise RuleMismatch(
            f"rule graded for {rule.gamma}, needs {gamma_weight}"
        )
    if field.basis.domain != rule.domain:
        raise BasisMismatch("field and rule live on different domains")
    values = np.abs(evaluate_field(field, rule.nodes))
    weights = rule.weights
    if gamma_weight > 0.0:
        weights = weights * rule.radii ** (-gamma_weight)
    return float((weights @ values**delta) ** (1.0 / delta))
