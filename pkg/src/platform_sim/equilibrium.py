"""
Market clearing and welfare accounting for the analytic model.

Clearing reduces to the linear condition ``A p + B q = C`` with quality pinned
at the consumer optimum, so the solution is closed form. Surplus measures use
the margin-times-quantity producer forms and the representative-consumer
``U(q*) - p*`` consumer form; the demand-integral consumer surplus is kept
alongside for diagnostics.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

from .model import (
    ModelParams,
    demand,
    human_cost,
    optimal_quality,
    supply_ai,
    supply_human,
    utility,
)


class WelfareCase(str, enum.Enum):
    INCREASING = "WelfareIncreasing"
    DECREASING = "WelfareDecreasing"
    AMBIGUOUS = "Ambiguous"


@dataclass(frozen=True)
class EquilibriumSolution:
    p_star: float
    q_star: float
    coeff_a: float
    coeff_b: float
    coeff_c: float
    feasible: bool

    def residual(self, params: ModelParams) -> float:
        """Signed clearing gap of the unclamped linear forms at the solution."""
        supply = (
            params.alpha_h + params.alpha_ai
            + (params.beta_h + params.beta_ai) * self.p_star
            + (params.phi_ai - params.phi_h) * self.q_star
        )
        dem = params.gamma - params.eta * self.p_star + params.kappa * self.q_star
        return supply - dem


@dataclass(frozen=True)
class WelfareReport:
    cs: float
    ps_human: float
    ps_ai: float
    welfare: float
    case_label: WelfareCase = WelfareCase.AMBIGUOUS

    @classmethod
    def build(cls, cs, ps_human, ps_ai, case_label=WelfareCase.AMBIGUOUS):
        # welfare is always the literal sum; never re-derived
        return cls(cs, ps_human, ps_ai, cs + ps_human + ps_ai, case_label)

    @property
    def ps(self) -> float:
        return self.ps_human + self.ps_ai


class WelfareDelta(NamedTuple):
    delta_cs: float
    delta_ps: float
    delta_w: float


def _solve(a: float, b: float, c: float, q_star: float) -> EquilibriumSolution:
    p_star = (c - b * q_star) / a
    return EquilibriumSolution(p_star, q_star, a, b, c, feasible=p_star >= 0)


def solve_equilibrium(params: ModelParams) -> EquilibriumSolution:
    a = (params.beta_h + params.beta_ai) + params.eta
    b = (-params.phi_h + params.phi_ai) - params.kappa
    c = params.gamma - (params.alpha_h + params.alpha_ai)
    return _solve(a, b, c, optimal_quality(params))


def pre_ai_equilibrium(params: ModelParams) -> EquilibriumSolution:
    """Equilibrium of the human-only market (all AI supply terms zeroed)."""
    return solve_equilibrium(params.without_ai())


def consumer_surplus_integral(eq: EquilibriumSolution, params: ModelParams) -> float:
    """Area under the demand line between ``p_star`` and ``p_max``.

    The integrand ``max(0, D(p, q*))`` is linear up to the demand zero
    crossing and zero beyond it, so the integral is a trapezoid.
    """
    lo, hi = eq.p_star, params.p_max
    if hi <= lo:
        raise ValueError(f"p_max ({hi}) must exceed p_star ({lo})")
    intercept = params.gamma + params.kappa * eq.q_star
    slope = params.eta
    p_zero = intercept / slope
    upper = min(hi, p_zero)
    if upper <= lo:
        return 0.0
    d_lo = intercept - slope * lo
    d_up = intercept - slope * upper
    return 0.5 * (d_lo + d_up) * (upper - lo)


def consumer_surplus_representative(eq: EquilibriumSolution, params: ModelParams) -> float:
    return utility(eq.q_star, params) - eq.p_star


def producer_surplus_human(eq: EquilibriumSolution, params: ModelParams) -> float:
    margin = eq.p_star - human_cost(eq.q_star, params)
    return margin * supply_human(eq.p_star, eq.q_star, params)


def producer_surplus_ai(eq: EquilibriumSolution, params: ModelParams) -> float:
    # AI marginal cost is treated as zero; c_ai only gates activation
    return eq.p_star * supply_ai(eq.p_star, eq.q_star, params)


def welfare_report(eq: EquilibriumSolution, params: ModelParams,
                   case_label: WelfareCase = WelfareCase.AMBIGUOUS) -> WelfareReport:
    return WelfareReport.build(
        consumer_surplus_representative(eq, params),
        producer_surplus_human(eq, params),
        producer_surplus_ai(eq, params),
        case_label,
    )


def welfare_delta(pre_ai: WelfareReport, post_ai: WelfareReport) -> WelfareDelta:
    d_cs = post_ai.cs - pre_ai.cs
    d_ps = post_ai.ps - pre_ai.ps
    return WelfareDelta(d_cs, d_ps, d_cs + d_ps)


def classify_welfare_case(params: ModelParams, quality_threshold: float,
                          overload_threshold: float) -> WelfareCase:
    """Label the welfare effect of AI entry from quality and overload.

    High equilibrium quality with low overload is welfare increasing, low
    quality with high overload is welfare decreasing, and every mixed
    configuration is ambiguous. Both thresholds are caller supplied.
    """
    if quality_threshold <= 0 or overload_threshold <= 0:
        raise ValueError("thresholds must be positive")
    q_star = optimal_quality(params)
    high_quality = q_star >= quality_threshold
    low_overload = params.delta_u <= overload_threshold
    if high_quality and low_overload:
        return WelfareCase.INCREASING
    if not high_quality and not low_overload:
        return WelfareCase.DECREASING
    return WelfareCase.AMBIGUOUS


@dataclass(frozen=True)
class Analysis:
    """Everything the ``analyze`` command reports."""

    post: EquilibriumSolution
    pre: EquilibriumSolution
    cs_integral: float
    pre_cs_integral: float
    post_report: WelfareReport
    pre_report: WelfareReport
    delta: WelfareDelta


def _cs_integral_or_zero(eq, params):
    if not eq.feasible or params.p_max <= eq.p_star:
        return 0.0
    return consumer_surplus_integral(eq, params)


def analyze(params: ModelParams, quality_threshold: float = 1.0,
            overload_threshold: float = 1.0) -> Analysis:
    post = solve_equilibrium(params)
    pre = pre_ai_equilibrium(params)
    label = classify_welfare_case(params, quality_threshold, overload_threshold)
    post_report = welfare_report(post, params, label)
    pre_report = welfare_report(pre, params.without_ai(), label)
    return Analysis(
        post=post,
        pre=pre,
        cs_integral=_cs_integral_or_zero(post, params),
        pre_cs_integral=_cs_integral_or_zero(pre, params),
        post_report=post_report,
        pre_report=pre_report,
        delta=welfare_delta(pre_report, post_report),
    )
