"""
Analytic primitives of the content-platform market.

Supply (human and AI), demand, consumer utility with an information-overload
penalty, optimal quality, the traffic function and the Pareto traffic density,
all evaluated against one validated parameter bundle.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional


class ParamError(ValueError):
    """Raised when a parameter bundle violates its constraints.

    ``key`` names the offending field so callers (the CLI in particular) can
    report it.
    """

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


# field -> (constraint label, predicate)
_CONSTRAINTS = {
    "alpha_h": (">= 0", lambda v: v >= 0),
    "beta_h": ("> 0", lambda v: v > 0),
    "phi_h": (">= 0", lambda v: v >= 0),
    "alpha_ai": (">= 0", lambda v: v >= 0),
    "beta_ai": (">= 0", lambda v: v >= 0),
    "phi_ai": (">= 0", lambda v: v >= 0),
    "c_ai": (">= 0", lambda v: v >= 0),
    "s_max": ("> 0", lambda v: v > 0),
    "gamma": ("> 0", lambda v: v > 0),
    "eta": ("> 0", lambda v: v > 0),
    "kappa": (">= 0", lambda v: v >= 0),
    "theta_u": ("> 0", lambda v: v > 0),
    "delta_u": ("> 0", lambda v: v > 0),
    "traffic_scale": ("> 0", lambda v: v > 0),
    "traffic_exponent": ("> 0", lambda v: v > 0),
    "pareto_alpha": ("> 0", lambda v: v > 0),
    "pareto_tmin": ("> 0", lambda v: v > 0),
    "p_max": ("> 0", lambda v: v > 0),
    "p_min": (">= 0", lambda v: v >= 0),
    "cost_fixed": (">= 0", lambda v: v >= 0),
    "cost_quad": (">= 0", lambda v: v >= 0),
}


@dataclass(frozen=True)
class ModelParams:
    """Every coefficient of the analytic model.

    Utility (``theta_u``, ``delta_u``) and traffic (``traffic_scale``,
    ``traffic_exponent``) live in separate fields even though the usual
    notation writes both with theta. ``s_max`` is the finite stand-in for
    unbounded AI supply; left as ``None`` it becomes ``10 * gamma``.
    """

    alpha_h: float = 2.0
    beta_h: float = 1.0
    phi_h: float = 0.5
    alpha_ai: float = 4.0
    beta_ai: float = 2.0
    phi_ai: float = 1.0
    c_ai: float = 0.05
    s_max: Optional[float] = None
    gamma: float = 20.0
    eta: float = 1.5
    kappa: float = 1.0
    theta_u: float = 4.0
    delta_u: float = 0.25
    traffic_scale: float = 1.0
    traffic_exponent: float = 1.5
    pareto_alpha: float = 1.5
    pareto_tmin: float = 1.0
    p_max: float = 20.0
    p_min: float = 0.0
    cost_fixed: float = 0.1
    cost_quad: float = 0.1

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "s_max" and value is None:
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParamError(f.name, f"expected a number, got {value!r}")
            if not math.isfinite(value):
                raise ParamError(f.name, "must be finite")
            label, ok = _CONSTRAINTS[f.name]
            if not ok(value):
                raise ParamError(f.name, f"must be {label}, got {value}")
        if self.s_max is None:
            object.__setattr__(self, "s_max", 10.0 * self.gamma)
        if not self.p_min < self.p_max:
            raise ParamError("p_min", f"must be < p_max ({self.p_max}), got {self.p_min}")
        ratio = self.theta_u / self.delta_u
        if not (math.isfinite(ratio) and ratio > 0):
            raise ParamError("delta_u", "theta_u/delta_u must be finite and positive")

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def without_ai(self) -> "ModelParams":
        """The same market with every AI supply term zeroed."""
        return replace(self, alpha_ai=0.0, beta_ai=0.0, phi_ai=0.0)

    def to_dict(self) -> dict:
        return asdict(self)


def supply_human(p: float, q: float, params: ModelParams) -> float:
    return max(0.0, params.alpha_h + params.beta_h * p - params.phi_h * q)


def supply_human_price_only(p: float, params: ModelParams) -> float:
    """Price-only human supply, ``alpha_h + beta_h * p``."""
    return params.alpha_h + params.beta_h * p


def supply_ai(p: float, q: float, params: ModelParams) -> float:
    """AI supply: nothing below the cost threshold, capped at ``s_max`` above it."""
    if p < params.c_ai:
        return 0.0
    return min(params.s_max, max(0.0, params.alpha_ai + params.beta_ai * p + params.phi_ai * q))


def total_supply(p: float, q: float, params: ModelParams) -> float:
    return supply_human(p, q, params) + supply_ai(p, q, params)


def demand(p: float, q: float, params: ModelParams) -> float:
    return max(0.0, params.gamma - params.eta * p + params.kappa * q)


def utility(q: float, params: ModelParams) -> float:
    if q <= 0:
        raise ValueError(f"utility is defined for q > 0, got {q}")
    return params.theta_u * math.log(q) - 0.5 * params.delta_u * q * q


def marginal_utility(q: float, params: ModelParams) -> float:
    if q <= 0:
        raise ValueError(f"marginal utility is defined for q > 0, got {q}")
    return params.theta_u / q - params.delta_u * q


def optimal_quality(params: ModelParams) -> float:
    """Quality at which marginal utility vanishes, ``sqrt(theta_u / delta_u)``."""
    return math.sqrt(params.theta_u / params.delta_u)


def traffic_share(q: float, params: ModelParams) -> float:
    if q < 0:
        raise ValueError(f"traffic is defined for q >= 0, got {q}")
    return params.traffic_scale * q ** params.traffic_exponent


def pareto_density(t: float, params: ModelParams) -> float:
    a, tmin = params.pareto_alpha, params.pareto_tmin
    if t < tmin:
        raise ValueError(f"Pareto density support starts at {tmin}, got {t}")
    return a * tmin ** a / t ** (a + 1)


def human_cost(q: float, params: ModelParams) -> float:
    # per-item production cost; convex so that quality is never free
    return params.cost_fixed + params.cost_quad * q * q
