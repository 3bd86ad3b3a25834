"""Per-tick observables of a simulation run and summaries over them."""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields
from typing import Dict, List, Sequence

import numpy as np


@dataclass(frozen=True)
class MetricsRow:
    tick: int
    total_content: int
    avg_quality: float
    avg_price: float
    avg_consumer_utility: float
    n_human_active: int
    n_ai_active: int
    total_revenue: float
    gini: float
    consumer_surplus: float
    producer_surplus: float
    social_welfare: float

    @classmethod
    def columns(cls) -> List[str]:
        return [f.name for f in fields(cls)]

    def values(self) -> tuple:
        return astuple(self)


METRIC_COLUMNS = MetricsRow.columns()
# integer-valued columns; everything else parses as float
INT_COLUMNS = ("tick", "total_content", "n_human_active", "n_ai_active")


def gini(incomes: Sequence[float]) -> float:
    """Population Gini coefficient of nonnegative incomes.

    Uses the sorted rank form ``sum((2i - n - 1) x_i) / (n sum(x))`` with
    1-based ``i``. An all-zero population is perfectly equal (0).
    """
    x = np.asarray(incomes, dtype=float)
    if x.size == 0:
        raise ValueError("gini of an empty population is undefined")
    if np.any(x < 0):
        raise ValueError("gini requires nonnegative incomes")
    total = x.sum()
    if total == 0:
        return 0.0
    x = np.sort(x)
    n = x.size
    ranks = np.arange(1, n + 1)
    g = float(np.dot(2 * ranks - n - 1, x) / (n * total))
    return min(max(g, 0.0), 1.0)


def record_tick(state) -> MetricsRow:
    """Materialize the current tick of ``state`` (after settlement) as a row."""
    acc = state.last_accounts
    creators = state.creators
    n_human = sum(1 for c in creators if c.active and c.is_human)
    n_ai = sum(1 for c in creators if c.active and not c.is_human)
    if state.gini_mode == "per_tick":
        incomes = list(acc.creator_gross.values())
    else:
        incomes = [c.cumulative_revenue for c in creators if c.ever_active]
    g = gini(incomes) if incomes else 0.0
    cs = float(state.consumer_surplus)
    ps = float(state.producer_surplus)
    return MetricsRow(
        tick=int(state.tick),
        total_content=int(state.total_content),
        avg_quality=float(acc.avg_quality),
        avg_price=float(acc.avg_price),
        avg_consumer_utility=float(acc.avg_utility),
        n_human_active=n_human,
        n_ai_active=n_ai,
        total_revenue=float(acc.gross),
        gini=g,
        consumer_surplus=cs,
        producer_surplus=ps,
        social_welfare=cs + ps,
    )


@dataclass(frozen=True)
class ShockSummary:
    pre_means: Dict[str, float]
    post_means: Dict[str, float]
    deltas: Dict[str, float]


_SUMMARY_COLUMNS = [c for c in METRIC_COLUMNS if c != "tick"]


def column(history: Sequence[MetricsRow], name: str) -> np.ndarray:
    return np.array([getattr(r, name) for r in history], dtype=float)


def window_means(history: Sequence[MetricsRow], start: int, stop: int) -> Dict[str, float]:
    """Column means over rows with ``start <= tick < stop``."""
    rows = [r for r in history if start <= r.tick < stop]
    if not rows:
        raise ValueError(f"no rows in tick window [{start}, {stop})")
    return {name: float(np.mean(column(rows, name))) for name in _SUMMARY_COLUMNS}


def welfare_shock_summary(history: Sequence[MetricsRow], introduce_ai_step: int,
                          window: int) -> ShockSummary:
    """Mean of every column just before and just after AI entry, and the change."""
    if window <= 0:
        raise ValueError("window must be positive")
    lo, hi = introduce_ai_step - window, introduce_ai_step + window
    ticks = {r.tick for r in history}
    if lo < 0 or not all(t in ticks for t in range(lo, hi)):
        raise ValueError(
            f"history does not cover ticks [{lo}, {hi}) around AI entry at {introduce_ai_step}"
        )
    pre = window_means(history, lo, introduce_ai_step)
    post = window_means(history, introduce_ai_step, hi)
    deltas = {k: post[k] - pre[k] for k in pre}
    return ShockSummary(pre, post, deltas)
