"""
Experiment drivers: the AI-entry baseline, one-parameter sensitivity sweeps
and the fee x bias x subsidy policy grid, plus their CSV and SVG outputs.

Every cell of a sweep or grid is an independent run keyed by its index, so
results are identical whether cells run sequentially or in a process pool.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .engine import SimConfig, run
from .metrics import (
    INT_COLUMNS,
    METRIC_COLUMNS,
    MetricsRow,
    ShockSummary,
    column,
    welfare_shock_summary,
)
from .svgplot import emit_plot

SWEEP_PARAMETERS = (
    "platform_fee",
    "recommend_bias",
    "n_ai_creators",
    "subsidy",
    "introduce_ai_step",
    "price_sensitivity",
    "overload_threshold",
)
_INT_PARAMETERS = ("n_ai_creators", "introduce_ai_step")

SWEEP_COLUMNS = ["parameter", "value", "mean_w", "mean_cs", "mean_ps", "n_seeds"]
GRID_COLUMNS = ["fee", "bias", "subsidy", "longterm_w", "longterm_cs", "longterm_ps", "rank"]
RUN_COLUMNS = [
    "value", "seed", "window_w", "window_cs", "window_ps", "early_w", "early_cs",
    "early_ps", "final_w", "final_cs", "final_ps", "longterm_w", "longterm_cs",
    "longterm_ps", "fees_collected", "subsidies_paid", "ledger_balance",
]


class RunFailure(RuntimeError):
    """A single sweep or grid cell failed; carries the cell coordinates."""

    def __init__(self, value, seed, cause):
        super().__init__(f"run failed at value={value!r}, seed={seed}: {cause}")
        self.value = value
        self.seed = seed


def default_window(steps: int) -> int:
    return max(1, steps // 10)


# ----------------------------------------------------------------- specs

@dataclass(frozen=True)
class SweepSpec:
    parameter_name: str
    values: Tuple
    seeds: Tuple[int, ...]
    base_config: SimConfig = field(default_factory=SimConfig)
    window: Optional[int] = None

    def __post_init__(self):
        if self.parameter_name not in SWEEP_PARAMETERS:
            raise ValueError(
                f"parameter_name must be one of {', '.join(SWEEP_PARAMETERS)}; "
                f"got {self.parameter_name!r}"
            )
        if not self.values:
            raise ValueError("values must be nonempty")
        if not self.seeds:
            raise ValueError("seeds must be nonempty")
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "seeds", tuple(self.seeds))

    def config_for(self, value, seed: int) -> SimConfig:
        if self.parameter_name in _INT_PARAMETERS:
            value = int(value)
        return self.base_config.replace(**{self.parameter_name: value, "seed": seed})


@dataclass(frozen=True)
class GridSpec:
    fees: Tuple[float, ...]
    biases: Tuple[float, ...]
    subsidies: Tuple[float, ...]
    seeds: Tuple[int, ...]
    base_config: SimConfig = field(default_factory=SimConfig)
    horizon_split: Optional[int] = None

    def __post_init__(self):
        for name in ("fees", "biases", "subsidies", "seeds"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be nonempty")
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.horizon_split is None:
            object.__setattr__(self, "horizon_split", self.base_config.steps // 2)

    def cells(self) -> List[Tuple[float, float, float]]:
        return [(f, b, s) for f in self.fees for b in self.biases for s in self.subsidies]


# ----------------------------------------------------------------- runs

@dataclass(frozen=True)
class RunSummary:
    """Welfare aggregates of one run.

    ``window_*`` are final-window means, ``early_*`` means over the first half
    of that window, ``final_*`` the cumulative values at the last tick and
    ``longterm_*`` means over ticks at or after the horizon split.
    """

    value: object
    seed: int
    window_w: float
    window_cs: float
    window_ps: float
    early_w: float
    early_cs: float
    early_ps: float
    final_w: float
    final_cs: float
    final_ps: float
    longterm_w: float
    longterm_cs: float
    longterm_ps: float
    fees_collected: float
    subsidies_paid: float
    ledger_balance: float


def _means(history, names, lo, hi):
    rows = [r for r in history if lo <= r.tick < hi]
    if not rows:
        return [math.nan] * len(names)
    return [float(np.mean(column(rows, n))) for n in names]


_WELFARE = ("social_welfare", "consumer_surplus", "producer_surplus")


def summarize_run(state, value, window: int, horizon_split: int) -> RunSummary:
    history = state.metrics_history
    if not history:
        raise ValueError("run produced no history")
    end = history[-1].tick + 1
    w_lo = max(0, end - window)
    win = _means(history, _WELFARE, w_lo, end)
    early = _means(history, _WELFARE, w_lo, w_lo + max(1, (end - w_lo) // 2))
    long = _means(history, _WELFARE, horizon_split, end)
    last = history[-1]
    ledger = state.ledger
    return RunSummary(
        value, state.seed, *win, *early,
        last.social_welfare, last.consumer_surplus, last.producer_surplus,
        *long, ledger.fees_collected, ledger.subsidies_paid, ledger.balance,
    )


def _run_cell(args):
    config, value, window, horizon_split = args
    try:
        state = run(config)
        return summarize_run(state, value, window, horizon_split)
    except Exception as exc:  # noqa: BLE001 - re-raised with cell context
        return RunFailure(value, config.seed, exc)


def resolve_parallel(parallel: Optional[int] = None) -> int:
    if parallel is None:
        env = os.environ.get("PLATFORM_SIM_THREADS")
        parallel = int(env) if env else 1
    return max(1, int(parallel))


def _execute(jobs: Sequence[tuple], parallel: Optional[int]) -> List[RunSummary]:
    workers = resolve_parallel(parallel)
    if workers == 1 or len(jobs) <= 1:
        results = [_run_cell(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, jobs))
    for r in results:
        if isinstance(r, RunFailure):
            raise r
    return results


@dataclass
class BaselineResult:
    history: List[MetricsRow]
    summary: ShockSummary
    state: object


def run_baseline(config: SimConfig, window: Optional[int] = None) -> BaselineResult:
    """Run one simulation and summarize the welfare shock around AI entry.

    The summary window defaults to 50 ticks, shrunk to fit the run.
    """
    state = run(config)
    history = state.metrics_history
    if window is None:
        window = min(50, config.introduce_ai_step, config.steps - config.introduce_ai_step)
    summary = welfare_shock_summary(history, config.introduce_ai_step, window)
    return BaselineResult(history, summary, state)


# ----------------------------------------------------------------- sweeps

@dataclass
class SweepResult:
    parameter: str
    runs: List[RunSummary]
    aggregates: List[dict]

    def aggregate_for(self, value) -> dict:
        for row in self.aggregates:
            if row["value"] == value:
                return row
        raise KeyError(value)


def _aggregate(runs: List[RunSummary], prefix: str) -> Tuple[float, float, float]:
    return tuple(float(np.mean([getattr(r, f"{prefix}_{k}") for r in runs]))
                 for k in ("w", "cs", "ps"))


def sensitivity_sweep(spec: SweepSpec, parallel: Optional[int] = None) -> SweepResult:
    """One run per (value, seed); aggregates are means over seeds of the
    final-window welfare means. Ordering is value-major, seed-minor."""
    base = spec.base_config
    window = spec.window or default_window(base.steps)
    jobs = []
    for value in spec.values:
        for seed in spec.seeds:
            try:
                cfg = spec.config_for(value, seed)
            except ValueError as exc:
                raise RunFailure(value, seed, exc) from exc
            jobs.append((cfg, value, window, cfg.steps // 2))
    runs = _execute(jobs, parallel)
    n = len(spec.seeds)
    aggregates = []
    for i, value in enumerate(spec.values):
        cell = runs[i * n:(i + 1) * n]
        w, cs, ps = _aggregate(cell, "window")
        aggregates.append({"parameter": spec.parameter_name, "value": value,
                           "mean_w": w, "mean_cs": cs, "mean_ps": ps, "n_seeds": n})
    return SweepResult(spec.parameter_name, runs, aggregates)


@dataclass
class GridResult:
    rows: List[dict]
    runs: Dict[Tuple[float, float, float], List[RunSummary]]

    def top(self) -> Tuple[float, float, float]:
        r = self.rows[0]
        return r["fee"], r["bias"], r["subsidy"]


def policy_grid(spec: GridSpec, parallel: Optional[int] = None) -> GridResult:
    """Rank every (fee, bias, subsidy) cell by long-term mean welfare."""
    base = spec.base_config
    window = default_window(base.steps)
    jobs = []
    for fee, bias, sub in spec.cells():
        for seed in spec.seeds:
            try:
                cfg = base.replace(platform_fee=fee, recommend_bias=bias, subsidy=sub, seed=seed)
            except ValueError as exc:
                raise RunFailure((fee, bias, sub), seed, exc) from exc
            jobs.append((cfg, (fee, bias, sub), window, spec.horizon_split))
    runs = _execute(jobs, parallel)
    n = len(spec.seeds)
    by_cell = {}
    rows = []
    for i, cell in enumerate(spec.cells()):
        cell_runs = runs[i * n:(i + 1) * n]
        by_cell[cell] = cell_runs
        w, cs, ps = _aggregate(cell_runs, "longterm")
        rows.append({"fee": cell[0], "bias": cell[1], "subsidy": cell[2],
                     "longterm_w": w, "longterm_cs": cs, "longterm_ps": ps})
    rows.sort(key=lambda r: (-r["longterm_w"], r["fee"], r["bias"], r["subsidy"]))
    for rank, r in enumerate(rows, start=1):
        r["rank"] = rank
    return GridResult(rows, by_cell)


# ----------------------------------------------------------------- CSV

def _cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        # repr is the shortest string that round-trips
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def _as_sequence(row, columns):
    if is_dataclass(row):
        d = asdict(row)
        return [d[c] for c in columns]
    if isinstance(row, dict):
        return [row[c] for c in columns]
    return list(row)


def write_csv(rows: Iterable, path, columns: Optional[Sequence[str]] = None) -> Path:
    """Write ``rows`` (dataclasses, dicts or tuples) under a header line.

    Without ``columns`` the header is the MetricsRow schema.
    """
    path = Path(path)
    columns = list(columns or METRIC_COLUMNS)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(v) for v in _as_sequence(row, columns)])
    except OSError as exc:
        raise OSError(f"cannot write CSV {path}: {exc}") from exc
    return path


def read_csv(path) -> Tuple[List[str], List[List[str]]]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader]


def read_history(path) -> List[MetricsRow]:
    header, rows = read_csv(path)
    if header != METRIC_COLUMNS:
        raise ValueError(f"{path}: not a history CSV (header {header})")
    out = []
    for row in rows:
        vals = {c: (int(v) if c in INT_COLUMNS else float(v)) for c, v in zip(header, row)}
        out.append(MetricsRow(**vals))
    return out


# ----------------------------------------------------------------- plots

FIGURE_PANELS = [
    ("total_content", "Total content", {"total content": "total_content"}, None),
    ("avg_quality", "Average content quality", {"avg quality": "avg_quality"}, None),
    ("avg_price", "Average content price", {"avg price": "avg_price"}, None),
    ("avg_consumer_utility", "Average consumer utility",
     {"avg utility": "avg_consumer_utility"}, None),
    ("creators", "Active creators", {"human": "n_human_active", "AI": "n_ai_active"}, None),
    ("revenue_gini", "Total revenue and Gini coefficient",
     {"revenue": "total_revenue"}, {"gini": "gini"}),
    ("welfare", "Consumer surplus, producer surplus and welfare",
     {"CS": "consumer_surplus", "PS": "producer_surplus", "W": "social_welfare"}, None),
]


def emit_figure_panels(history: Sequence[MetricsRow], out_dir, introduce_ai_step: int) -> List[Path]:
    """Write one SVG per panel of the standard seven-panel run figure."""
    out_dir = Path(out_dir)
    ticks = [r.tick for r in history]
    paths = []
    for name, title, left, right in FIGURE_PANELS:
        series = {label: list(zip(ticks, column(history, col))) for label, col in left.items()}
        secondary = None
        if right:
            secondary = {label: list(zip(ticks, column(history, col))) for label, col in right.items()}
        paths.append(emit_plot(
            series, out_dir / f"{name}.svg", title=title, y_label=title,
            marker_x=introduce_ai_step, secondary=secondary,
            secondary_label="gini" if right else "",
        ))
    return paths
