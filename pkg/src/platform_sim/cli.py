"""Command-line entry point: ``platform-sim {analyze,run,sweep,grid}``.

Exit codes: 0 success, 1 I/O failure, 2 invalid configuration, 3 a
simulation run failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .config import ConfigError, ConfigFile, load_config, parse_config
from .equilibrium import analyze
from .experiments import (
    GRID_COLUMNS,
    RUN_COLUMNS,
    SWEEP_COLUMNS,
    GridSpec,
    RunFailure,
    SweepSpec,
    emit_figure_panels,
    policy_grid,
    sensitivity_sweep,
    write_csv,
)
from .engine import run
from .metrics import ShockSummary, welfare_shock_summary
from .svgplot import emit_plot

EXIT_IO, EXIT_CONFIG, EXIT_RUN = 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load(args) -> ConfigFile:
    seed = getattr(args, "seed", None)
    if args.config is None:
        return parse_config({}, seed)
    try:
        return load_config(args.config, seed)
    except FileNotFoundError:
        raise CliError(EXIT_IO, f"config file not found: {args.config}")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read config {args.config}: {exc}")
    except ConfigError as exc:
        raise CliError(EXIT_CONFIG, f"invalid config: {exc}")


def _out_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot create output directory {out}: {exc}")
    return out


def _num(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


# ---------------------------------------------------------------- analyze

def analysis_report(cfg: ConfigFile, quality_threshold: float, overload_threshold: float) -> dict:
    a = analyze(cfg.model_params, quality_threshold, overload_threshold)

    def eq(e):
        return {"p_star": e.p_star, "q_star": e.q_star, "A": e.coeff_a, "B": e.coeff_b,
                "C": e.coeff_c, "feasible": e.feasible}

    def welfare(r, cs_integral):
        return {"cs": r.cs, "cs_integral": cs_integral, "ps_human": r.ps_human,
                "ps_ai": r.ps_ai, "welfare": r.welfare}

    return {
        "equilibrium": eq(a.post),
        "pre_ai_equilibrium": eq(a.pre),
        "welfare": welfare(a.post_report, a.cs_integral),
        "pre_ai_welfare": welfare(a.pre_report, a.pre_cs_integral),
        "delta": {"delta_cs": a.delta.delta_cs, "delta_ps": a.delta.delta_ps,
                  "delta_w": a.delta.delta_w},
        "welfare_case": a.post_report.case_label.value,
    }


def _print_report(rep: dict) -> None:
    e, pe = rep["equilibrium"], rep["pre_ai_equilibrium"]
    w, pw = rep["welfare"], rep["pre_ai_welfare"]
    print(f"{'':14s}{'with AI':>16s}{'without AI':>16s}")
    for key in ("p_star", "q_star", "A", "B", "C"):
        print(f"{key:14s}{e[key]:16.6g}{pe[key]:16.6g}")
    print(f"{'feasible':14s}{str(e['feasible']):>16s}{str(pe['feasible']):>16s}")
    for key in ("cs", "cs_integral", "ps_human", "ps_ai", "welfare"):
        print(f"{key:14s}{w[key]:16.6g}{pw[key]:16.6g}")
    d = rep["delta"]
    print(f"delta_cs={d['delta_cs']:.6g} delta_ps={d['delta_ps']:.6g} delta_w={d['delta_w']:.6g}")
    print(f"welfare case: {rep['welfare_case']}")


def cmd_analyze(args) -> int:
    cfg = _load(args)
    rep = analysis_report(cfg, args.quality_threshold, args.overload_threshold)
    if args.json:
        print(json.dumps(rep, indent=2, sort_keys=True, default=_num))
    else:
        _print_report(rep)
    if args.out:
        out = _out_dir(args.out)
        rows = []
        for section in ("equilibrium", "welfare"):
            post, pre = rep[section], rep[f"pre_ai_{section}"]
            for key in post:
                rows.append((key, post[key], pre[key]))
        _write(lambda: write_csv(rows, out / "analysis.csv", ["quantity", "with_ai", "without_ai"]))
    return 0


# ---------------------------------------------------------------- run/sweep/grid

def _write(fn):
    try:
        return fn()
    except OSError as exc:
        raise CliError(EXIT_IO, str(exc))


def _print_summary(summary: ShockSummary) -> None:
    print(f"{'column':24s}{'pre':>14s}{'post':>14s}{'delta':>14s}")
    for k, d in summary.deltas.items():
        print(f"{k:24s}{summary.pre_means[k]:14.6g}{summary.post_means[k]:14.6g}{d:14.6g}")


def cmd_run(args) -> int:
    cfg = _load(args)
    out = _out_dir(args.out)
    sim = cfg.sim_config
    try:
        state = run(sim)
    except Exception as exc:  # noqa: BLE001
        raise CliError(EXIT_RUN, f"run failed (seed={sim.seed}): {exc}")
    history = state.metrics_history
    window = min(50, sim.introduce_ai_step, sim.steps - sim.introduce_ai_step)
    try:
        summary = welfare_shock_summary(history, sim.introduce_ai_step, window)
    except ValueError:
        summary = None
    _write(lambda: write_csv(history, out / "history.csv"))
    if history:
        _write(lambda: emit_figure_panels(history, out, sim.introduce_ai_step))
    if summary is not None:
        _print_summary(summary)
    print(f"wrote {len(history)} rows to {out / 'history.csv'}")
    return 0


def _seed_list(args, seeds):
    return (args.seed,) if args.seed is not None else seeds


def _run_rows(runs):
    rows = []
    for r in runs:
        d = asdict(r)
        if isinstance(d["value"], tuple):
            d["value"] = "/".join(repr(float(x)) for x in d["value"])
        rows.append(d)
    return rows


def cmd_sweep(args) -> int:
    cfg = _load(args)
    if cfg.sweep is None:
        raise CliError(EXIT_CONFIG, "invalid config: sweep: section required for the sweep command")
    out = _out_dir(args.out)
    spec = cfg.sweep
    spec = SweepSpec(spec.parameter_name, spec.values, _seed_list(args, spec.seeds),
                     spec.base_config, spec.window)
    try:
        result = sensitivity_sweep(spec, parallel=args.parallel)
    except RunFailure as exc:
        raise CliError(EXIT_RUN, str(exc))
    _write(lambda: write_csv(result.aggregates, out / "sweep.csv", SWEEP_COLUMNS))
    _write(lambda: write_csv(_run_rows(result.runs), out / "sweep_runs.csv", RUN_COLUMNS))
    xs = [float(a["value"]) for a in result.aggregates]
    series = {k: list(zip(xs, [a[f"mean_{k}"] for a in result.aggregates])) for k in ("w", "cs", "ps")}
    _write(lambda: emit_plot({"W": series["w"], "CS": series["cs"], "PS": series["ps"]},
                             out / "sweep.svg", title=f"Sensitivity to {spec.parameter_name}",
                             x_label=spec.parameter_name, y_label="final-window mean"))
    for a in result.aggregates:
        print(f"{spec.parameter_name}={a['value']}: W={a['mean_w']:.6g} "
              f"CS={a['mean_cs']:.6g} PS={a['mean_ps']:.6g} (n={a['n_seeds']})")
    return 0


def cmd_grid(args) -> int:
    cfg = _load(args)
    if cfg.grid is None:
        raise CliError(EXIT_CONFIG, "invalid config: grid: section required for the grid command")
    out = _out_dir(args.out)
    g = cfg.grid
    spec = GridSpec(g.fees, g.biases, g.subsidies, _seed_list(args, g.seeds), g.base_config,
                    g.horizon_split)
    try:
        result = policy_grid(spec, parallel=args.parallel)
    except RunFailure as exc:
        raise CliError(EXIT_RUN, str(exc))
    _write(lambda: write_csv(result.rows, out / "grid.csv", GRID_COLUMNS))
    runs = [r for cell in spec.cells() for r in result.runs[cell]]
    _write(lambda: write_csv(_run_rows(runs), out / "grid_runs.csv", RUN_COLUMNS))
    for r in result.rows:
        print(f"#{r['rank']}: fee={r['fee']} bias={r['bias']} subsidy={r['subsidy']} "
              f"W={r['longterm_w']:.6g}")
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="platform-sim",
        description="Content-platform market model: analytic equilibrium and agent-based experiments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required):
        p.add_argument("--config", help="JSON config file (defaults used when omitted)")
        p.add_argument("--out", required=out_required, help="output directory")

    p = sub.add_parser("analyze", help="solve the analytic equilibrium and welfare")
    common(p, False)
    p.add_argument("--json", action="store_true", help="print a JSON report")
    p.add_argument("--quality-threshold", type=float, default=1.0)
    p.add_argument("--overload-threshold", type=float, default=1.0)
    p.set_defaults(func=cmd_analyze)

    for name, fn, helptext in (("run", cmd_run, "run one simulation"),
                               ("sweep", cmd_sweep, "one-parameter sensitivity sweep"),
                               ("grid", cmd_grid, "fee x bias x subsidy policy grid")):
        p = sub.add_parser(name, help=helptext)
        common(p, True)
        p.add_argument("--seed", type=int, help="override the RNG seed (sweep/grid: single seed)")
        if name != "run":
            p.add_argument("--parallel", type=int, default=None,
                           help="worker processes (default: $PLATFORM_SIM_THREADS or 1)")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", None) is not None and args.seed < 0:
        print("error: --seed must be nonnegative", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "analyze" and (args.quality_threshold <= 0 or args.overload_threshold <= 0):
        print("error: thresholds must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
