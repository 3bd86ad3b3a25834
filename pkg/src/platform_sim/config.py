"""
JSON configuration documents.

A document has up to five top-level entries, all optional::

    {
      "calibration":  "baseline" | "grid_headline",
      "model_params": {...ModelParams fields...},
      "sim_config":   {...SimConfig fields except model_params...},
      "sweep": {"parameter": "platform_fee", "values": [0.0, 0.2], "seeds": [0, 1]},
      "grid":  {"fees": [...], "biases": [...], "subsidies": [...], "seeds": [...],
                "horizon_split": 250}
    }

Omitted fields take the values of the named calibration (default
``baseline``, i.e. the dataclass defaults of :class:`ModelParams` and
:class:`SimConfig`); explicit fields override it. Unknown keys anywhere are
rejected, and the whole document is validated before anything runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional

from .calibration import CALIBRATIONS, DEFAULT_CALIBRATION, calibration_overrides
from .engine import SimConfig
from .experiments import SWEEP_PARAMETERS, GridSpec, SweepSpec
from .model import ModelParams, ParamError

SECTIONS = ("calibration", "model_params", "sim_config", "sweep", "grid")
_MODEL_KEYS = {f.name for f in fields(ModelParams)}
_SIM_KEYS = {f.name for f in fields(SimConfig)} - {"model_params"}
_SWEEP_KEYS = {"parameter", "values", "seeds", "window"}
_GRID_KEYS = {"fees", "biases", "subsidies", "seeds", "horizon_split"}

DEFAULT_SWEEP_SEEDS = list(range(10))


class ConfigError(ValueError):
    """Invalid configuration; ``key`` is the dotted path of the culprit."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ConfigFile:
    model_params: ModelParams
    sim_config: SimConfig
    sweep: Optional[SweepSpec] = None
    grid: Optional[GridSpec] = None


def _check_keys(section: str, data: Any, allowed) -> Dict[str, Any]:
    if not isinstance(data, dict):
        raise ConfigError(section, "must be a JSON object")
    for key in data:
        if key not in allowed:
            where = f"{section}.{key}" if section else key
            raise ConfigError(where, "unknown key")
    return data


def _list(section: str, key: str, value, required=True):
    if value is None and not required:
        return None
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{section}.{key}", "must be a nonempty list")
    return value


def _seeds(section: str, value):
    seeds = _list(section, "seeds", value if value is not None else DEFAULT_SWEEP_SEEDS)
    for s in seeds:
        if not isinstance(s, int) or isinstance(s, bool) or s < 0:
            raise ConfigError(f"{section}.seeds", f"seeds must be nonnegative integers, got {s!r}")
    return tuple(seeds)


def parse_config(doc: Dict[str, Any], seed_override: Optional[int] = None) -> ConfigFile:
    """Validate a parsed JSON document and build the typed configuration."""
    _check_keys("", doc, SECTIONS)
    name = doc.get("calibration", DEFAULT_CALIBRATION)
    if name not in CALIBRATIONS:
        raise ConfigError("calibration", f"must be one of {', '.join(CALIBRATIONS)}, got {name!r}")
    mp_doc, sim_doc = calibration_overrides(name)
    mp_doc.update(_check_keys("model_params", doc.get("model_params", {}), _MODEL_KEYS))
    sim_doc.update(_check_keys("sim_config", doc.get("sim_config", {}), _SIM_KEYS))
    if seed_override is not None:
        sim_doc["seed"] = seed_override
    try:
        mp = ModelParams(**mp_doc)
    except ParamError as exc:
        raise ConfigError(f"model_params.{exc.key}", str(exc).split(": ", 1)[1]) from exc
    try:
        sim = SimConfig(model_params=mp, **sim_doc)
    except ParamError as exc:
        raise ConfigError(f"sim_config.{exc.key}", str(exc).split(": ", 1)[1]) from exc

    sweep = None
    if "sweep" in doc:
        s = _check_keys("sweep", doc["sweep"], _SWEEP_KEYS)
        name = s.get("parameter")
        if name not in SWEEP_PARAMETERS:
            raise ConfigError("sweep.parameter", f"must be one of {', '.join(SWEEP_PARAMETERS)}")
        values = _list("sweep", "values", s.get("values"))
        seeds = _seeds("sweep", s.get("seeds"))
        window = s.get("window")
        if window is not None and (not isinstance(window, int) or window <= 0):
            raise ConfigError("sweep.window", "must be a positive integer")
        sweep = SweepSpec(name, tuple(values), seeds, sim, window)
        for v in values:
            try:
                sweep.config_for(v, seeds[0])
            except (ParamError, TypeError) as exc:
                raise ConfigError("sweep.values", f"value {v!r} rejected ({exc})") from exc

    grid = None
    if "grid" in doc:
        g = _check_keys("grid", doc["grid"], _GRID_KEYS)
        lists = {k: _list("grid", k, g.get(k)) for k in ("fees", "biases", "subsidies")}
        seeds = _seeds("grid", g.get("seeds"))
        split = g.get("horizon_split")
        if split is not None and (not isinstance(split, int) or not 0 <= split <= sim.steps):
            raise ConfigError("grid.horizon_split", f"must be an integer in [0, {sim.steps}]")
        grid = GridSpec(tuple(lists["fees"]), tuple(lists["biases"]), tuple(lists["subsidies"]),
                        seeds, sim, split)
        for f, b, sub in grid.cells():
            try:
                sim.replace(platform_fee=f, recommend_bias=b, subsidy=sub)
            except ParamError as exc:
                raise ConfigError(f"grid.{_GRID_FIELD[exc.key]}", str(exc).split(": ", 1)[1]) from exc

    return ConfigFile(mp, sim, sweep, grid)


_GRID_FIELD = {"platform_fee": "fees", "recommend_bias": "biases", "subsidy": "subsidies"}


def load_config(path, seed_override: Optional[int] = None) -> ConfigFile:
    """Read and validate a JSON config file.

    Raises ``OSError`` when the file cannot be read and :class:`ConfigError`
    when it does not parse or validate.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<document>", f"invalid JSON: {exc}") from exc
    return parse_config(doc, seed_override)


def default_document() -> Dict[str, Any]:
    """The built-in defaults as a config document."""
    mp = ModelParams().to_dict()
    sim = {f.name: getattr(SimConfig(), f.name) for f in fields(SimConfig) if f.name != "model_params"}
    return {"model_params": mp, "sim_config": sim}
