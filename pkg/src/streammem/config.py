"""Config file loading: YAML mapping onto the simulator dataclasses.

The document is nested to mirror the config types: top-level simulator
keys, an ``engine`` section with ``window`` and ``anchors`` subsections,
and a ``schedule`` section.  Every key is optional (defaults apply), but
unknown keys are an error naming the offending dotted path, so typos never
silently fall back to defaults.
"""

from __future__ import annotations

from typing import Any, Mapping, Optional

import yaml

from .anchors import AnchorConfig
from .engine import EngineConfig
from .errors import ConfigurationError
from .simulate import DEFAULT_SCHEDULE, SimConfig
from .window import PromptSchedule, WindowConfig

_SIM_KEYS = ("seed", "drift_sigma", "signature_separation", "engine", "schedule")
_ENGINE_KEYS = (
    "layers", "heads", "value_dim", "frames_per_block", "sink_frames",
    "window", "anchors", "bridge_lambda", "bridge_schedule", "eps_stabilized",
    "tokens_per_frame", "bridge_prune_tol",
)
_WINDOW_KEYS = ("w_min", "w_max", "tau_post", "tau_pre", "phase_unit")
_ANCHOR_KEYS = ("alpha", "recent_frames", "max_anchors", "injection_scale")
_SCHEDULE_KEYS = ("boundaries", "total_frames")


def _require_mapping(value: Any, path: str) -> Mapping:
    if value is None:
        return {}
    if not isinstance(value, Mapping):
        raise ConfigurationError(f"{path} must be a mapping", field=path)
    return value


def _check_keys(section: Mapping, allowed: tuple[str, ...], prefix: str) -> None:
    for key in section:
        if key not in allowed:
            dotted = f"{prefix}.{key}" if prefix else str(key)
            raise ConfigurationError(f"unknown config key: {dotted}", field=dotted)


def _get_int(section: Mapping, key: str, default: int, prefix: str) -> int:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        dotted = f"{prefix}.{key}" if prefix else key
        raise ConfigurationError(f"{dotted} must be an integer", field=dotted)
    return value


def _get_num(section: Mapping, key: str, default: float, prefix: str) -> float:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        dotted = f"{prefix}.{key}" if prefix else key
        raise ConfigurationError(f"{dotted} must be a number", field=dotted)
    return float(value)


def _get_str(section: Mapping, key: str, default: str, prefix: str) -> str:
    value = section.get(key, default)
    if not isinstance(value, str):
        dotted = f"{prefix}.{key}" if prefix else key
        raise ConfigurationError(f"{dotted} must be a string", field=dotted)
    return value


def parse_sim_config(doc: Optional[Mapping]) -> SimConfig:
    """Build a SimConfig from a parsed mapping; None means all defaults."""
    doc = _require_mapping(doc, "config")
    _check_keys(doc, _SIM_KEYS, "")

    engine_doc = _require_mapping(doc.get("engine"), "engine")
    _check_keys(engine_doc, _ENGINE_KEYS, "engine")
    window_doc = _require_mapping(engine_doc.get("window"), "engine.window")
    _check_keys(window_doc, _WINDOW_KEYS, "engine.window")
    anchors_doc = _require_mapping(engine_doc.get("anchors"), "engine.anchors")
    _check_keys(anchors_doc, _ANCHOR_KEYS, "engine.anchors")
    schedule_doc = _require_mapping(doc.get("schedule"), "schedule")
    _check_keys(schedule_doc, _SCHEDULE_KEYS, "schedule")

    window = WindowConfig(
        w_min=_get_int(window_doc, "w_min", 7, "engine.window"),
        w_max=_get_int(window_doc, "w_max", 12, "engine.window"),
        tau_post=_get_num(window_doc, "tau_post", 18.0, "engine.window"),
        tau_pre=_get_num(window_doc, "tau_pre", 9.0, "engine.window"),
        phase_unit=_get_str(window_doc, "phase_unit", "frames", "engine.window"),
    )
    anchors = AnchorConfig(
        alpha=_get_num(anchors_doc, "alpha", 0.35, "engine.anchors"),
        recent_frames=_get_int(anchors_doc, "recent_frames", 6, "engine.anchors"),
        max_anchors=_get_int(anchors_doc, "max_anchors", 4, "engine.anchors"),
        injection_scale=_get_num(anchors_doc, "injection_scale", 0.8, "engine.anchors"),
    )
    engine = EngineConfig(
        layers=_get_int(engine_doc, "layers", 2, "engine"),
        heads=_get_int(engine_doc, "heads", 4, "engine"),
        value_dim=_get_int(engine_doc, "value_dim", 16, "engine"),
        frames_per_block=_get_int(engine_doc, "frames_per_block", 3, "engine"),
        sink_frames=_get_int(engine_doc, "sink_frames", 3, "engine"),
        window=window,
        anchors=anchors,
        bridge_lambda=_get_num(engine_doc, "bridge_lambda", 0.85, "engine"),
        bridge_schedule=_get_str(engine_doc, "bridge_schedule", "decayed", "engine"),
        eps_stabilized=_get_num(engine_doc, "eps_stabilized", 1e-6, "engine"),
        tokens_per_frame=_get_int(engine_doc, "tokens_per_frame", 1, "engine"),
        bridge_prune_tol=_get_num(engine_doc, "bridge_prune_tol", 1e-3, "engine"),
    )

    if "boundaries" in schedule_doc:
        raw = schedule_doc["boundaries"]
        if not isinstance(raw, (list, tuple)) or any(
            isinstance(b, bool) or not isinstance(b, int) for b in raw
        ):
            raise ConfigurationError(
                "schedule.boundaries must be a list of integers",
                field="schedule.boundaries",
            )
        boundaries = tuple(raw)
    else:
        boundaries = DEFAULT_SCHEDULE.boundaries
    schedule = PromptSchedule(
        boundaries=boundaries,
        total_frames=_get_int(
            schedule_doc, "total_frames", DEFAULT_SCHEDULE.total_frames, "schedule"
        ),
    )

    return SimConfig(
        seed=_get_int(doc, "seed", 0, ""),
        engine=engine,
        schedule=schedule,
        drift_sigma=_get_num(doc, "drift_sigma", 0.05, ""),
        signature_separation=_get_num(doc, "signature_separation", 1.0, ""),
    )


def load_sim_config(path: Optional[str]) -> SimConfig:
    """Load a YAML config file; None for the built-in defaults."""
    if path is None:
        return parse_sim_config(None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}", field="config")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file: {exc}", field="config")
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"invalid YAML in {path}: {exc}", field="config")
    return parse_sim_config(doc)
