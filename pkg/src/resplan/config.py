"""Flat JSON configuration for the planner: one object, one level deep, unknown keys rejected."""
import dataclasses
import json
from pathlib import Path

from .errors import ConfigError
from .hybrid_astar import HeuristicWeights, SearchLimits
from .kinematics import VehicleParams
from .pipeline import GoalAlignmentConfig, PlannerConfig
from .smoother import SmoothingWeights

# nested config section -> dataclass; the remaining keys are PlannerConfig scalars
SECTIONS = {
    "vehicle": VehicleParams,
    "heuristic": HeuristicWeights,
    "limits": SearchLimits,
    "smoothing": SmoothingWeights,
    "alignment": GoalAlignmentConfig,
}


def _scalar_fields():
    return [f.name for f in dataclasses.fields(PlannerConfig) if f.name not in SECTIONS]


def config_keys():
    """Every accepted key, in file order."""
    keys = []
    for cls in SECTIONS.values():
        keys.extend(f.name for f in dataclasses.fields(cls))
    keys.extend(_scalar_fields())
    return keys


def config_to_dict(cfg: PlannerConfig = PlannerConfig()) -> dict:
    out = {}
    for name in SECTIONS:
        out.update(dataclasses.asdict(getattr(cfg, name)))
    for name in _scalar_fields():
        out[name] = getattr(cfg, name)
    return out


def _coerce(value, default, key):
    # bool before int: bool is an int subclass
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}")
        return value
    raise ConfigError(f"{key}: unsupported value {value!r}")


def config_from_dict(data: dict) -> PlannerConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    defaults = config_to_dict()
    unknown = sorted(set(data) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
    merged = {k: _coerce(data[k], defaults[k], k) if k in data else defaults[k] for k in defaults}
    try:
        parts = {name: cls(**{f.name: merged[f.name] for f in dataclasses.fields(cls)})
                 for name, cls in SECTIONS.items()}
        return PlannerConfig(**parts, **{k: merged[k] for k in _scalar_fields()})
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> PlannerConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data)


def dump_config(cfg: PlannerConfig = PlannerConfig()) -> str:
    return json.dumps(config_to_dict(cfg), indent=2) + "\n"
