"""Pipeline configuration: JSON document, published schema, validation."""
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from .errors import ConfigError
from .forecast import ForecastConfig

_DATE = {"type": "string", "pattern": r"^\d{4}-\d{2}-\d{2}$"}
_WINDOW = {"type": "array", "items": _DATE, "minItems": 2, "maxItems": 2}
_MONTHS = {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 12},
           "minItems": 1, "uniqueItems": True}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "eofcast pipeline configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["data", "train_window"],
    "properties": {
        "data": {"type": "string", "description": "tidy CSV file or persisted field directory"},
        "variable_name": {"type": "string"},
        "cluster_window": {"oneOf": [_WINDOW, {"type": "null"}]},
        "cluster_months": {"oneOf": [_MONTHS, {"type": "null"}]},
        "k": {"type": "integer", "minimum": 1},
        "samples": {"oneOf": [{"type": "null"}, {
            "type": "array", "minItems": 1,
            "items": {"type": "array", "items": {"type": "number"},
                      "minItems": 2, "maxItems": 2}}]},
        "dtw_band": {"oneOf": [{"type": "integer", "minimum": 0}, {"type": "null"}]},
        "normalize": {"type": "boolean"},
        "train_window": _WINDOW,
        "horizon": {"type": "integer", "minimum": 1},
        "threshold": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "coherence_months": {"oneOf": [_MONTHS, {"type": "null"}]},
        "wet_threshold": {"type": "number", "exclusiveMinimum": 0},
        "forecast": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "levels": {"type": "integer", "minimum": 1},
                "filter": {"enum": ["haar"]},
                "lag": {"type": "integer", "minimum": 1},
                "hidden_units": {"type": "integer", "minimum": 1},
                "epochs": {"type": "integer", "minimum": 1},
                "learning_rate": {"type": "number", "exclusiveMinimum": 0},
                "batch_size": {"type": "integer", "minimum": 1},
            },
        },
        "jobs": {"type": "integer", "minimum": 1},
        "out": {"type": "string"},
        "seed": {"type": "integer"},
    },
}


@dataclass(frozen=True)
class PipelineConfig:
    data: str
    train_window: tuple
    variable_name: str = "precipitation"
    cluster_window: Optional[tuple] = None
    cluster_months: Optional[tuple] = (5, 6, 7, 8)
    k: int = 7
    samples: Optional[tuple] = None
    dtw_band: Optional[int] = None
    normalize: bool = False
    horizon: int = 365
    threshold: float = 0.8
    coherence_months: Optional[tuple] = (5, 6, 7, 8)
    wet_threshold: float = 1.0
    forecast: dict = field(default_factory=dict)
    jobs: int = 1
    out: str = "eofcast_out"
    seed: int = 0

    def forecast_config(self):
        return ForecastConfig(seed=self.seed, horizon=self.horizon, **self.forecast)

    def to_json(self):
        d = asdict(self)
        for key in ("train_window", "cluster_window", "cluster_months",
                    "coherence_months", "samples"):
            if d[key] is not None:
                d[key] = [list(x) if isinstance(x, tuple) else x for x in d[key]]
        return d


def _tuple(x):
    if x is None:
        return None
    return tuple(_tuple(v) if isinstance(v, list) else v for v in x)


def validate(doc):
    """Check ``doc`` against :data:`SCHEMA` plus cross-field rules."""
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None
    for key in ("train_window", "cluster_window"):
        w = doc.get(key)
        if w is not None:
            try:
                start, end = (np.datetime64(x, "D") for x in w)
            except ValueError:
                raise ConfigError(f"{key}: invalid date in {w}") from None
            if start > end:
                raise ConfigError(f"{key}: start {w[0]} is after end {w[1]}")


def make_config(doc):
    validate(doc)
    known = {k: (_tuple(v) if isinstance(v, list) else v) for k, v in doc.items()}
    return PipelineConfig(**known)


def load_config(path=None, overrides=None):
    """Read a JSON config file and apply ``overrides`` (non-None values win)."""
    doc = {}
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file {path} not found") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: top level must be an object")
    for key, value in (overrides or {}).items():
        if value is not None:
            doc[key] = value
    return make_config(doc)


def write_schema(path):
    Path(path).write_text(json.dumps(SCHEMA, indent=2) + "\n")
