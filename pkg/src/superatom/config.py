"""Config ingestion: defaults, JSON-schema validation, dotted-path overrides.

A config file may specify any subset of the keys; the shipped defaults fill
the rest (deep merge).  Overrides use dotted paths (``physics.delta1_mhz``)
and are checked against the published schema before any computation runs.
"""

from __future__ import annotations

import copy
import hashlib
import json
from importlib import resources

import jsonschema

from .errors import ConfigError

_DATA = resources.files("superatom") / "data"


def load_schema() -> dict:
    return json.loads((_DATA / "config.schema.json").read_text())


def load_defaults() -> dict:
    return json.loads((_DATA / "defaults.json").read_text())


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def validate_config(config: dict) -> None:
    schema = load_schema()
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = ".".join(str(p) for p in err.absolute_path)
        where = path or "<root>"
        raise ConfigError(f"invalid config at {where}: {err.message}", key=where)


def merged_config(user_config: dict | None = None) -> dict:
    """Defaults deep-merged with ``user_config`` and validated."""
    config = load_defaults()
    if user_config:
        if not isinstance(user_config, dict):
            raise ConfigError("config must be a JSON object")
        config = _deep_merge(config, user_config)
    validate_config(config)
    return config


def _schema_has_path(schema: dict, parts: list[str]) -> bool:
    node = schema
    for part in parts:
        props = node.get("properties")
        if not isinstance(props, dict) or part not in props:
            return False
        node = props[part]
    return True


def parse_override_value(text: str):
    """Interpret an override value: JSON when possible, raw string otherwise."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(config: dict, overrides: dict[str, object]) -> dict:
    """Set dotted-path overrides, rejecting unknown keys before computing."""
    schema = load_schema()
    out = copy.deepcopy(config)
    for dotted in sorted(overrides):
        parts = dotted.split(".")
        if not _schema_has_path(schema, parts):
            raise ConfigError(f"unknown config key: {dotted}", key=dotted)
        node = out
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = overrides[dotted]
    validate_config(out)
    return out


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    """Stable short fingerprint of a config document."""
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()[:16]
