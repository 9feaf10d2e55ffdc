"""Flat key-value experiment configuration.

Config files are plain text, one ``key = value`` per line, with ``#``
comments and dotted section paths (``basis.n = 256``).  Values stay
strings until a typed getter pulls them out; getters validate and raise
:class:`ConfigError` carrying the offending field path, which the CLI
maps to exit code 2.  The canonical text (sorted keys) and its SHA-256
hash prefix every output artifact.
"""

from __future__ import annotations

import hashlib

__all__ = [
    "ConfigError",
    "parse_config_text",
    "canonical_text",
    "config_hash",
    "get_str",
    "get_choice",
    "get_int",
    "get_float",
    "get_floats",
    "get_bool",
]


class ConfigError(ValueError):
    """Invalid or missing configuration value."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


def parse_config_text(text):
    """Parse ``key = value`` lines into a string-to-string dict."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}", "empty key")
        out[key] = value.strip()
    return out


def canonical_text(cfg):
    return "\n".join(f"{k} = {cfg[k]}" for k in sorted(cfg)) + "\n"


def config_hash(cfg):
    return hashlib.sha256(canonical_text(cfg).encode()).hexdigest()


def _raw(cfg, field, default):
    if field in cfg:
        return cfg[field]
    if default is None:
        raise ConfigError(field, "required key is missing")
    return default


def get_str(cfg, field, default=None):
    value = _raw(cfg, field, default)
    return str(value)


def get_choice(cfg, field, choices, default=None):
    value = get_str(cfg, field, default)
    if value not in choices:
        raise ConfigError(field, f"expected one of {sorted(choices)}, got {value!r}")
    return value


def get_int(cfg, field, default=None, minimum=None, maximum=None):
    raw = _raw(cfg, field, default)
    try:
        value = int(str(raw))
    except ValueError:
        raise ConfigError(field, f"expected an integer, got {raw!r}") from None
    if minimum is not None and value < minimum:
        raise ConfigError(field, f"must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ConfigError(field, f"must be <= {maximum}, got {value}")
    return value


def get_float(
    cfg, field, default=None, minimum=None, maximum=None, exclusive_min=None
):
    raw = _raw(cfg, field, default)
    try:
        value = float(str(raw))
    except ValueError:
        raise ConfigError(field, f"expected a number, got {raw!r}") from None
    if minimum is not None and value < minimum:
        raise ConfigError(field, f"must be >= {minimum}, got {value}")
    if exclusive_min is not None and value <= exclusive_min:
        raise ConfigError(field, f"must be > {exclusive_min}, got {value}")
    if maximum is not None and value > maximum:
        raise ConfigError(field, f"must be <= {maximum}, got {value}")
    return value


def get_floats(cfg, field, default=None):
    raw = _raw(cfg, field, default)
    parts = [p for p in str(raw).replace(",", " ").split() if p]
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ConfigError(field, f"expected a list of numbers, got {raw!r}") from None


def get_bool(cfg, field, default=None):
    raw = str(_raw(cfg, field, default)).lower()
    if raw in ("1", "true", "yes", "on"):
        return True
    if raw in ("0", "false", "no", "off"):
        return False
    raise ConfigError(field, f"expected a boolean, got {raw!r}")
