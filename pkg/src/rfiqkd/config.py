"""Run configuration: flat key-value files with per-variant overrides.

A config file is plain text, one ``dotted.key = value`` per line, with
``#`` comments and blank lines ignored.  Top-level keys set shared
defaults; ``variant.<name>.<key>`` overrides one key for one named curve.
A file with no variant keys defines a single curve named ``default``.

    mode = asymptotic
    distances = 0:180:5
    source.delta_pm1 = 0.7853981633974483
    variant.ideal.source.delta_pm1 = 0

Distances accept either a comma list (``0, 25, 50``) or an inclusive
``start:stop:step`` range.  See presets/SCHEMA.txt for the key table.
"""

from __future__ import annotations

import importlib.resources
import math
from dataclasses import dataclass, fields

from .channel import ChannelParams
from .rate import ProtocolParams
from .source import SourceSpec

_SOURCE_KEYS = {f.name for f in fields(SourceSpec)}
_CHANNEL_KEYS = {f.name for f in fields(ChannelParams)}
_PROTOCOL_KEYS = {f.name for f in fields(ProtocolParams)}
_RUN_KEYS = {"mode", "optimize_mu", "distances"}

_DEFAULT_DISTANCES = (0.0, 25.0, 50.0, 75.0, 100.0)


class ConfigError(ValueError):
    """Malformed configuration input, with the offending line when known."""


@dataclass(frozen=True)
class VariantConfig:
    name: str
    source: SourceSpec
    channel: ChannelParams
    protocol: ProtocolParams
    mode: str
    optimize_mu: bool
    distances: tuple[float, ...]


@dataclass(frozen=True)
class RunConfig:
    variants: tuple[VariantConfig, ...]


def parse_config(text: str, origin: str = "<config>") -> dict[str, str]:
    """Flat key -> raw value map; duplicate keys are rejected."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', "
                              f"got {raw.strip()!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"{origin}:{lineno}: empty key")
        if not value:
            raise ConfigError(f"{origin}:{lineno}: empty value for {key!r}")
        if key in entries:
            raise ConfigError(f"{origin}:{lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def _parse_float(key: str, value: str) -> float:
    try:
        out = float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    if not math.isfinite(out):
        raise ConfigError(f"{key}: value must be finite, got {value!r}")
    return out


def _parse_bool(key: str, value: str) -> bool:
    low = value.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {value!r}")


def parse_distances(value: str, key: str = "distances") -> tuple[float, ...]:
    """Comma list or inclusive start:stop:step range, in km."""
    if ":" in value:
        parts = value.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key}: range must be start:stop:step, "
                              f"got {value!r}")
        start, stop, step = (_parse_float(key, p) for p in parts)
        if step <= 0.0:
            raise ConfigError(f"{key}: range step must be positive")
        if stop < start:
            raise ConfigError(f"{key}: range stop must be >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        out = tuple(start + i * step for i in range(count))
    else:
        out = tuple(_parse_float(key, p) for p in value.split(",") if p.strip())
    if not out:
        raise ConfigError(f"{key}: no distances given")
    if any(d < 0.0 for d in out):
        raise ConfigError(f"{key}: distances must be >= 0")
    return out


def _split_variant_key(key: str) -> tuple[str | None, str]:
    if key.startswith("variant."):
        rest = key[len("variant."):]
        name, _, subkey = rest.partition(".")
        if not name or not subkey:
            raise ConfigError(f"{key}: variant keys look like "
                              "variant.<name>.<key>")
        return name, subkey
    return None, key


def _check_key(key: str) -> None:
    if key in _RUN_KEYS:
        return
    group, _, field = key.partition(".")
    known = {"source": _SOURCE_KEYS, "channel": _CHANNEL_KEYS,
             "protocol": _PROTOCOL_KEYS}.get(group)
    if known is None or field not in known:
        raise ConfigError(f"unknown key {key!r}")


def _build_variant(name: str, flat: dict[str, str]) -> VariantConfig:
    source_kw: dict[str, object] = {}
    channel_kw: dict[str, object] = {"distance_km": 0.0}
    protocol_kw: dict[str, object] = {}
    mode = "asymptotic"
    optimize_mu = True
    distances = _DEFAULT_DISTANCES

    for key, value in flat.items():
        if key == "mode":
            if value not in ("asymptotic", "finite"):
                raise ConfigError(f"mode: must be asymptotic or finite, "
                                  f"got {value!r}")
            mode = value
        elif key == "optimize_mu":
            optimize_mu = _parse_bool(key, value)
        elif key == "distances":
            distances = parse_distances(value)
        else:
            group, _, field = key.partition(".")
            if group == "source":
                if field == "theta_mode":
                    source_kw[field] = value
                else:
                    source_kw[field] = _parse_float(key, value)
            elif group == "channel":
                channel_kw[field] = _parse_float(key, value)
            elif group == "protocol":
                protocol_kw[field] = _parse_float(key, value)

    try:
        return VariantConfig(name=name,
                             source=SourceSpec(**source_kw),
                             channel=ChannelParams(**channel_kw),
                             protocol=ProtocolParams(**protocol_kw),
                             mode=mode, optimize_mu=optimize_mu,
                             distances=distances)
    except ValueError as exc:
        raise ConfigError(f"variant {name!r}: {exc}") from exc


def build_run_config(entries: dict[str, str]) -> RunConfig:
    """Resolve shared defaults plus variant overrides into curve configs."""
    base: dict[str, str] = {}
    overrides: dict[str, dict[str, str]] = {}
    for key, value in entries.items():
        variant, subkey = _split_variant_key(key)
        _check_key(subkey)
        if variant is None:
            base[subkey] = value
        else:
            overrides.setdefault(variant, {})[subkey] = value

    if not overrides:
        return RunConfig(variants=(_build_variant("default", base),))
    variants = []
    for name, extra in overrides.items():
        merged = dict(base)
        merged.update(extra)
        variants.append(_build_variant(name, merged))
    return RunConfig(variants=tuple(variants))


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    return build_run_config(parse_config(text, origin=path))


def preset_names() -> tuple[str, ...]:
    root = importlib.resources.files("rfiqkd") / "presets"
    names = sorted(p.name[:-len(".cfg")] for p in root.iterdir()
                   if p.name.endswith(".cfg"))
    return tuple(names)


def load_preset(name: str) -> RunConfig:
    """Bundled configuration by short name (see preset_names)."""
    root = importlib.resources.files("rfiqkd") / "presets"
    resource = root / f"{name}.cfg"
    if not resource.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: "
                          + ", ".join(preset_names()))
    text = resource.read_text(encoding="utf-8")
    return build_run_config(parse_config(text, origin=f"preset:{name}"))
