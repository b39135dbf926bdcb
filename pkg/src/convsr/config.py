"""Service configuration: key-value file with environment overrides.

The config file is plain ``key = value`` text; blank lines and ``#`` comments
are ignored.  Every key can be overridden by an environment variable named
``CONVSR_<KEY>`` (uppercased).  Unset optional paths stay empty strings; an
empty ``k`` means the selection cap is unbounded.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import DataFormatError

ENV_PREFIX = "CONVSR_"


@dataclass
class ServiceConfig:
    corpus_dir: str = ""
    splits: str = "train,val"
    embeddings: str = ""
    ui_dir: str = ""
    threshold: float = 0.75
    k: int | None = None
    reader: str = "lexical"        # "lexical" or "remote:<url>"
    generator: str = "heuristic"   # "heuristic" or "remote:<url>"
    rewriter: str = "oracle"       # "oracle" or "remote:<url>"
    generator_fallback: bool = False
    host: str = "127.0.0.1"
    port: int = 8080
    workers: int = 2
    snapshot_path: str = ""

    def split_list(self) -> list[str]:
        return [s.strip() for s in self.splits.split(",") if s.strip()]


def parse_config_file(path) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise DataFormatError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = stripped.partition("=")
            values[key.strip().lower()] = value.split("#", 1)[0].strip()
    return values


def _coerce(name: str, kind, raw: str):
    if kind == "int | None":
        return int(raw) if raw else None
    if kind is int or kind == "int":
        return int(raw)
    if kind is float or kind == "float":
        return float(raw)
    if kind is bool or kind == "bool":
        return raw.lower() in ("1", "true", "yes", "on")
    return raw


def load_service_config(path=None, env: dict | None = None) -> ServiceConfig:
    """Build a ServiceConfig from an optional file plus CONVSR_* overrides."""
    env = os.environ if env is None else env
    raw: dict[str, str] = {}
    if path:
        if not Path(path).exists():
            raise DataFormatError(f"config file not found: {path}")
        raw.update(parse_config_file(path))
    config = ServiceConfig()
    for f in fields(ServiceConfig):
        value = env.get(ENV_PREFIX + f.name.upper(), raw.get(f.name))
        if value is None:
            continue
        try:
            setattr(config, f.name, _coerce(f.name, f.type, value))
        except ValueError as exc:
            raise DataFormatError(f"bad config value for {f.name!r}: {value!r}") from exc
    return config
