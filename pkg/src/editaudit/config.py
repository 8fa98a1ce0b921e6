"""Service configuration, loaded from a TOML file.

Documented keys (all optional unless noted):

  dataset_path            path to the built dataset file (required to serve)
  annotations_path        path to annotations.ndjson (required to serve);
                          auditors.ndjson lives beside it
  threshold               damaging-score classification threshold, default 0.5
  revert_window_seconds   revert observation window, default 31,536,000 (365 d)
  revert_radius           identity-revert search radius, default 15
  listen_addr             host:port to bind, default 127.0.0.1:8400
  upstream_wiki_api_url   wiki action API base URL; unset means offline mode
  alpha_default           default CI significance level, default 0.05
  diff_fixtures_dir       directory of pre-built diff JSON files
  diff_cache_dir          directory for cached upstream diffs
  static_dir              directory of built web UI assets served at /
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .ingest.reverts import DEFAULT_RADIUS, DEFAULT_WINDOW


class ConfigError(ValueError):
    pass


@dataclass
class ServiceConfig:
    dataset_path: str | None = None
    annotations_path: str | None = None
    threshold: float = 0.5
    revert_window_seconds: int = DEFAULT_WINDOW
    revert_radius: int = DEFAULT_RADIUS
    listen_addr: str = "127.0.0.1:8400"
    upstream_wiki_api_url: str | None = None
    alpha_default: float = 0.05
    diff_fixtures_dir: str | None = None
    diff_cache_dir: str | None = None
    static_dir: str | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError(f"threshold out of (0,1): {self.threshold}")
        if not 0.0 < self.alpha_default < 1.0:
            raise ConfigError(f"alpha_default out of (0,1): {self.alpha_default}")
        if self.revert_window_seconds < 0 or self.revert_radius < 0:
            raise ConfigError("revert window/radius must be non-negative")

    def host_and_port(self) -> tuple[str, int]:
        host, _, port = self.listen_addr.rpartition(":")
        if not host or not port.isdigit():
            raise ConfigError(f"listen_addr must be host:port, got {self.listen_addr!r}")
        return host, int(port)


def load_config(path: str | Path) -> ServiceConfig:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    known = {f.name for f in fields(ServiceConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "threshold" in data:
        data["threshold"] = float(data["threshold"])
    if "alpha_default" in data:
        data["alpha_default"] = float(data["alpha_default"])
    return ServiceConfig(**data)
