"""INI configuration with environment-variable overrides.

Precedence, lowest to highest: built-in defaults, config file, OSU_* env
vars.  CLI flags sit above all of these and are applied by the commands
themselves.  The documented key set:

    [segmenter]
    backend = box-fill | http | file
    endpoint = http://host:port          (http backend)
    timeout = 10
    exchange_dir = /path/to/exchange     (file backend)

    [service]
    host = 127.0.0.1
    port = 8008
    bundles = ./bundles
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass
from typing import Optional

from .errors import ParseError, ValidationError
from .segmenter import BoxFillBackend, FileBackend, HttpBackend

BACKEND_KINDS = ("box-fill", "http", "file")


@dataclass(frozen=True)
class ToolkitConfig:
    segmenter_backend: str = "box-fill"
    segmenter_endpoint: Optional[str] = None
    segmenter_timeout: float = 10.0
    segmenter_exchange_dir: Optional[str] = None
    service_host: str = "127.0.0.1"
    service_port: int = 8008
    service_bundles: str = "bundles"
    # True when a segmenter was named explicitly (file or env), as opposed
    # to silently defaulting to box-fill.
    segmenter_configured: bool = False

    def __post_init__(self):
        if self.segmenter_backend not in BACKEND_KINDS:
            raise ValidationError(
                f"segmenter.backend must be one of {BACKEND_KINDS}, "
                f"got {self.segmenter_backend!r}"
            )
        if self.segmenter_backend == "http" and not self.segmenter_endpoint:
            raise ValidationError("http backend needs segmenter.endpoint")
        if self.segmenter_backend == "file" and not self.segmenter_exchange_dir:
            raise ValidationError("file backend needs segmenter.exchange_dir")
        if self.segmenter_timeout <= 0:
            raise ValidationError("segmenter.timeout must be positive")
        if not 1 <= self.service_port <= 65535:
            raise ValidationError(f"service.port out of range: {self.service_port}")


def load_config(path: Optional[str] = None, env=None) -> ToolkitConfig:
    """Read the config file (if any) and fold in OSU_* overrides."""
    env = os.environ if env is None else env
    if path is None:
        path = env.get("OSU_CONFIG")
    cp = configparser.ConfigParser()
    if path is not None:
        read = cp.read(path)
        if not read:
            raise ParseError(f"config file not readable: {path}")

    def pick(section: str, key: str, env_name: str, default):
        if env_name in env:
            return env[env_name]
        try:
            return cp.get(section, key)
        except (configparser.NoSectionError, configparser.NoOptionError):
            return default

    backend = pick("segmenter", "backend", "OSU_SEGMENTER_BACKEND", None)
    configured = backend is not None
    raw_timeout = pick("segmenter", "timeout", "OSU_SEGMENTER_TIMEOUT", "10")
    raw_port = pick("service", "port", "OSU_SERVICE_PORT", "8008")
    try:
        timeout = float(raw_timeout)
        port = int(raw_port)
    except ValueError as exc:
        raise ParseError(f"bad numeric config value: {exc}") from exc
    return ToolkitConfig(
        segmenter_backend=backend or "box-fill",
        segmenter_endpoint=pick("segmenter", "endpoint", "OSU_SEGMENTER_ENDPOINT", None),
        segmenter_timeout=timeout,
        segmenter_exchange_dir=pick(
            "segmenter", "exchange_dir", "OSU_SEGMENTER_EXCHANGE_DIR", None
        ),
        service_host=pick("service", "host", "OSU_SERVICE_HOST", "127.0.0.1"),
        service_port=port,
        service_bundles=pick("service", "bundles", "OSU_SERVICE_BUNDLES", "bundles"),
        segmenter_configured=configured,
    )


def make_backend(config: ToolkitConfig):
    """Instantiate the backend the config names."""
    if config.segmenter_backend == "http":
        return HttpBackend(config.segmenter_endpoint, timeout=config.segmenter_timeout)
    if config.segmenter_backend == "file":
        return FileBackend(
            config.segmenter_exchange_dir, timeout=config.segmenter_timeout
        )
    return BoxFillBackend()
