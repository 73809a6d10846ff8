"""Service configuration: defaults, key=value config file, environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from typing import Mapping, Optional

from .errors import ValidationError

DEFAULT_LISTEN = "127.0.0.1:8470"
DEFAULT_DATA_DIR = "./isms-data"

#: environment variable -> config field
ENV_OVERRIDES = {
    "ISMS_LISTEN": "listen_address",
    "ISMS_DATA_DIR": "data_directory",
    "ISMS_RPO_HOURS": "rpo_hours",
    "ISMS_RTO_HOURS": "rto_hours",
    "ISMS_CA_DAYS": "ca_deadline_days",
}

#: config-file key -> config field
FILE_KEYS = {
    "listen": "listen_address",
    "dataDir": "data_directory",
    "acceptGateAllowsMinor": "accept_gate_allows_minor",
    "containmentWarningDays": "containment_warning_days",
    "rpoHours": "rpo_hours",
    "rtoHours": "rto_hours",
    "caDeadlineDays": "ca_deadline_days",
}


@dataclass(frozen=True)
class ServiceConfig:
    listen_address: str = DEFAULT_LISTEN
    data_directory: str = DEFAULT_DATA_DIR
    accept_gate_allows_minor: bool = False
    containment_warning_days: int = 2
    rpo_hours: int = 48
    rto_hours: int = 48
    ca_deadline_days: int = 90

    def __post_init__(self) -> None:
        for name in (
            "containment_warning_days",
            "rpo_hours",
            "rto_hours",
            "ca_deadline_days",
        ):
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0:
                raise ValidationError(f"{name} must be a positive integer")

    @property
    def host(self) -> str:
        return self.listen_address.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen_address.rsplit(":", 1)[1])


def _parse_value(field_name: str, raw: str):
    target = {f.name: f.type for f in fields(ServiceConfig)}[field_name]
    raw = raw.strip()
    if target == "bool":
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ValidationError(f"{field_name} expects a boolean, got {raw!r}")
    if target == "int":
        try:
            return int(raw)
        except ValueError:
            raise ValidationError(f"{field_name} expects an integer, got {raw!r}")
    return raw


def load_config(
    path: Optional[str] = None, env: Optional[Mapping[str, str]] = None
) -> ServiceConfig:
    """Build configuration from defaults, then the file, then the environment.

    The file holds one key=value pair per line; blank lines and lines
    starting with # are skipped. Environment variables win over the file.
    """
    env = os.environ if env is None else env
    values: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ValidationError(f"cannot read config file {path}: {exc}")
        for line_no, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{line_no}: expected key=value")
            key, raw = line.split("=", 1)
            field_name = FILE_KEYS.get(key.strip())
            if field_name is None:
                raise ValidationError(f"{path}:{line_no}: unknown key {key.strip()!r}")
            values[field_name] = _parse_value(field_name, raw)
    for env_name, field_name in ENV_OVERRIDES.items():
        if env_name in env:
            values[field_name] = _parse_value(field_name, env[env_name])
    return ServiceConfig(**values)
