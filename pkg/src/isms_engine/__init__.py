"""ISMS governance engine: risk assessment, treatment, corrective actions,
backup and media governance, with an audited versioned store behind an HTTP
service and a CLI."""

from .config import ServiceConfig, load_config
from .engine import Engine

__version__ = "0.1.0"

__all__ = ["Engine", "ServiceConfig", "load_config", "__version__"]
