"""HTTP microservice serving transformer encodings for record pairs and singles."""

from .config import ServiceConfig
from .model import MountedModel
from .app import create_app

__all__ = ["ServiceConfig", "MountedModel", "create_app"]
