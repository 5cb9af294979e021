"""FastAPI service wrapping the encoding pipeline."""
from .app import app, create_app

__all__ = ["app", "create_app"]
