"""HTTP service wrapping the identification library."""

from .app import app, create_app

__all__ = ["app", "create_app"]
