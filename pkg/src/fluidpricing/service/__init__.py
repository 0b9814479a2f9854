"""HTTP service layer (FastAPI app and pydantic schemas)."""

from .app import app

__all__ = ["app"]
