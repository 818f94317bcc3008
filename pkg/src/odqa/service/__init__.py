"""REST service exposing the question-answering engine."""

from .app import create_app

__all__ = ["create_app"]
