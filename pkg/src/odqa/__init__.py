"""Open-domain extractive question answering over web-search snippets."""

__version__ = "0.1.0"
