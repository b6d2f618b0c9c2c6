"""HTTP service wrapping the package, plus the request/response models
and handler functions the command-line interface shares with it."""

from .app import create_app

__all__ = ["create_app"]
