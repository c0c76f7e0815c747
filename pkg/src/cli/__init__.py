"""cmtra CLI - command-line interface for the classification pipeline."""

from src.cli.main import app

__all__ = ["app"]
