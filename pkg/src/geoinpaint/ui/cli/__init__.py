"""
Command-line interface for geoinpaint.
"""

from geoinpaint.ui.cli.main import cli, main

__all__ = ["cli", "main"]
