"""Upward and downward run chains on discrete posets."""

__version__ = "0.1.0"
