"""Validated continuation of periodic solutions of Wright's delay equation."""

__version__ = "0.1.0"
