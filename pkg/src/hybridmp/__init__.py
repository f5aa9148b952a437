"""Misinformation prevention by hybrid forward/reverse sampling."""

__version__ = "0.1.0"
