"""Directive-aware online HTN planning with grid-world experiment domains."""

__version__ = "0.1.0"
