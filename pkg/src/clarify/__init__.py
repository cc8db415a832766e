"""Clarification-question selection over partially specified tool calls."""

__version__ = "0.1.0"
