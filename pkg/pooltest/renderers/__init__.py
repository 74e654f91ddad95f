"""Renderers for command output."""
