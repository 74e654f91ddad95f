"""Numeric and formatting helpers."""
