"""Numerical services for covrisk."""
