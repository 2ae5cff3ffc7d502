"""Degenerate Laplace transform and degenerate gamma function toolkit."""
