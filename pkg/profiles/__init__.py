"""Benchmark distributions and the quartile sampling rule."""
