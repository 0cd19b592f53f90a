"""Placement evaluation: makespan, constraint checks and quality metrics."""
