"""Placement solvers: brute force, genetic algorithm and baselines."""
