"""Query DAG structure, rate propagation and synthetic DAG generation."""
