"""Command-line entrypoints for placement experiments."""
