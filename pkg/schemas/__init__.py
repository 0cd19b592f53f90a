"""Data model definitions shared across the placement toolkit."""
