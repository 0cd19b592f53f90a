"""Resource pools and sampled runtime scenarios."""
