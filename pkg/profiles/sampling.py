"""Quartile sampling of benchmark distributions.

A draw first picks one of the two inner quartile ranges, (q1, q2) or
(q2, q3), with equal chance, then draws uniformly inside it. Draws therefore
always land in [q1, q3]; the tails of the box plot are never used.
"""
from __future__ import annotations

import numpy as np

from profiles.dataset import QuartileDistribution


def sample(dist: QuartileDistribution, rng: np.random.Generator) -> float:
    if rng.random() < 0.5:
        lo, hi = dist.q1, dist.q2
    else:
        lo, hi = dist.q2, dist.q3
    if lo == hi:
        # rng 소비량을 분포와 무관하게 고정(재현성)
        rng.random()
        return float(lo)
    return float(rng.uniform(lo, hi))
