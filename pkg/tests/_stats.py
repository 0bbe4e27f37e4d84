"""Shared helpers for Monte Carlo assertions."""

from scipy import stats


def familywise_z(m: int, level: float = 0.0027) -> float:
    """Sidak bound: ``m`` comparisons share the false-alarm rate of one 3-sigma test."""
    return float(stats.norm.isf((1.0 - (1.0 - level) ** (1.0 / m)) / 2.0))
