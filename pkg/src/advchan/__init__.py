"""Toolkit for binary channels with mixed stochastic and online-adversarial noise."""

from . import adversary, capacity, channel, codes, sim  # noqa: F401

__all__ = ["adversary", "capacity", "channel", "codes", "sim"]
__version__ = "0.1.0"
