"""Replicated task offloading for vehicular edge computing, learned with a combinatorial bandit."""

__version__ = "0.1.0"
