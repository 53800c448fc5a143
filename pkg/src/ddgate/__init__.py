"""Decoupling-protected quantum gates: schedules, drive engineering, spin-bath simulation."""

__version__ = "0.1.0"
