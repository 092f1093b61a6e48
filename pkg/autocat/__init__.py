"""Steady states of an autocatalytic reaction with absorption."""

__version__ = "0.1.0"
