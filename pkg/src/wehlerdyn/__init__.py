"""Exact dynamics on (2,2,2) surfaces in P1 x P1 x P1 and on Kummer-type tori."""

__version__ = "0.1.0"
