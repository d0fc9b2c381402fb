"""Micropolar shell finite elements for hard-magnetic soft materials."""

__version__ = "0.1.0"
