"""Ego-centric circle detection for co-authorship networks."""
__version__ = "0.1.0"
