"""Crowd video captioning: sentence classifier, S2VT captioner and caption metrics."""

__version__ = "0.1.0"
