"""Augmenting few-shot MR-to-text data from an open-domain utterance pool."""

__version__ = "0.1.0"
