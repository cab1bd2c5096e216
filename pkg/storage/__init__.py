"""
Storage module for Hilbert Embedding Lab.

Run history and result artifacts.
"""
