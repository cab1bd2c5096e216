"""
Plugins module for Hilbert Embedding Lab.

Contains the experiment base interface and all experiment implementations.
"""
