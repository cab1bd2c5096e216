"""
Core module for Hilbert Embedding Lab.

Contains schemas, errors, settings and the numerical modules.
"""
