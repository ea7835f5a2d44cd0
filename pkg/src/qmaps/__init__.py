"""Quantum families of maps on M2: exact presentations, rewriting, operator
models and executable checks for the Powers-state preserving quantum groups."""

__version__ = "0.1.0"
