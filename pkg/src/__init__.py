"""
ratlin: exact structure and linearization analysis of rational matrices.

Arithmetic is over QQ and QQ[l] from sympy; nothing is evaluated in floating point.
"""

__version__ = "0.1.0"
