"""Sobolev-type orthogonal polynomials built on Al-Salam-Carlitz I and
Stieltjes-Wigert families, with arbitrary-precision zero analysis."""

__version__ = "0.1.0"
