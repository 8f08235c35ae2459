"""Numerical toolbox for type classes, saddle-point asymptotics and error exponents."""
__version__ = "0.1.0"
