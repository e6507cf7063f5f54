"""Naive Milnor-Witt K-theory over finite fields and F_q(t), with Gersten complexes of curves."""

__version__ = "0.1.0"
