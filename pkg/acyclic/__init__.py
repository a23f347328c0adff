# acyclic/__init__.py
"""Eigenvalues, star sets and closed-form eigenvectors of acyclic symmetric matrices."""
