"""Nearly-linear 1-Laplacian solver and approximate Hodge decomposition on embedded complexes."""

__version__ = "0.1.0"
