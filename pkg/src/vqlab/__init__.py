"""vqlab: a desk-scale variational quantum machine-learning workbench."""

__version__ = "0.1.0"
