"""Phase toolkit: phases of Lagrangian manifolds and their transport under Hamiltonian flows."""

__version__ = "0.1.0"

__all__ = ["__version__"]
