"""Positive maps, their automorphism extensions, and UPB entanglement detection."""

from .linalg import BACKEND, BipartiteDims

__version__ = "0.1.0"

__all__ = ["BACKEND", "BipartiteDims", "__version__"]
