"""conealg: semigroup algebras of lattice polytopes, exactly, at desk scale."""

from .fields import field, substream

__all__ = ["field", "substream"]

__version__ = "0.1.0"
