"""Fock-space trace identities, Fredholm determinant/permanent series, and
vertex-operator trace products, each computed along two independent routes.
"""

from .fock import Multivector, Statistics

__all__ = ["Multivector", "Statistics"]
__version__ = "0.1.0"
