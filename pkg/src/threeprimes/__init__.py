"""Finite, checkable pieces of the density three-primes problem: sumset
verification over residue rings, exact LP certification, sequence-lemma
search, prime representation counting, and a transference laboratory."""

from .errors import DomainError, PrecisionError

__version__ = "0.1.0"

__all__ = ["DomainError", "PrecisionError", "__version__"]
