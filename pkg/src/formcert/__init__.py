"""Certified algebraic machinery for rank-preserving replacements of 1-form tuples.

Everything upstream of the numeric module works over exact rationals; every
verdict that matters ships a certificate re-checkable by plain polynomial
arithmetic.
"""

from formcert.ring import Ring, Poly, Variable, PolyParseError, RingContextError
from formcert.groebner import Ideal, MembershipCertificate, ResourceLimitError

__all__ = [
    "Ring",
    "Poly",
    "Variable",
    "PolyParseError",
    "RingContextError",
    "Ideal",
    "MembershipCertificate",
    "ResourceLimitError",
]

__version__ = "0.1.0"
