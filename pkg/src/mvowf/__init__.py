"""Candidate one-way function over a prime field and its analysis toolkit.

The function maps an invertible matrix M to the lexicographically sorted
multiset of M*v over a public list of vectors V.  Subpackages cover exact
F_q linear algebra, key generation and inversion oracles, the graph
isomorphism reduction, hidden shift / hidden subgroup instances, hard-core
predicate reductions, and permutation statistics.
"""

from .field import Matrix, Vector
from .owf import OwfImage, OwfKey, evaluate, is_injective, keygen

__all__ = [
    "Matrix",
    "Vector",
    "OwfImage",
    "OwfKey",
    "evaluate",
    "is_injective",
    "keygen",
]
