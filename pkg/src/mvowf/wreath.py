"""Hidden shift and hidden subgroup instances over GL_n and its wreath square.

Inverting the sorted-multiset function is a hidden shift problem: f1(N) is
the image of N under the key, f2(N) the image of N times the secret matrix.
The standard wreath-product construction turns that into a hidden subgroup
instance.  Multiplication of (g1, g2, swap) triples is defined as the
pullback of 2n x 2n block-matrix multiplication, which makes associativity
and the embedding homomorphism hold by construction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Iterator

from .field import (
    Matrix,
    enumerate_invertible,
    enumeration_cap,
    gl_order,
    identity,
    mat_inverse,
    mat_mul,
)
from .owf import OwfImage, OwfKey, evaluate, is_injective


@dataclass(frozen=True)
class WreathElement:
    """Pair of invertible blocks plus a swap bit."""

    g1: Matrix
    g2: Matrix
    swap: int

    def __post_init__(self) -> None:
        if self.swap not in (0, 1):
            raise ValueError("swap must be 0 or 1")
        if len(self.g1) != len(self.g2):
            raise ValueError("blocks must have equal dimension")


def wreath_identity(n: int) -> WreathElement:
    return WreathElement(identity(n), identity(n), 0)


def wreath_mul(x: WreathElement, y: WreathElement, q: int) -> WreathElement:
    """Product matching embed(x) * embed(y); x.swap = 1 crosses y's blocks."""
    if len(x.g1) != len(y.g1):
        raise ValueError("dimension mismatch")
    if x.swap == 0:
        return WreathElement(mat_mul(x.g1, y.g1, q), mat_mul(x.g2, y.g2, q), y.swap)
    return WreathElement(mat_mul(x.g1, y.g2, q), mat_mul(x.g2, y.g1, q), 1 ^ y.swap)


def wreath_inverse(x: WreathElement, q: int) -> WreathElement:
    inv1, inv2 = mat_inverse(x.g1, q), mat_inverse(x.g2, q)
    if x.swap == 0:
        return WreathElement(inv1, inv2, 0)
    return WreathElement(inv2, inv1, 1)


def embed_gl2n(x: WreathElement) -> Matrix:
    """Block-diagonal for swap = 0, block-anti-diagonal for swap = 1."""
    n = len(x.g1)
    zero = (0,) * n
    if x.swap == 0:
        top = [x.g1[i] + zero for i in range(n)]
        bottom = [zero + x.g2[i] for i in range(n)]
    else:
        top = [zero + x.g1[i] for i in range(n)]
        bottom = [x.g2[i] + zero for i in range(n)]
    return tuple(tuple(row) for row in top + bottom)


def enumerate_wreath(n: int, q: int) -> Iterator[WreathElement]:
    """All 2 * |GL_n|^2 elements."""
    gl = list(enumerate_invertible(n, q))
    for g1 in gl:
        for g2 in gl:
            for swap in (0, 1):
                yield WreathElement(g1, g2, swap)


@dataclass(frozen=True)
class HiddenShiftInstance:
    """f1, f2 on GL_n with f2(N) = f1(N * shift); shift kept for verification."""

    f1: Callable[[Matrix], OwfImage]
    f2: Callable[[Matrix], OwfImage]
    shift: Matrix


def make_hidden_shift(key: OwfKey, m: Matrix) -> HiddenShiftInstance:
    """Hidden shift pair: f1 from the key alone, f2 through the secret M."""
    image = evaluate(key, m)  # also rejects singular M
    shifted_key = OwfKey(q=key.q, n=key.n, vectors=image.vectors)

    def f1(n_mat: Matrix) -> OwfImage:
        return evaluate(key, n_mat)

    def f2(n_mat: Matrix) -> OwfImage:
        return evaluate(shifted_key, n_mat)

    return HiddenShiftInstance(f1=f1, f2=f2, shift=m)


@dataclass(frozen=True)
class HspInstance:
    """Oracle constant exactly on right cosets of the order-2 subgroup."""

    f: Callable[[WreathElement], tuple[OwfImage, OwfImage]]
    subgroup: tuple[WreathElement, WreathElement]


def make_hsp_oracle(key: OwfKey, m: Matrix) -> HspInstance:
    """Wreath-product oracle hiding {identity, (M^-1, M, 1)}.

    The hidden coset structure is exact only for injective keys; otherwise
    extra collisions appear and the instance only promises one direction.
    """
    if not is_injective(key):
        warnings.warn("key is not injective: hidden subgroup promise is one-sided")
    shift = make_hidden_shift(key, m)
    alpha = WreathElement(mat_inverse(m, key.q), m, 1)

    def f(x: WreathElement) -> tuple[OwfImage, OwfImage]:
        if x.swap == 0:
            return shift.f1(x.g1), shift.f2(x.g2)
        return shift.f2(x.g1), shift.f1(x.g2)

    return HspInstance(f=f, subgroup=(wreath_identity(key.n), alpha))


def verify_hsp_promise(inst: HspInstance, n: int, q: int) -> bool:
    """Exhaustively check f(x) = f(y) iff x^-1 y is in the subgroup.

    Equivalent to the all-pairs comparison: grouping elements by value, the
    promise holds exactly when every value class is one right coset {x, x*a}.
    """
    order = 2 * gl_order(n, q) ** 2
    if order > enumeration_cap():
        raise ValueError(f"group order {order} too large for exhaustive check")
    _, alpha = inst.subgroup
    classes: dict = {}
    for x in enumerate_wreath(n, q):
        classes.setdefault(inst.f(x), []).append(x)
    for members in classes.values():
        if len(members) != 2:
            return False
        x, y = members
        if wreath_mul(x, alpha, q) != y:
            return False
    return True
