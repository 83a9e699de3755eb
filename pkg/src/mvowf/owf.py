"""Candidate one-way function: M maps to the sorted multiset M*V.

A key is a list V of m vectors over F_q^n; evaluating at an invertible M
yields the lexicographically sorted list of the M*v. The module provides
key generation, evaluation, the injectivity analysis (which invertible K
fix V as a multiset), backtracking and exhaustive inversion oracles, and
the worst-to-average self-reduction wrappers.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from random import Random
from typing import Callable, Iterator, Sequence

from .field import (
    Matrix,
    SingularMatrixError,
    Vector,
    enumerate_invertible,
    enumerate_vectors,
    identity,
    mat_inverse,
    mat_mul,
    mat_vec,
    rank,
    random_invertible,
    random_vector,
    scalar_inv,
    solve_linear,
    validate_modulus,
)
from .rng import spawn_rng


class BudgetExceededError(RuntimeError):
    """Backtracking search hit its node budget before finishing."""


@dataclass(frozen=True)
class OwfKey:
    """Public parameters (q, n, m, V) defining the function."""

    q: int
    n: int
    vectors: tuple[Vector, ...]
    seed: int | None = None

    def __post_init__(self) -> None:
        validate_modulus(self.q)
        if self.m < self.n:
            raise ValueError(f"need m >= n, got m = {self.m}, n = {self.n}")
        for v in self.vectors:
            if len(v) != self.n:
                raise ValueError("key vector of wrong length")
            if any(not 0 <= e < self.q for e in v):
                raise ValueError("key vector entry out of range")

    @property
    def m(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class OwfImage:
    """Value of the function: m vectors sorted lexicographically."""

    vectors: tuple[Vector, ...]

    def __post_init__(self) -> None:
        if any(self.vectors[i] > self.vectors[i + 1] for i in range(len(self.vectors) - 1)):
            raise ValueError("image vectors must be sorted")

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)


@dataclass(frozen=True)
class ConsistencyWitness:
    """Permutation pi and invertible K with K v_i = v_{pi(i)} for all i."""

    pi: tuple[int, ...]
    matrix: Matrix


@dataclass
class WitnessSearch:
    witnesses: list[ConsistencyWitness]
    complete: bool


Inverter = Callable[[OwfKey, OwfImage], Matrix | None]


def default_delta(q: int, n: int) -> int:
    """Key-length surplus ceil(A ln^2 n) with A = 5 / ln^2 q."""
    return math.ceil(5.0 / math.log(q) ** 2 * math.log(n) ** 2)


def keygen(
    q: int,
    n: int,
    delta: int | None = None,
    rng: Random | None = None,
    seed: int | None = None,
) -> OwfKey:
    """Fresh key with m = n + delta i.i.d. uniform vectors."""
    if n < 2:
        raise ValueError("need n >= 2")
    if rng is None:
        if seed is None:
            raise ValueError("keygen needs an rng or a seed")
        rng = spawn_rng(seed, "keygen")
    if delta is None:
        delta = default_delta(q, n)
    m = n + delta
    vectors = tuple(random_vector(n, q, rng) for _ in range(m))
    return OwfKey(q=q, n=n, vectors=vectors, seed=seed)


def evaluate(key: OwfKey, m: Matrix) -> OwfImage:
    """Sorted list of M*v over the key vectors; M must be invertible."""
    if len(m) != key.n or any(len(row) != key.n for row in m):
        raise ValueError("matrix has wrong shape for this key")
    if rank(m, key.q) != key.n:
        raise SingularMatrixError("evaluation domain is GL_n; matrix is singular")
    return OwfImage(tuple(sorted(mat_vec(m, v, key.q) for v in key.vectors)))


def transform_image(a: Matrix, image: OwfImage, q: int) -> OwfImage:
    """Sorted multiset A*W; equals evaluate at A*M when W = evaluate at M."""
    return OwfImage(tuple(sorted(mat_vec(a, w, q) for w in image.vectors)))


# -- multiset matching search ------------------------------------------------
#
# Core engine shared by witness enumeration, injectivity, inversion and the
# graph-isomorphism search: yield every invertible M with M*src = dst as
# multisets.  Distinct source values are assigned targets in first-appearance
# order, candidates in lexicographic order; incremental elimination forces
# the images of dependent values and prunes branches that would make M
# singular.  When the source values do not span, the remaining degrees of
# freedom are either completed greedily (one witness per leaf) or enumerated.


def iter_matchings(
    src: Sequence[Vector],
    dst: Sequence[Vector],
    q: int,
    n: int,
    node_budget: int | None = None,
    enumerate_completions: bool = True,
) -> Iterator[Matrix]:
    src_count = Counter(src)
    dst_count = Counter(dst)
    if sum(src_count.values()) != sum(dst_count.values()):
        return
    src_vals = list(dict.fromkeys(src))
    by_mult: dict[int, list[Vector]] = {}
    for w in sorted(dst_count):
        by_mult.setdefault(dst_count[w], []).append(w)

    nodes = 0
    used: set[Vector] = set()
    pairs: list[tuple[Vector, Vector]] = []
    # echelon rows (pivot col, v-part, w-part): each row asserts M*vpart = wpart
    pivots: list[tuple[int, list[int], list[int]]] = []
    # separate echelon over the w-parts of pivots: collapse means M singular
    img_pivots: list[tuple[int, list[int]]] = []

    def charge() -> None:
        nonlocal nodes
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise BudgetExceededError(f"matching search exceeded {node_budget} nodes")

    def reduce_pair(v: Vector, w: Vector) -> tuple[list[int], list[int]]:
        vr, wr = list(v), list(w)
        for pcol, pv, pw in pivots:
            f = vr[pcol]
            if f:
                vr = [(x - f * y) % q for x, y in zip(vr, pv)]
                wr = [(x - f * y) % q for x, y in zip(wr, pw)]
        return vr, wr

    def reduce_image(w: list[int]) -> list[int]:
        wr = list(w)
        for pcol, pw in img_pivots:
            f = wr[pcol]
            if f:
                wr = [(x - f * y) % q for x, y in zip(wr, pw)]
        return wr

    def push_pivot(vr: list[int], wr: list[int]) -> bool:
        """Normalize and record a new pivot; False when the image collapses."""
        wi = reduce_image(wr)
        if not any(wi):
            return False
        pcol = next(i for i, x in enumerate(vr) if x)
        inv = scalar_inv(vr[pcol], q)
        pivots.append((pcol, [(x * inv) % q for x in vr], [(x * inv) % q for x in wr]))
        icol = next(i for i, x in enumerate(wi) if x)
        inv = scalar_inv(wi[icol], q)
        img_pivots.append((icol, [(x * inv) % q for x in wi]))
        return True

    def solve_from_pairs(extra: list[tuple[Vector, Vector]]) -> Matrix:
        vs = [p[0] for p in pairs] + [p[0] for p in extra]
        ws = [p[1] for p in pairs] + [p[1] for p in extra]
        return solve_linear(vs, ws, q)

    def complete(free_sources: list[Vector]) -> Iterator[Matrix]:
        # assign images to basis vectors outside span(src); any choice keeping
        # the image side independent yields a valid M
        if not free_sources:
            yield solve_from_pairs([])
            return

        def choose(idx: int, extra: list[tuple[Vector, Vector]]) -> Iterator[Matrix]:
            if idx == len(free_sources):
                yield solve_from_pairs(extra)
                return
            for y in enumerate_vectors(n, q):
                wi = reduce_image(list(y))
                if not any(wi):
                    continue
                charge()
                icol = next(i for i, x in enumerate(wi) if x)
                inv = scalar_inv(wi[icol], q)
                img_pivots.append((icol, [(x * inv) % q for x in wi]))
                yield from choose(idx + 1, extra + [(free_sources[idx], y)])
                img_pivots.pop()
                if not enumerate_completions:
                    return

        yield from choose(0, [])

    def free_basis() -> list[Vector]:
        # unit vectors off the pivot columns reduce to themselves, so they
        # extend the source span to all of F_q^n
        taken = {pcol for pcol, _, _ in pivots}
        return [
            tuple(1 if i == j else 0 for i in range(n))
            for j in range(n)
            if j not in taken
        ]

    def forced_images_available(idx: int) -> bool:
        # lookahead: any not-yet-processed value already inside the assigned
        # span has a determined image; prune now if that image is missing,
        # has the wrong multiplicity, or collides with another forced one
        claimed: set[Vector] = set()
        for v in src_vals[idx:]:
            vr, wneg = reduce_pair(v, (0,) * n)
            if any(vr):
                continue
            forced = tuple((-x) % q for x in wneg)
            if (
                dst_count.get(forced) != src_count[v]
                or forced in used
                or forced in claimed
            ):
                return False
            claimed.add(forced)
        return True

    def extend(idx: int) -> Iterator[Matrix]:
        if idx == len(src_vals):
            yield from complete(free_basis())
            return
        v = src_vals[idx]
        mult = src_count[v]
        vr, wneg = reduce_pair(v, (0,) * n)
        if not any(vr):
            forced = tuple((-x) % q for x in wneg)
            if dst_count.get(forced) == mult and forced not in used:
                charge()
                used.add(forced)
                pairs.append((v, forced))
                yield from extend(idx + 1)
                pairs.pop()
                used.remove(forced)
            return
        for w in by_mult.get(mult, []):
            if w in used:
                continue
            charge()
            wr = [(x + y) % q for x, y in zip(w, wneg)]
            if not push_pivot(vr, wr):
                continue
            used.add(w)
            pairs.append((v, w))
            if forced_images_available(idx + 1):
                yield from extend(idx + 1)
            pairs.pop()
            used.remove(w)
            pivots.pop()
            img_pivots.pop()

    yield from extend(0)


def _canonical_permutation(vectors: Sequence[Vector], k: Matrix, q: int) -> tuple[int, ...]:
    """Lex-least permutation pi with K v_i = v_{pi(i)}: ascending index blocks."""
    positions: dict[Vector, list[int]] = {}
    for i, v in enumerate(vectors):
        positions.setdefault(v, []).append(i)
    pi = [0] * len(vectors)
    for v, idxs in positions.items():
        targets = positions[mat_vec(k, v, q)]
        for i, j in zip(idxs, targets):
            pi[i] = j
    return tuple(pi)


def consistent_permutations(
    key: OwfKey,
    cap: int = 10_000,
    node_budget: int = 10**7,
) -> WitnessSearch:
    """All invertible K with K*V = V as multisets, one canonical pi per K.

    Permutations that only shuffle equal vectors add nothing (the function
    value never sees them), so each witness is a distinct K paired with its
    lexicographically least permutation.  Truncated at `cap` witnesses or
    `node_budget` search nodes with complete=False.
    """
    witnesses: list[ConsistencyWitness] = []
    complete = True
    try:
        for k in iter_matchings(
            key.vectors, key.vectors, key.q, key.n, node_budget=node_budget
        ):
            if len(witnesses) >= cap:
                complete = False
                break
            witnesses.append(
                ConsistencyWitness(pi=_canonical_permutation(key.vectors, k, key.q), matrix=k)
            )
    except BudgetExceededError:
        complete = False
    return WitnessSearch(witnesses=witnesses, complete=complete)


def is_injective(key: OwfKey, node_budget: int = 10**7) -> bool:
    """True iff the identity is the only invertible K with K*V = V."""
    if rank(key.vectors, key.q) < key.n:
        # some K != identity fixes span(V) pointwise, except in GL_1(F_2)
        if key.n > 1 or key.q > 2:
            return False
    ident = identity(key.n)
    for k in iter_matchings(key.vectors, key.vectors, key.q, key.n, node_budget=node_budget):
        if k != ident:
            return False
    return True


def invert_backtracking(
    key: OwfKey, image: OwfImage, node_budget: int = 10**6
) -> Matrix | None:
    """First invertible M with M*V = image found by the matching search.

    Returns None when the image has no preimage; raises BudgetExceededError
    when the node budget runs out first.  Every returned matrix is verified
    through evaluate.
    """
    for m in iter_matchings(
        key.vectors,
        image.vectors,
        key.q,
        key.n,
        node_budget=node_budget,
        enumerate_completions=False,
    ):
        if evaluate(key, m) == image:
            return m
    return None


def invert_exhaustive(key: OwfKey, image: OwfImage) -> Matrix | None:
    """Scan all of GL_n(F_q) for a preimage; None when the scan exhausts."""
    for m in enumerate_invertible(key.n, key.q):
        if evaluate(key, m) == image:
            return m
    return None


def self_reduce(
    inverter: Inverter,
    key: OwfKey,
    image: OwfImage,
    trials: int,
    rng: Random,
) -> Matrix | None:
    """Invert an arbitrary image using an inverter that only works sometimes.

    Each trial maps the instance to a uniformly random one with the same key
    (left-multiplying the image by random A in GL_n), so an inverter that
    succeeds on any constant fraction of matrices succeeds here after a few
    trials.  Returns a verified preimage or None after `trials` failures.
    """
    q = key.q
    for _ in range(trials):
        a = random_invertible(key.n, q, rng)
        candidate = inverter(key, transform_image(a, image, q))
        if candidate is None:
            continue
        m = mat_mul(mat_inverse(a, q), candidate, q)
        if evaluate(key, m) == image:
            return m
    return None


def orbit_randomize(
    key: OwfKey, image: OwfImage, rng: Random
) -> tuple[OwfKey, OwfImage, Matrix]:
    """Re-randomize the key within its orbit: V' = B*V, image unchanged.

    A preimage M' of the image under the new key gives M = M'*B for the
    original one.  Returns (new key, image, B).
    """
    b = random_invertible(key.n, key.q, rng)
    vectors = tuple(mat_vec(b, v, key.q) for v in key.vectors)
    return OwfKey(q=key.q, n=key.n, vectors=vectors), image, b


@dataclass(frozen=True)
class InjectivityPoint:
    delta: int
    m: int
    trials: int
    injective: int

    @property
    def probability(self) -> float:
        return self.injective / self.trials

    @property
    def std_error(self) -> float:
        p = self.probability
        return math.sqrt(p * (1.0 - p) / self.trials)


def injectivity_experiment(
    q: int,
    n: int,
    deltas: Sequence[int],
    trials: int,
    seed: int,
) -> list[InjectivityPoint]:
    """Empirical injectivity probability per key-length surplus delta."""
    out = []
    for delta in deltas:
        hits = 0
        for t in range(trials):
            key = keygen(q, n, delta=delta, rng=spawn_rng(seed, "inj", delta, t))
            if is_injective(key):
                hits += 1
        out.append(InjectivityPoint(delta=delta, m=n + delta, trials=trials, injective=hits))
    return out
