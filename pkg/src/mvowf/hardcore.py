"""Hard-core predicate reductions: recover the hidden matrix from a predictor.

A predictor answers predicate queries (trace of the preimage, or one bilinear
form of it) with some advantage over guessing.  The reductions re-randomize
the instance, wrap the predictor into a noisy linear-form oracle, list-decode
it, and verify candidate preimages exactly, so nothing unverified is ever
returned.  A subspace-censored adversary shows the bilinear predicate cannot
be extracted faster than exhaustively searching a hidden minor.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field as dc_field
from random import Random
from typing import Callable

import numpy as np

from .field import (
    Matrix,
    NoSolutionError,
    Vector,
    enumerate_vectors,
    enumeration_cap,
    inner_product,
    invertibility_probability,
    mat_inverse,
    mat_mul,
    mat_vec,
    rank,
    random_invertible_mapping,
    random_vector,
    solve_linear_invertible,
    transpose,
)
from .owf import OwfImage, OwfKey, evaluate, transform_image
from .permstats import projection_family_size, sample_projection_family


@dataclass(frozen=True)
class BilinearContext:
    """What a predicate oracle sees: a transformed image and key basis.

    The transform fields record how the query was built (image = left * W,
    basis = right * V).  They are excluded from equality and hashing: a real
    adversary never sees them, and simulated ground-truth oracles use them to
    answer as the information-theoretic predictor would.
    """

    image: tuple[Vector, ...]
    basis: tuple[Vector, ...]
    left: Matrix | None = dc_field(default=None, compare=False)
    right: Matrix | None = dc_field(default=None, compare=False)

    def implied_matrix(self, m0: Matrix, q: int) -> Matrix:
        """Underlying preimage left * M0 * right^-1 given the original M0."""
        out = m0 if self.left is None else mat_mul(self.left, m0, q)
        if self.right is not None:
            out = mat_mul(out, mat_inverse(self.right, q), q)
        return out


class Predictor:
    """Oracle with memoized answers, so it defines one fixed function per run."""

    def __init__(self, answer: Callable, epsilon: float, q: int):
        self._answer = answer
        self.epsilon = epsilon
        self.q = q
        self.query_count = 0
        self._memo: dict = {}

    def query(self, context):
        self.query_count += 1
        if context not in self._memo:
            self._memo[context] = self._answer(context)
        return self._memo[context]


def make_noisy_predictor(
    truth: Callable, epsilon: float, q: int, rng: Random
) -> Predictor:
    """Predictor answering truth(context) with probability 1/q + epsilon.

    Wrong answers are uniform over the other q - 1 values; epsilon = 1 - 1/q
    gives a perfect predictor.  Per-context noise is memoized by the
    Predictor wrapper.
    """
    if not 0 <= epsilon <= 1 - 1 / q:
        raise ValueError(f"epsilon must lie in [0, 1 - 1/{q}]")

    def answer(context):
        value = truth(context)
        if rng.random() < 1 / q + epsilon:
            return value
        return (value + 1 + rng.randrange(q - 1)) % q

    return Predictor(answer, epsilon, q)


def make_trace_truth(m0: Matrix, q: int) -> Callable[[BilinearContext], int]:
    """Ground truth oracle for the trace of a context's underlying preimage."""

    def truth(ctx: BilinearContext) -> int:
        m = ctx.implied_matrix(m0, q)
        return sum(m[i][i] for i in range(len(m))) % q

    return truth


def make_bilinear_truth(
    m0: Matrix, a: Vector, b: Vector, q: int
) -> Callable[[BilinearContext], int]:
    """Ground truth oracle for <a, M' b> on a context's underlying preimage."""

    def truth(ctx: BilinearContext) -> int:
        return inner_product(a, mat_vec(ctx.implied_matrix(m0, q), b, q), q)

    return truth


def make_subspace_adversary(
    m0: Matrix, rng: Random, dim_s: int | None = None
) -> Predictor:
    """Bilinear-query oracle that hides the leading dim_s x dim_s minor.

    Answers <a, M b> exactly whenever a or b is orthogonal to the span of the
    first dim_s coordinates, and a memoized uniform bit otherwise.  Advantage
    is about 1/n with dim_s = log2 n, yet queries never read the hidden
    minor, so no reduction can recover it without exhaustive search.
    Contexts are (a, b) vector pairs; q = 2 only.
    """
    n = len(m0)
    if dim_s is None:
        dim_s = max(1, math.ceil(math.log2(n)))
    p_orth = 2.0 ** (-dim_s)
    advantage = (2 * p_orth - p_orth * p_orth) / 2

    def answer(context):
        a, b = context
        if not any(a[:dim_s]) or not any(b[:dim_s]):
            return inner_product(a, mat_vec(m0, b, 2), 2)
        return rng.randrange(2)

    return Predictor(answer, advantage, 2)


def estimate_advantage(
    predictor: Predictor,
    truth: Callable,
    sample_context: Callable[[Random], object],
    samples: int,
    rng: Random,
) -> tuple[float, float]:
    """Empirical Pr[predictor = truth] - 1/q and its standard error."""
    hits = 0
    for _ in range(samples):
        ctx = sample_context(rng)
        if predictor.query(ctx) == truth(ctx):
            hits += 1
    p = hits / samples
    return p - 1 / predictor.q, math.sqrt(p * (1 - p) / samples)


# -- list decoding of noisy linear forms -------------------------------------


def _to_bits(x: int, k: int) -> Vector:
    return tuple((x >> i) & 1 for i in range(k))


def goldreich_levin_f2(
    oracle: Callable[[Vector], int],
    k: int,
    epsilon: float,
    rng: Random,
    confidence: float = 0.9,
) -> list[Vector]:
    """Linear forms over F_2^k agreeing with the oracle on a 1/2 + epsilon fraction.

    Classic list decoder: t reference points with guessed values, one
    majority vote per coordinate over the 2^t - 1 pairwise independent
    subset sums.  Any form with the stated agreement lands in the output
    with probability at least `confidence`; survivors are re-checked against
    fresh samples and kept above agreement 1/2 + epsilon/2.
    """
    if k > 400:
        raise ValueError("decode dimension capped at 400")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    delta = max(1e-9, 1.0 - confidence)
    # per-coordinate majority failure <= 1/(4 N eps^2) by Chebyshev over
    # pairwise independent votes; union over k coordinates
    needed = k / (4 * epsilon * epsilon * delta)
    t = min(16, max(1, math.ceil(math.log2(needed + 1))))
    nsub = 2**t - 1

    refs = [rng.getrandbits(k) for _ in range(t)]
    sums = [0] * (nsub + 1)
    for mask in range(1, nsub + 1):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] ^ refs[low.bit_length() - 1]

    votes = np.empty((k, nsub), dtype=np.float32)
    for i in range(k):
        e_i = 1 << i
        row = votes[i]
        for mask in range(1, nsub + 1):
            row[mask - 1] = oracle(_to_bits(e_i ^ sums[mask], k))

    parity = np.array(
        [x.bit_count() & 1 for x in range(2**t)], dtype=np.uint8
    )
    masks = np.arange(1, nsub + 1, dtype=np.int64)
    vote_totals = votes.sum(axis=1)

    candidates: set[Vector] = set()
    chunk = max(1, (1 << 22) // max(1, nsub))
    for start in range(0, 2**t, chunk):
        guesses = np.arange(start, min(start + chunk, 2**t), dtype=np.int64)
        corr = parity[guesses[:, None] & masks[None, :]].astype(np.float32)
        # ones[i, b] = #subsets voting h_i = 1 under guess b
        ones = vote_totals[:, None] + corr.sum(axis=1)[None, :] - 2.0 * (votes @ corr.T)
        hbits = (ones > nsub / 2.0).astype(np.uint8)
        for col in np.unique(hbits.T, axis=0):
            candidates.add(tuple(int(bit) for bit in col))

    if not candidates:
        return []
    # re-check on fresh points; keep agreement >= 1/2 + epsilon/2.  Sized so
    # a true form survives and junk from wrong guesses is unlikely to pass
    # even after a union bound over all candidates.
    n_check = max(
        64,
        math.ceil(2 * math.log(2 * max(len(candidates), 2) / delta) / (epsilon * epsilon)),
    )
    points = [rng.getrandbits(k) for _ in range(n_check)]
    answers = [oracle(_to_bits(x, k)) for x in points]
    scored = []
    for h in sorted(candidates):
        h_int = sum(bit << i for i, bit in enumerate(h))
        agree = sum(
            ((h_int & x).bit_count() & 1) == answers[j] for j, x in enumerate(points)
        )
        frac = agree / n_check
        if frac >= 0.5 + epsilon / 2:
            scored.append((-frac, h))
    scored.sort()
    return [h for _, h in scored]


def gl_decode_exhaustive(
    oracle: Callable[[Vector], int],
    k: int,
    q: int,
    epsilon: float,
    samples: int,
    rng: Random,
) -> list[Vector]:
    """Score every form in F_q^k on sampled points; keep those above 1/q + epsilon/2.

    Desk-scale stand-in for list decoding over larger fields.
    """
    if q**k > enumeration_cap():
        raise ValueError(f"q^k = {q**k} exceeds enumeration cap")
    points = [random_vector(k, q, rng) for _ in range(samples)]
    answers = np.array([oracle(p) for p in points], dtype=np.int64)
    pts = np.array(points, dtype=np.int64).T  # (k, samples)
    threshold = 1 / q + epsilon / 2
    scored: list[tuple[float, Vector]] = []
    block: list[Vector] = []

    def flush():
        if not block:
            return
        cands = np.array(block, dtype=np.int64)
        agreement = ((cands @ pts) % q == answers[None, :]).mean(axis=1)
        for i in np.flatnonzero(agreement >= threshold):
            scored.append((-float(agreement[i]), block[i]))
        block.clear()

    for h in enumerate_vectors(k, q):
        block.append(h)
        if len(block) >= 1 << 14:
            flush()
    flush()
    scored.sort()
    return [h for _, h in scored]


# -- the trace reduction ------------------------------------------------------


def trace_invert(
    key: OwfKey,
    image: OwfImage,
    predictor: Predictor,
    epsilon: float,
    rng: Random,
    confidence: float = 0.95,
    rounds: int = 4,
    stats: dict | None = None,
) -> Matrix | None:
    """Recover a preimage from a predictor for the trace of the preimage.

    The map x -> trace(N M) with vec(N^T) = x is linear in the entries of M,
    so querying the predictor on re-randomized instances N * image gives a
    noisy linear-form oracle in dimension n^2.  Singular N (where no preimage
    exists) get memoized uniform values, scaling the usable advantage by the
    invertible fraction alpha.  A single draw of those values yields a usable
    oracle only with constant probability (at n = 2 most of the domain is
    singular), so up to `rounds` fresh extensions are tried.  Candidates are
    verified through evaluate; nothing unverified is returned.
    """
    n, q = key.n, key.q
    k = n * n
    counts = {"invertible_queries": 0, "singular_queries": 0, "rounds": 0, "candidates": 0}
    effective = invertibility_probability(n, q) * epsilon

    for _ in range(rounds):
        counts["rounds"] += 1
        singular_values: dict[Vector, int] = {}

        def oracle(x: Vector) -> int:
            mat_n = tuple(tuple(x[j * n + i] for j in range(n)) for i in range(n))
            if rank(mat_n, q) == n:
                counts["invertible_queries"] += 1
                ctx = BilinearContext(
                    image=transform_image(mat_n, image, q).vectors,
                    basis=key.vectors,
                    left=mat_n,
                )
                return predictor.query(ctx)
            counts["singular_queries"] += 1
            if x not in singular_values:
                singular_values[x] = rng.randrange(q)
            return singular_values[x]

        if q == 2:
            candidates = goldreich_levin_f2(oracle, k, effective, rng, confidence)
        else:
            samples = max(400, math.ceil(8 * k / (effective * effective)))
            candidates = gl_decode_exhaustive(oracle, k, q, effective, samples, rng)
        counts["candidates"] += len(candidates)

        for h in candidates:
            m = tuple(tuple(h[i * n + j] for j in range(n)) for i in range(n))
            if rank(m, q) == n and evaluate(key, m) == image:
                if stats is not None:
                    stats.update(counts)
                return m
    if stats is not None:
        stats.update(counts)
    return None


# -- the bilinear reduction ---------------------------------------------------


def bilinear_invert(
    key: OwfKey,
    image: OwfImage,
    predictor: Predictor,
    a: Vector,
    b: Vector,
    epsilon: float,
    rng: Random,
    confidence: float = 0.9,
    assignment_budget: int = 10**6,
    stats: dict | None = None,
) -> Matrix | None:
    """Recover a preimage from a predictor for the matrix entry <a, M b>.

    For each probe pair (x, y) the instance is re-randomized by A, B with
    A^T a = x and B^-1 b = y, so the predictor's answer estimates <x, M y>.
    Decoding y -> t(g, y) for each member g of a projection family recovers
    the linear forms <g, M .>, whose values on the key vectors are matched
    against the projections of the image vectors; the surviving within-class
    assignments are solved and verified exhaustively under a budget.
    """
    n, q = key.n, key.q
    if not any(a) or not any(b):
        raise ValueError("predicate vectors a, b must be nonzero")
    t_memo: dict[tuple[Vector, Vector], int] = {}
    counts = {"t_queries": 0, "assignments_tried": 0, "budget_exhausted": False}

    def t_oracle(x: Vector, y: Vector) -> int:
        if not any(y) or not any(x):
            return 0  # bilinear form vanishes; no query needed
        if (x, y) not in t_memo:
            counts["t_queries"] += 1
            a_mat = transpose(random_invertible_mapping(a, x, q, rng))
            b_mat = random_invertible_mapping(y, b, q, rng)
            ctx = BilinearContext(
                image=transform_image(a_mat, image, q).vectors,
                basis=tuple(mat_vec(b_mat, v, q) for v in key.vectors),
                left=a_mat,
                right=b_mat,
            )
            t_memo[(x, y)] = predictor.query(ctx)
        return t_memo[(x, y)]

    # projection family: 2 log2 m independent vectors, clamped to dimension n
    size = min(projection_family_size(key.m), n)
    family = sample_projection_family(n, q, size, rng)

    row_lists: list[list[Vector]] = []
    for g in family:
        oracle = functools.partial(t_oracle, g)
        if q == 2:
            rows = goldreich_levin_f2(oracle, n, epsilon, rng, confidence)
        else:
            samples = max(200, math.ceil(8 * n / (epsilon * epsilon)))
            rows = gl_decode_exhaustive(oracle, n, q, epsilon, samples, rng)
        if not rows:
            if stats is not None:
                stats.update(counts, family=family, empty_decode=True)
            return None
        row_lists.append(rows)

    actual_sigs: dict[tuple[int, ...], list[int]] = {}
    for j, w in enumerate(image.vectors):
        sig = tuple(inner_product(g, w, q) for g in family)
        actual_sigs.setdefault(sig, []).append(j)

    result = None
    for combo in itertools.product(*row_lists):
        claimed_sigs: dict[tuple[int, ...], list[int]] = {}
        for i, v in enumerate(key.vectors):
            sig = tuple(inner_product(h, v, q) for h in combo)
            claimed_sigs.setdefault(sig, []).append(i)
        if {s: len(ix) for s, ix in claimed_sigs.items()} != {
            s: len(ix) for s, ix in actual_sigs.items()
        }:
            continue
        sigs = list(claimed_sigs)

        def arrangements(class_idx: int):
            # lazy product of per-class permutations; itertools.product would
            # materialize factorial-sized inputs before the budget could bite
            if class_idx == len(sigs):
                yield ()
                return
            for perm in itertools.permutations(actual_sigs[sigs[class_idx]]):
                for rest in arrangements(class_idx + 1):
                    yield (perm,) + rest

        for arrangement in arrangements(0):
            counts["assignments_tried"] += 1
            if counts["assignments_tried"] > assignment_budget:
                counts["budget_exhausted"] = True
                if stats is not None:
                    stats.update(counts)
                return None
            vs, ws = [], []
            for s, targets in zip(sigs, arrangement):
                for i, j in zip(claimed_sigs[s], targets):
                    vs.append(key.vectors[i])
                    ws.append(image.vectors[j])
            try:
                # completes freely when the key vectors do not span: the
                # function never sees the complement, so any invertible
                # completion verifies or fails on its own merits
                m = solve_linear_invertible(vs, ws, q)
            except NoSolutionError:
                continue
            if evaluate(key, m) == image:
                result = m
                break
        if result is not None:
            break
    if stats is not None:
        stats.update(counts)
    return result
