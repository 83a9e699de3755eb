"""Exact dense linear algebra over a prime field F_q.

Vectors are tuples of ints in [0, q), matrices are tuples of row tuples.
Everything is immutable and hashable; tuple comparison gives the
lexicographic order (index 0 most significant) used for canonical images.
For q = 2 the elimination-bound routines switch to int-packed bitset rows
(XOR row ops, popcount inner products).
"""

from __future__ import annotations

import os
from functools import lru_cache
from random import Random
from typing import Iterator, Sequence

Vector = tuple[int, ...]
Matrix = tuple[tuple[int, ...], ...]

DEFAULT_ENUM_CAP = 2**24


class SingularMatrixError(ValueError):
    """Matrix expected to be invertible has rank < n."""


class NoSolutionError(ValueError):
    """Linear constraints are inconsistent."""


class UnderdeterminedError(ValueError):
    """Linear constraints do not pin down a unique solution."""


class EnumerationCapError(ValueError):
    """Requested exhaustive enumeration exceeds the configured cap."""


def enumeration_cap() -> int:
    """Exhaustive-enumeration size limit; override via MVOWF_ENUM_CAP."""
    raw = os.environ.get("MVOWF_ENUM_CAP")
    return int(raw) if raw else DEFAULT_ENUM_CAP


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True


def validate_modulus(q: int) -> None:
    """Require a small prime modulus (byte-sized scalars)."""
    if not is_prime(q):
        raise ValueError(f"modulus {q} is not prime")
    if q >= 256:
        raise ValueError(f"modulus {q} too large (need q < 256)")


@lru_cache(maxsize=None)
def _inverse_table(q: int) -> tuple[int, ...]:
    # index 0 unused; pow(a, -1, q) is exact for prime q
    return (0,) + tuple(pow(a, -1, q) for a in range(1, q))


def scalar_inv(a: int, q: int) -> int:
    if a % q == 0:
        raise ZeroDivisionError("no inverse of 0")
    return _inverse_table(q)[a % q]


def inner_product(a: Vector, b: Vector, q: int) -> int:
    """Sum of a_i * b_i mod q."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if q == 2:
        return (_pack(a) & _pack(b)).bit_count() & 1
    return sum(x * y for x, y in zip(a, b)) % q


def is_zero_vector(a: Vector) -> bool:
    return not any(a)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m))


def mat_vec(m: Matrix, v: Vector, q: int) -> Vector:
    if len(m[0]) != len(v):
        raise ValueError("dimension mismatch")
    return tuple(sum(r * x for r, x in zip(row, v)) % q for row in m)


def mat_mul(a: Matrix, b: Matrix, q: int) -> Matrix:
    if len(a[0]) != len(b):
        raise ValueError("dimension mismatch")
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) % q for col in bt) for row in a
    )


# -- int-packed GF(2) rows: bit j of the int is column j --------------------


def _pack(v: Vector) -> int:
    x = 0
    for j, e in enumerate(v):
        if e:
            x |= 1 << j
    return x


def _unpack(x: int, n: int) -> Vector:
    return tuple((x >> j) & 1 for j in range(n))


def _pack_rows(m: Matrix) -> list[int]:
    return [_pack(row) for row in m]


def _rank_f2(rows: list[int]) -> int:
    pivots: list[int] = []
    for row in rows:
        for p in pivots:
            row = min(row, row ^ p)
        if row:
            pivots.append(row)
    return len(pivots)


def rank(m: Matrix, q: int) -> int:
    """Row rank by Gaussian elimination."""
    if q == 2:
        return _rank_f2(_pack_rows(m))
    work = [list(row) for row in m]
    rows, cols = len(work), len(work[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if work[i][c]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = scalar_inv(work[r][c], q)
        work[r] = [(x * inv) % q for x in work[r]]
        for i in range(rows):
            if i != r and work[i][c]:
                f = work[i][c]
                work[i] = [(x - f * y) % q for x, y in zip(work[i], work[r])]
        r += 1
        if r == rows:
            break
    return r


def is_invertible(m: Matrix, q: int) -> bool:
    return len(m) == len(m[0]) and rank(m, q) == len(m)


def mat_inverse(m: Matrix, q: int) -> Matrix:
    """Inverse by Gauss-Jordan; raises SingularMatrixError when rank < n."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("matrix must be square")
    if q == 2:
        # augmented rows packed as one int: low n bits matrix, high n bits identity
        work = [_pack(row) | (1 << (n + i)) for i, row in enumerate(m)]
        r = 0
        for c in range(n):
            piv = next((i for i in range(r, n) if (work[i] >> c) & 1), None)
            if piv is None:
                raise SingularMatrixError("matrix is singular over F_2")
            work[r], work[piv] = work[piv], work[r]
            for i in range(n):
                if i != r and (work[i] >> c) & 1:
                    work[i] ^= work[r]
            r += 1
        return tuple(_unpack(work[i] >> n, n) for i in range(n))
    work = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(m)]
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if work[i][c]), None)
        if piv is None:
            raise SingularMatrixError(f"matrix is singular over F_{q}")
        work[r], work[piv] = work[piv], work[r]
        inv = scalar_inv(work[r][c], q)
        work[r] = [(x * inv) % q for x in work[r]]
        for i in range(n):
            if i != r and work[i][c]:
                f = work[i][c]
                work[i] = [(x - f * y) % q for x, y in zip(work[i], work[r])]
        r += 1
    return tuple(tuple(row[n:]) for row in work)


def solve_linear(vs: Sequence[Vector], ws: Sequence[Vector], q: int) -> Matrix:
    """Return the unique n x n matrix X with X v_i = w_i for all i.

    Raises NoSolutionError when the constraints are inconsistent and
    UnderdeterminedError when the v_i do not span F_q^n (no unique X).
    """
    if len(vs) != len(ws):
        raise ValueError("need equally many constraint and target vectors")
    if not vs:
        raise UnderdeterminedError("no constraints")
    n = len(vs[0])
    # eliminate on rows [v_i | w_i]; X e_j = (reduced w of pivot row j)
    work = [list(v) + list(w) for v, w in zip(vs, ws)]
    pivot_col: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(work)) if work[i][c]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = scalar_inv(work[r][c], q)
        work[r] = [(x * inv) % q for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c]:
                f = work[i][c]
                work[i] = [(x - f * y) % q for x, y in zip(work[i], work[r])]
        pivot_col.append(c)
        r += 1
    for i in range(r, len(work)):
        if any(work[i][n:]):
            raise NoSolutionError("inconsistent constraints")
    if r < n:
        raise UnderdeterminedError(f"constraints span only {r} of {n} dimensions")
    # after full-rank RREF the pivot rows read e_c | (column c of X)
    cols = [None] * n
    for i, c in enumerate(pivot_col):
        cols[c] = work[i][n:]
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


# -- sampling and enumeration ------------------------------------------------


def solve_linear_invertible(vs: Sequence[Vector], ws: Sequence[Vector], q: int) -> Matrix:
    """Some invertible X with X v_i = w_i; completes freely when vs do not span.

    Raises NoSolutionError when the constraints are inconsistent or force a
    singular map (independent v_i with dependent images).
    """
    try:
        unique = solve_linear(vs, ws, q)
    except UnderdeterminedError:
        pass
    else:
        if rank(unique, q) != len(unique):
            raise NoSolutionError("constraints force a singular map")
        return unique
    n = len(vs[0])
    pivots: list[tuple[int, list[int], list[int]]] = []
    img_pivots: list[tuple[int, list[int]]] = []

    def reduce_rows(vr: list[int], wr: list[int], rows) -> None:
        for pcol, pv, pw in rows:
            f = vr[pcol]
            if f:
                for i in range(n):
                    vr[i] = (vr[i] - f * pv[i]) % q
                    wr[i] = (wr[i] - f * pw[i]) % q

    def reduce_img(wr: list[int]) -> list[int]:
        wr = list(wr)
        for pcol, pw in img_pivots:
            f = wr[pcol]
            if f:
                wr = [(x - f * y) % q for x, y in zip(wr, pw)]
        return wr

    def push(vr: list[int], wr: list[int]) -> None:
        wi = reduce_img(wr)
        if not any(wi):
            raise NoSolutionError("constraints force a singular map")
        pcol = next(i for i, x in enumerate(vr) if x)
        inv = scalar_inv(vr[pcol], q)
        pivots.append((pcol, [(x * inv) % q for x in vr], [(x * inv) % q for x in wr]))
        icol = next(i for i, x in enumerate(wi) if x)
        inv = scalar_inv(wi[icol], q)
        img_pivots.append((icol, [(x * inv) % q for x in wi]))

    pairs = list(zip([list(v) for v in vs], [list(w) for w in ws]))
    for vr, wr in pairs:
        vr, wr = list(vr), list(wr)
        reduce_rows(vr, wr, pivots)
        if not any(vr):
            if any(wr):
                raise NoSolutionError("inconsistent constraints")
            continue
        push(vr, wr)
    extra: list[tuple[Vector, Vector]] = []
    taken = {pcol for pcol, _, _ in pivots}
    for j in range(n):
        if len(pivots) == n:
            break
        if j in taken:
            continue
        source = tuple(1 if i == j else 0 for i in range(n))
        for y in enumerate_vectors(n, q):
            if any(reduce_img(list(y))):
                push([1 if i == j else 0 for i in range(n)], list(y))
                extra.append((source, y))
                break
    return solve_linear(list(vs) + [p[0] for p in extra], list(ws) + [p[1] for p in extra], q)


def random_vector(n: int, q: int, rng: Random) -> Vector:
    return tuple(rng.randrange(q) for _ in range(n))


def random_matrix(n: int, q: int, rng: Random) -> Matrix:
    return tuple(random_vector(n, q, rng) for _ in range(n))


def random_invertible(n: int, q: int, rng: Random) -> Matrix:
    """Uniform element of GL_n(F_q) by rejection sampling.

    Acceptance probability is prod_{j=1..n}(1 - q^-j), at least 0.288 for q = 2.
    """
    while True:
        m = random_matrix(n, q, rng)
        if rank(m, q) == n:
            return m


def complete_basis(vectors: Sequence[Vector], n: int, q: int) -> Matrix:
    """Extend independent vectors to a basis; returns the matrix with those columns."""
    basis: list[Vector] = list(vectors)
    if basis and rank(tuple(basis), q) != len(basis):
        raise ValueError("input vectors are dependent")
    for j in range(n):
        if len(basis) == n:
            break
        e = tuple(1 if i == j else 0 for i in range(n))
        if rank(tuple(basis) + (e,), q) > len(basis):
            basis.append(e)
    return tuple(tuple(basis[j][i] for j in range(len(basis))) for i in range(n))


def random_invertible_mapping(u: Vector, w: Vector, q: int, rng: Random) -> Matrix:
    """Uniform invertible A with A u = w, for nonzero u and w.

    Any fixed A0 with A0 u = w composed with a uniform stabilizer element
    {S : S u = u} gives the uniform distribution on the coset.
    """
    if is_zero_vector(u) or is_zero_vector(w):
        raise ValueError("u and w must be nonzero")
    n = len(u)
    p_u = complete_basis([u], n, q)
    p_w = complete_basis([w], n, q)
    p_u_inv = mat_inverse(p_u, q)
    a0 = mat_mul(p_w, p_u_inv, q)
    # stabilizer of e1 (first column fixed), conjugated back through p_u
    while True:
        cols = [tuple(1 if i == 0 else 0 for i in range(n))]
        cols += [random_vector(n, q, rng) for _ in range(n - 1)]
        t = tuple(tuple(col[i] for col in cols) for i in range(n))
        if rank(t, q) == n:
            break
    s = mat_mul(mat_mul(p_u, t, q), p_u_inv, q)
    return mat_mul(a0, s, q)


def enumerate_vectors(n: int, q: int) -> Iterator[Vector]:
    """All q^n vectors in lexicographic order."""
    v = [0] * n
    while True:
        yield tuple(v)
        i = n - 1
        while i >= 0 and v[i] == q - 1:
            v[i] = 0
            i -= 1
        if i < 0:
            return
        v[i] += 1


def enumerate_invertible(n: int, q: int) -> Iterator[Matrix]:
    """Every element of GL_n(F_q) exactly once, rows chosen lexicographically."""
    if q ** (n * n) > enumeration_cap():
        raise EnumerationCapError(
            f"q^(n^2) = {q ** (n * n)} exceeds enumeration cap {enumeration_cap()}"
        )
    all_rows = list(enumerate_vectors(n, q))

    def build(prefix: list[Vector]) -> Iterator[Matrix]:
        if len(prefix) == n:
            yield tuple(prefix)
            return
        r = len(prefix)
        for row in all_rows:
            if rank(tuple(prefix) + (row,), q) == r + 1:
                yield from build(prefix + [row])

    yield from build([])


def gl_order(n: int, q: int) -> int:
    """|GL_n(F_q)| = prod_{i=0}^{n-1} (q^n - q^i)."""
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out


def invertibility_probability(n: int, q: int) -> float:
    """Probability a uniform n x n matrix over F_q is invertible."""
    out = 1.0
    for j in range(1, n + 1):
        out *= 1.0 - float(q) ** -j
    return out


def invertibility_probability_limit(q: int) -> float:
    """Limit of the invertibility probability as n grows (converges fast)."""
    out = 1.0
    for j in range(1, 200):
        out *= 1.0 - float(q) ** -j
    return out
