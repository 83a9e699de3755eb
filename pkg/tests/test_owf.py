"""Key generation, evaluation, injectivity machinery, inversion oracles."""

from random import Random

import pytest

from mvowf.field import (
    enumerate_invertible,
    identity,
    mat_mul,
    mat_vec,
    random_invertible,
    rank,
)
from mvowf.owf import (
    BudgetExceededError,
    OwfImage,
    OwfKey,
    consistent_permutations,
    default_delta,
    evaluate,
    injectivity_experiment,
    invert_backtracking,
    invert_exhaustive,
    is_injective,
    keygen,
    orbit_randomize,
    self_reduce,
    transform_image,
)

TRIPLE = OwfKey(q=2, n=2, vectors=((1, 0), (0, 1), (1, 1)))
WEIGHTED = OwfKey(q=2, n=2, vectors=((1, 0), (0, 1), (0, 1), (1, 1), (1, 1), (1, 1)))


def random_injective_key(q, n, rng, delta=None):
    while True:
        key = keygen(q, n, delta=delta, rng=rng)
        if is_injective(key):
            return key


def test_default_delta():
    # 5/ln^2(2) * ln^2(16) = 5 * log2(16)^2 = 80 exactly
    assert default_delta(2, 16) == 80
    assert keygen(2, 16, seed=1).m == 96
    assert keygen(3, 16, delta=4, seed=1).m == 20
    assert default_delta(2, 2) == 5


def test_keygen_deterministic():
    k1 = keygen(2, 4, seed=7)
    k2 = keygen(2, 4, seed=7)
    assert k1 == k2
    assert k1.seed == 7
    assert keygen(2, 4, seed=8) != k1


def test_keygen_validates():
    with pytest.raises(ValueError):
        keygen(2, 1, seed=0)
    with pytest.raises(ValueError):
        keygen(2, 4)  # no rng, no seed
    with pytest.raises(ValueError):
        OwfKey(q=4, n=2, vectors=((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        OwfKey(q=2, n=3, vectors=((0, 1, 0), (1, 0, 1)))  # m < n


def test_evaluate_identity_sorts():
    key = keygen(2, 3, delta=5, seed=3)
    img = evaluate(key, identity(3))
    assert img.vectors == tuple(sorted(key.vectors))


def test_evaluate_non_injective_example():
    swap = ((0, 1), (1, 0))
    assert evaluate(TRIPLE, swap) == evaluate(TRIPLE, identity(2))


def test_evaluate_rejects_singular():
    from mvowf.field import SingularMatrixError

    with pytest.raises(SingularMatrixError):
        evaluate(TRIPLE, ((1, 1), (1, 1)))


def test_evaluate_equivariance():
    rng = Random(5)
    key = keygen(2, 3, delta=4, rng=rng)
    for _ in range(20):
        m = random_invertible(3, 2, rng)
        a = random_invertible(3, 2, rng)
        assert transform_image(a, evaluate(key, m), 2) == evaluate(key, mat_mul(a, m, 2))


def test_orbit_symmetry():
    rng = Random(6)
    key = keygen(2, 3, delta=4, rng=rng)
    for _ in range(20):
        m = random_invertible(3, 2, rng)
        b = random_invertible(3, 2, rng)
        key_b = OwfKey(q=2, n=3, vectors=tuple(mat_vec(b, v, 2) for v in key.vectors))
        assert evaluate(key_b, m) == evaluate(key, mat_mul(m, b, 2))


def test_consistent_permutations_full_symmetric():
    found = consistent_permutations(TRIPLE)
    assert found.complete
    assert len(found.witnesses) == 6  # GL_2(F_2) permutes the 3 nonzero vectors freely
    for w in found.witnesses:
        for i, v in enumerate(TRIPLE.vectors):
            assert mat_vec(w.matrix, v, 2) == TRIPLE.vectors[w.pi[i]]


def test_consistent_permutations_multiplicities_pin_identity():
    found = consistent_permutations(WEIGHTED)
    assert found.complete
    assert [w.matrix for w in found.witnesses] == [identity(2)]


def test_consistent_permutations_non_spanning():
    key = OwfKey(q=2, n=2, vectors=((1, 0), (1, 0)))
    found = consistent_permutations(key)
    assert found.complete
    assert sorted(w.matrix for w in found.witnesses) == sorted(
        [identity(2), ((1, 1), (0, 1))]
    )


def test_consistent_permutations_cap():
    key = OwfKey(q=2, n=2, vectors=((1, 0), (0, 1), (1, 1)))
    found = consistent_permutations(key, cap=2)
    assert not found.complete
    assert len(found.witnesses) == 2


@pytest.mark.parametrize("q", [2, 3])
def test_witness_count_matches_gl_scan(q):
    """Cross-oracle: witness matrices equal {K in GL_2 : K*V = V as multisets}."""
    rng = Random(70 + q)
    gl = list(enumerate_invertible(2, q))
    for _ in range(20):
        key = keygen(q, 2, delta=rng.randrange(0, 4), rng=rng)
        sorted_v = sorted(key.vectors)
        scan = {
            k for k in gl if sorted(mat_vec(k, v, q) for v in key.vectors) == sorted_v
        }
        found = consistent_permutations(key)
        assert found.complete
        assert {w.matrix for w in found.witnesses} == scan


def test_is_injective_examples():
    assert not is_injective(TRIPLE)
    assert is_injective(WEIGHTED)
    assert not is_injective(OwfKey(q=2, n=2, vectors=((1, 0), (1, 0), (1, 0))))


@pytest.mark.parametrize("q", [2, 3])
def test_is_injective_matches_collision_definition(q):
    """Oracle: scan all pairs M != M' in GL_2 for evaluate collisions."""
    rng = Random(40 + q)
    gl = list(enumerate_invertible(2, q))
    for _ in range(25):
        key = keygen(q, 2, delta=rng.randrange(0, 4), rng=rng)
        images = [tuple(sorted(mat_vec(m, v, q) for v in key.vectors)) for m in gl]
        has_collision = len(set(images)) < len(gl)
        assert is_injective(key) == (not has_collision)


def test_invert_backtracking_roundtrip():
    rng = Random(17)
    for _ in range(20):
        key = random_injective_key(2, 3, rng)
        m = random_invertible(3, 2, rng)
        assert invert_backtracking(key, evaluate(key, m)) == m


def test_invert_backtracking_not_in_image():
    key = OwfKey(q=2, n=2, vectors=((1, 0), (0, 1), (1, 1)))
    # zero vector cannot be hit by an invertible matrix from nonzero inputs
    bad = OwfImage(((0, 0), (0, 1), (1, 0)))
    assert invert_backtracking(key, bad) is None


def test_invert_backtracking_non_injective_key_returns_some_preimage():
    rng = Random(23)
    m = random_invertible(2, 2, rng)
    img = evaluate(TRIPLE, m)
    got = invert_backtracking(TRIPLE, img)
    assert got is not None
    assert evaluate(TRIPLE, got) == img


def test_invert_backtracking_budget():
    rng = Random(2)
    key = keygen(2, 4, delta=8, rng=rng)
    img = evaluate(key, random_invertible(4, 2, rng))
    with pytest.raises(BudgetExceededError):
        invert_backtracking(key, img, node_budget=2)


@pytest.mark.parametrize("q", [2, 3])
def test_inverters_agree(q):
    rng = Random(50 + q)
    for _ in range(50):
        key = keygen(q, 2, delta=rng.randrange(0, 4), rng=rng)
        m = random_invertible(2, q, rng)
        img = evaluate(key, m)
        bt = invert_backtracking(key, img)
        ex = invert_exhaustive(key, img)
        assert bt is not None and ex is not None
        assert evaluate(key, bt) == img == evaluate(key, ex)
        if is_injective(key):
            assert bt == ex == m


def test_invert_exhaustive_identity_image():
    img = OwfImage(tuple(sorted(WEIGHTED.vectors)))
    assert invert_exhaustive(WEIGHTED, img) == identity(2)


def test_roundtrip_exhaustive_over_gl2():
    """For an injective key, every matrix in GL_2(F_2) round-trips exactly."""
    for m in enumerate_invertible(2, 2):
        assert invert_backtracking(WEIGHTED, evaluate(WEIGHTED, m)) == m


def test_invert_exhaustive_rejects_random_multiset():
    rng = Random(31)
    key = keygen(2, 2, delta=2, rng=rng)
    while True:
        fake = OwfImage(tuple(sorted(tuple(rng.randrange(2) for _ in range(2)) for _ in range(key.m))))
        if all(evaluate(key, m) != fake for m in enumerate_invertible(2, 2)):
            break
    assert invert_exhaustive(key, fake) is None


def test_self_reduce_perfect_inverter_first_try():
    rng = Random(61)
    key = random_injective_key(2, 3, rng)
    m = random_invertible(3, 2, rng)
    img = evaluate(key, m)
    calls = []

    def perfect(k, w):
        calls.append(1)
        return invert_backtracking(k, w)

    assert self_reduce(perfect, key, img, trials=10, rng=rng) == m
    assert len(calls) == 1


def test_self_reduce_always_failing_inverter():
    rng = Random(62)
    key = random_injective_key(2, 3, rng)
    img = evaluate(key, random_invertible(3, 2, rng))
    calls = []

    def failing(k, w):
        calls.append(1)
        return None

    assert self_reduce(failing, key, img, trials=7, rng=rng) is None
    assert len(calls) == 7


def test_self_reduce_crippled_inverter():
    """Base inverter succeeds only when the preimage's top-left entry is 1."""
    rng = Random(63)
    key = random_injective_key(2, 3, rng)

    def crippled(k, w):
        m = invert_backtracking(k, w)
        if m is not None and m[0][0] == 1:
            return m
        return None

    wins = 0
    for _ in range(25):
        # targets the base inverter refuses outright: top-left entry is 0
        while True:
            target = random_invertible(3, 2, rng)
            if target[0][0] == 0:
                break
        img = evaluate(key, target)
        got = self_reduce(crippled, key, img, trials=100, rng=rng)
        if got is not None and evaluate(key, got) == img:
            wins += 1
    assert wins == 25


def test_orbit_randomize_roundtrip():
    rng = Random(64)
    for _ in range(20):
        key = random_injective_key(2, 3, rng)
        m = random_invertible(3, 2, rng)
        img = evaluate(key, m)
        key2, img2, b = orbit_randomize(key, img, rng)
        assert img2 == img
        assert key2.vectors == tuple(mat_vec(b, v, 2) for v in key.vectors)
        m2 = invert_backtracking(key2, img2)
        assert m2 is not None
        recovered = mat_mul(m2, b, 2)
        assert evaluate(key, recovered) == img


def test_injectivity_experiment_deterministic():
    a = injectivity_experiment(2, 3, [0, 2], trials=30, seed=5)
    b = injectivity_experiment(2, 3, [0, 2], trials=30, seed=5)
    assert a == b
    assert all(p.trials == 30 and p.m == 3 + p.delta for p in a)


def test_image_sorted_invariant():
    with pytest.raises(ValueError):
        OwfImage(((1, 0), (0, 1)))
