"""Wreath product arithmetic, block embedding, hidden shift and HSP promises.

Everything here is exhaustive at n = 2, q = 2 (72 group elements).
"""

import warnings
from random import Random

import pytest

from mvowf.field import (
    enumerate_invertible,
    identity,
    mat_inverse,
    mat_mul,
    rank,
    random_invertible,
)
from mvowf.owf import OwfImage, OwfKey, evaluate
from mvowf.wreath import (
    HspInstance,
    WreathElement,
    embed_gl2n,
    enumerate_wreath,
    make_hidden_shift,
    make_hsp_oracle,
    verify_hsp_promise,
    wreath_identity,
    wreath_inverse,
    wreath_mul,
)

Q, N = 2, 2
INJECTIVE_KEY = OwfKey(q=2, n=2, vectors=((1, 0), (0, 1), (0, 1), (1, 1), (1, 1), (1, 1)))
NON_INJECTIVE_KEY = OwfKey(q=2, n=2, vectors=((1, 0), (0, 1), (1, 1)))


@pytest.fixture(scope="module")
def elements():
    els = list(enumerate_wreath(N, Q))
    assert len(els) == 72
    return els


def test_identity_and_inverses(elements):
    e = wreath_identity(N)
    for x in elements:
        assert wreath_mul(e, x, Q) == x
        assert wreath_mul(x, e, Q) == x
        assert wreath_mul(x, wreath_inverse(x, Q), Q) == e
        assert wreath_mul(wreath_inverse(x, Q), x, Q) == e


def test_embed_is_homomorphism(elements):
    embeds = {x: embed_gl2n(x) for x in elements}
    for x in elements:
        for y in elements:
            assert embeds.get(wreath_mul(x, y, Q)) == mat_mul(embeds[x], embeds[y], Q)


def test_embed_injective_and_invertible(elements):
    images = {embed_gl2n(x) for x in elements}
    assert len(images) == 72
    for m in images:
        assert rank(m, Q) == 2 * N
    assert embed_gl2n(wreath_identity(N)) == identity(2 * N)


def test_alpha_is_involution():
    rng = Random(2)
    for _ in range(10):
        m = random_invertible(N, Q, rng)
        alpha = WreathElement(mat_inverse(m, Q), m, 1)
        assert wreath_mul(alpha, alpha, Q) == wreath_identity(N)


def test_hidden_shift_promise_exhaustive():
    rng = Random(3)
    m = random_invertible(N, Q, rng)
    inst = make_hidden_shift(INJECTIVE_KEY, m)
    assert inst.shift == m
    for n_mat in enumerate_invertible(N, Q):
        assert inst.f2(n_mat) == inst.f1(mat_mul(n_mat, m, Q))
    assert inst.f1(identity(N)) == OwfImage(tuple(sorted(INJECTIVE_KEY.vectors)))
    assert inst.f2(identity(N)) == evaluate(INJECTIVE_KEY, m)


def test_hsp_oracle_values_and_cosets(elements):
    rng = Random(4)
    m = random_invertible(N, Q, rng)
    inst = make_hsp_oracle(INJECTIVE_KEY, m)
    e, alpha = inst.subgroup
    assert e == wreath_identity(N)
    assert wreath_mul(alpha, alpha, Q) == e
    assert inst.f(e) == (
        OwfImage(tuple(sorted(INJECTIVE_KEY.vectors))),
        evaluate(INJECTIVE_KEY, m),
    )
    # constant on right cosets
    for x in elements:
        assert inst.f(wreath_mul(x, alpha, Q)) == inst.f(x)


def test_hsp_collisions_only_within_cosets(elements):
    rng = Random(5)
    m = random_invertible(N, Q, rng)
    inst = make_hsp_oracle(INJECTIVE_KEY, m)
    values = [inst.f(x) for x in elements]
    _, alpha = inst.subgroup
    for i, x in enumerate(elements):
        for j, y in enumerate(elements):
            if values[i] == values[j] and i != j:
                assert wreath_mul(x, alpha, Q) == y


def test_verify_hsp_promise():
    rng = Random(6)
    m = random_invertible(N, Q, rng)
    assert verify_hsp_promise(make_hsp_oracle(INJECTIVE_KEY, m), N, Q)


def test_non_injective_key_breaks_promise():
    rng = Random(7)
    m = random_invertible(N, Q, rng)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        inst = make_hsp_oracle(NON_INJECTIVE_KEY, m)
    assert any("injective" in str(w.message) for w in caught)
    assert not verify_hsp_promise(inst, N, Q)


def test_swap_composition_convention():
    rng = Random(8)
    a1, a2 = random_invertible(N, Q, rng), random_invertible(N, Q, rng)
    b1, b2 = random_invertible(N, Q, rng), random_invertible(N, Q, rng)
    x = WreathElement(a1, a2, 1)
    y = WreathElement(b1, b2, 0)
    assert wreath_mul(x, y, Q) == WreathElement(mat_mul(a1, b2, Q), mat_mul(a2, b1, Q), 1)
