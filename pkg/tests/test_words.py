import random
from fractions import Fraction
from itertools import permutations, product
from math import comb, factorial

import pytest
from hypothesis import given, strategies as st

from artifact.exactcore import GradedSpace, MultilinearMap
from artifact.linalg import Echelon, kernel, rank
from artifact.oracles import first_eulerian_closed_form, stirling_first
from artifact.words import (GroupAlgebraElement, act_on_inputs, compose, eulerian_idempotents,
                            is_lyndon, lyndon_basis, right_multiplication_rank, shuffle_sum)

F = Fraction


def _brute_force_shuffles(p, q):
    # a (p,q)-shuffle is a permutation increasing on the first p and the last q places
    n = p + q
    return {s for s in permutations(range(n))
            if list(s[:p]) == sorted(s[:p]) and list(s[p:]) == sorted(s[p:])}


def test_shuffle_sum_small():
    assert shuffle_sum(1, 1) == GroupAlgebraElement(2, {(0, 1): 1, (1, 0): 1})
    assert len(shuffle_sum(2, 1).terms) == comb(3, 1)
    assert len(shuffle_sum(2, 2).terms) == 6


@pytest.mark.parametrize("p,q", [(1, 2), (2, 2), (1, 3), (2, 3)])
def test_shuffle_sum_matches_enumeration(p, q):
    sh = shuffle_sum(p, q)
    assert set(sh.terms) == _brute_force_shuffles(p, q)
    assert set(sh.terms.values()) == {1}


def test_eulerian_n1_n2():
    assert eulerian_idempotents(1) == [GroupAlgebraElement.identity(1)]
    e1, e2 = eulerian_idempotents(2)
    assert e1 == GroupAlgebraElement(2, {(0, 1): F(1, 2), (1, 0): F(-1, 2)})
    assert e2 == GroupAlgebraElement(2, {(0, 1): F(1, 2), (1, 0): F(1, 2)})


# e^{(1)}_3 frozen from the descent-count oracle before the build
E1_N3 = {(0, 1, 2): F(1, 3), (2, 1, 0): F(1, 3), (0, 2, 1): F(-1, 6),
         (1, 0, 2): F(-1, 6), (1, 2, 0): F(-1, 6), (2, 0, 1): F(-1, 6)}


def test_eulerian_n3_frozen_table():
    assert eulerian_idempotents(3)[0].terms == E1_N3
    assert first_eulerian_closed_form(3) == E1_N3


@pytest.mark.parametrize("n", range(2, 7))
def test_first_idempotent_matches_closed_form(n):
    assert eulerian_idempotents(n)[0].terms == first_eulerian_closed_form(n)


@pytest.mark.parametrize("n", range(1, 6))
def test_ranks_are_stirling_numbers(n):
    for k, e in enumerate(eulerian_idempotents(n), start=1):
        assert right_multiplication_rank(e) == stirling_first(n, k)


def test_rank_first_idempotent_n6_by_trace():
    e1 = eulerian_idempotents(6)[0]
    assert factorial(6) * e1.coefficient(range(6)) == factorial(5)


@pytest.mark.parametrize("n", range(2, 6))
def test_first_idempotent_kills_shuffles(n):
    e1 = eulerian_idempotents(n)[0]
    for p in range(1, n):
        assert (e1 * shuffle_sum(p, n - p)).is_zero()


def test_eulerian_rejects_out_of_range():
    with pytest.raises(ValueError):
        eulerian_idempotents(0)
    with pytest.raises(ValueError):
        eulerian_idempotents(9)


def _space():
    return GradedSpace.from_pairs([["a", 0], ["b", 1], ["c", 1]])


def test_act_identity_and_swap():
    V = GradedSpace.from_pairs([["x", 0], ["y", 0]])
    f = MultilinearMap(2, V, 0, {(0, 1): {0: 1}, (0, 0): {1: 2}})
    assert act_on_inputs(GroupAlgebraElement.identity(2), f) == f
    g = act_on_inputs(GroupAlgebraElement.perm((1, 0)), f)
    assert g.entries == {(1, 0): {0: 1}, (0, 0): {1: 2}}


def test_first_idempotent_on_symmetric_and_antisymmetric():
    V = GradedSpace.from_pairs([["x", 0], ["y", 0]])
    e1 = eulerian_idempotents(2)[0]
    sym = MultilinearMap(2, V, 0, {(0, 1): {0: 1}, (1, 0): {0: 1}})
    anti = MultilinearMap(2, V, 0, {(0, 1): {0: 1}, (1, 0): {0: -1}})
    assert act_on_inputs(e1, sym).is_zero()
    assert act_on_inputs(e1, anti) == anti


def _random_group_element(rng, n):
    perms = list(permutations(range(n)))
    return GroupAlgebraElement(n, {rng.choice(perms): rng.randint(-2, 2) for _ in range(3)})


def _random_map(rng, V, n):
    entries = {}
    for _ in range(5):
        key = tuple(rng.randrange(V.dim) for _ in range(n))
        entries.setdefault(key, {})[rng.randrange(V.dim)] = F(rng.randint(-3, 3))
    return MultilinearMap(n, V, 0, entries)


@given(st.integers(0, 10 ** 6), st.integers(2, 4))
def test_action_is_a_right_action(seed, n):
    rng = random.Random(seed)
    V = _space()
    a, b = _random_group_element(rng, n), _random_group_element(rng, n)
    f = _random_map(rng, V, n)
    assert act_on_inputs(a * b, f) == act_on_inputs(b, act_on_inputs(a, f))


@given(st.integers(0, 10 ** 6), st.integers(2, 4))
def test_action_is_linear(seed, n):
    rng = random.Random(seed)
    V = _space()
    a, b = _random_group_element(rng, n), _random_group_element(rng, n)
    f = _random_map(rng, V, n)
    assert act_on_inputs(a + b, f) == act_on_inputs(a, f) + act_on_inputs(b, f)


def test_action_arity_mismatch():
    V = _space()
    with pytest.raises(ValueError):
        act_on_inputs(GroupAlgebraElement.identity(3), MultilinearMap(2, V, 0, {}))


def _brute_force_lyndon(n):
    return sorted(w for w in permutations(range(1, n + 1))
                  if all(w < w[i:] + w[:i] for i in range(1, n)))


def test_lyndon_small():
    assert lyndon_basis(2).words == [(1, 2)]
    assert lyndon_basis(3).words == [(1, 2, 3), (1, 3, 2)]
    assert len(lyndon_basis(5)) == 24


@pytest.mark.parametrize("n", range(1, 7))
def test_lyndon_count_and_rotation_check(n):
    basis = lyndon_basis(n)
    assert basis.words == _brute_force_lyndon(n)
    assert len(basis) == factorial(n - 1)
    assert all(is_lyndon(w) for w in basis.words)


@pytest.mark.parametrize("n", range(2, 6))
def test_lyndon_brackets_independent_and_in_image_of_e1(n):
    elems = lyndon_basis(n).elements()
    assert rank([e.terms for e in elems]) == factorial(n - 1)
    # elements() places letter w_k at position k, the inverse of the word as a
    # permutation; read back as words, Lie elements are fixed by e^{(1)} on the right
    e1 = eulerian_idempotents(n)[0]
    assert all(x.antipode() * e1 == x.antipode() for x in elems)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_shuffle_annihilator_is_lie_dual(n):
    # maps with a single output slot; a coordinate of the map is one tuple key
    V = GradedSpace.from_pairs([["a", 0], ["b", 1]])
    keys = list(product(range(V.dim), repeat=n))
    basis = [MultilinearMap(n, V, 0, {k: {0: F(1)}}) for k in keys]
    shuffles = [shuffle_sum(p, n - p) for p in range(1, n)]

    def shuffle_image(f):
        out = {}
        for p, sh in enumerate(shuffles):
            for key, vec in act_on_inputs(sh, f).entries.items():
                out[(p, key)] = vec.get(0, 0)
        return out

    lie = Echelon()
    for e in lyndon_basis(n).elements():
        lie.insert(e.terms)
    perms = list(permutations(range(n)))

    def lie_defect(f):
        # for each key, Σ_σ act(σ, f)[key] σ reduced modulo Lie(n)
        per_key = {}
        for s in perms:
            for key, vec in act_on_inputs(GroupAlgebraElement.perm(s), f).entries.items():
                per_key.setdefault(key, {})[s] = vec.get(0, 0)
        out = {}
        for key, vec in per_key.items():
            rem, _ = lie.reduce({s: c for s, c in vec.items() if c})
            out.update({(key, s): c for s, c in rem.items() if c})
        return out

    k1 = kernel([shuffle_image(f) for f in basis])
    k2 = kernel([lie_defect(f) for f in basis])
    assert len(k1) == len(k2) > 0
    assert rank(k1 + k2) == len(k1)


def test_group_algebra_mixing_sizes_fails():
    with pytest.raises(ValueError):
        GroupAlgebraElement.identity(2) + GroupAlgebraElement.identity(3)


def test_product_convention():
    s, t = (1, 2, 0), (0, 2, 1)
    assert GroupAlgebraElement.perm(s) * GroupAlgebraElement.perm(t) == GroupAlgebraElement.perm(compose(s, t))
    assert compose(s, t) == tuple(s[t[i]] for i in range(3))
