import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from artifact.exactcore import (ALGEBRA, GradedSpace, MultilinearMap, Vector, apply, compose_at,
                                format_rational, identity_map, koszul_sign, parse_rational, zero_map)
from artifact.oracles import koszul_sign_by_transpositions


@st.composite
def perms_with_degrees(draw):
    n = draw(st.integers(1, 7))
    perm = draw(st.permutations(range(n)))
    degrees = draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n))
    return perm, degrees


def test_koszul_identity():
    assert koszul_sign([0, 1, 2, 3], [1, 1, 3, -1]) == 1


def test_koszul_swap_odd():
    assert koszul_sign([1, 0], [1, 1]) == -1


def test_koszul_three_cycle():
    # factor 1 -> slot 2, 2 -> 3, 3 -> 1
    assert koszul_sign([1, 2, 0], [1, 1, 2]) == 1
    assert koszul_sign_by_transpositions([1, 2, 0], [1, 1, 2]) == 1


@given(perms_with_degrees())
def test_koszul_matches_bubble_sort(pd):
    perm, degrees = pd
    assert koszul_sign(perm, degrees) == koszul_sign_by_transpositions(perm, degrees)


def test_koszul_rejects_non_permutation():
    with pytest.raises(ValueError):
        koszul_sign([0, 0], [1, 1])


@given(st.fractions())
def test_rational_round_trip(q):
    assert parse_rational(format_rational(q)) == q


def test_format_rational_integers():
    assert format_rational(Fraction(4, 1)) == "4"
    assert format_rational(Fraction(-3, 6)) == "-1/2"


def test_space_lookup():
    V = GradedSpace.from_pairs([["a", 0], ["b", 1]])
    assert V.index("b") == 1 and V.degree(1) == 1
    assert V.shift(1).degrees == (1, 2)
    with pytest.raises(KeyError, match="unknown basis element"):
        V.index("c")
    with pytest.raises(ValueError):
        GradedSpace.from_pairs([["a", 0], ["a", 1]])


def test_compose_with_identity_is_unit():
    V = GradedSpace.from_pairs([["a", 0], ["b", 1]])
    g = MultilinearMap(2, V, 0, {(0, 1): {1: 1}, (1, 0): {1: -1}})
    assert compose_at(identity_map(V), g, 1) == g


def test_compose_one_dim_product():
    V = GradedSpace.from_pairs([["a", 0]])
    f = MultilinearMap(2, V, 0, {(0, 0): {0: 1}})
    h = compose_at(f, f, 1)
    assert h.arity == 3 and h.entries == {(0, 0, 0): {0: 1}}


def test_compose_koszul_prefactor():
    V = GradedSpace.from_pairs([["a", 1]])
    f = MultilinearMap(2, V, -1, {(0, 0): {0: 1}})
    h = compose_at(f, f, 2)
    assert h.entries == {(0, 0, 0): {0: -1}}


def _random_map(rng, V, arity, degree):
    entries = {}
    for _ in range(4):
        key = tuple(rng.randrange(V.dim) for _ in range(arity))
        target = sum(V.degree(i) for i in key) + degree
        outs = [j for j in range(V.dim) if V.degree(j) == target]
        if outs:
            entries.setdefault(key, {})[rng.choice(outs)] = Fraction(rng.randint(-3, 3))
    return MultilinearMap(arity, V, degree, entries)


@given(st.integers(0, 10 ** 6))
def test_compose_matches_evaluation(seed):
    # (f ∘_i g)(x) = ± f(x_1, .., g(x_i, ..), ..), evaluated on basis vectors
    rng = random.Random(seed)
    V = GradedSpace.from_pairs([["a", 0], ["b", 1], ["c", 1], ["d", 2]])
    p, q = rng.randint(1, 3), rng.randint(1, 3)
    f = _random_map(rng, V, p, rng.randint(-1, 1))
    g = _random_map(rng, V, q, rng.randint(-1, 1))
    i = rng.randint(1, p)
    h = compose_at(f, g, i)
    h.validate()
    args = [Vector.basis_vector(V, rng.randrange(V.dim)) for _ in range(p + q - 1)]
    inner = apply(g, args[i - 1:i - 1 + q])
    sign = (-1) ** ((g.degree * sum(a.degree() for a in args[:i - 1])) % 2)
    expected = apply(f, args[:i - 1] + [inner] + args[i - 1 + q:]).scale(sign)
    assert apply(h, args) == expected


def test_apply_zero_map():
    V = GradedSpace.from_pairs([["e1", 0], ["e2", 0]])
    v = Vector.basis_vector(V, "e1")
    assert apply(zero_map(V, 2, 0), [v, v]).is_zero()


def test_apply_table_lookup_and_bilinearity():
    V = GradedSpace.from_pairs([["e1", 0], ["e2", 0]])
    f = MultilinearMap(2, V, 0, {(0, 0): {1: 1}})
    e1, e2 = Vector.basis_vector(V, "e1"), Vector.basis_vector(V, "e2")
    assert apply(f, [e1, e1]) == e2
    assert apply(f, [e1 + e2, e1]) == e2


def test_validate_rejects_wrong_degree():
    V = GradedSpace.from_pairs([["a", 0], ["b", 1]])
    with pytest.raises(ValueError, match="homogeneity"):
        MultilinearMap(2, V, 0, {(0, 0): {1: 1}}, ALGEBRA).validate()
