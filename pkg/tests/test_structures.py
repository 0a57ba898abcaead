import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from artifact.convolution import (A_INF, C_INF, SU_A_INF, SU_C_INF, ConvContext, ConvElement,
                                  PreconditionError, bch, bracket, differential, filtration_degree,
                                  gauge_act, is_mc, star)
from artifact.exactcore import ALGEBRA, COALGEBRA, GradedSpace, MultilinearMap
from artifact.fixtures import family_space, random_c_infinity, random_element, random_small_element
from artifact.structures import (InftyStructure, Isotopy, StructureError, commutative_context,
                                 compose_isotopies, flavor_violation, from_binary_algebra,
                                 gauge_from_isotopy, harrison_check, isotopy_from_gauge, mu0_entries,
                                 pbw_retraction, su_context, transport_structure)
from artifact.words import act_on_inputs, shuffle_sum

F = Fraction
seeds = st.integers(0, 10 ** 6)
orientations = st.sampled_from([ALGEBRA, COALGEBRA])


def _ctx(family="dim3-odd", orientation=ALGEBRA, N=4):
    return ConvContext(family_space(family, orientation), orientation, A_INF, N)


# classical structures

def test_one_dim_zero_product():
    V = GradedSpace.from_pairs([["x", 0]])
    m = from_binary_algebra(MultilinearMap(2, V, 0, {}), flavor=C_INF)
    assert m.mc.is_zero() and is_mc(m.mc)


def test_truncated_polynomial_product():
    V = GradedSpace.from_pairs([["t", 0], ["t2", 0]])
    m = from_binary_algebra(MultilinearMap(2, V, 0, {(0, 0): {1: 1}}), flavor=C_INF)
    assert is_mc(m.mc) and harrison_check(m.mc)[0]


def test_noncommutative_rejected_for_c_infinity():
    V = GradedSpace.from_pairs([["x", 0], ["y", 0], ["z", 0]])
    prod = MultilinearMap(2, V, 0, {(0, 1): {2: 1}})
    from_binary_algebra(prod, flavor=A_INF)
    with pytest.raises(StructureError) as info:
        from_binary_algebra(prod, flavor=C_INF)
    assert info.value.witness is not None


def test_non_associative_rejected_with_witness():
    V = GradedSpace.from_pairs([["e", 0], ["f", 0]])
    prod = MultilinearMap(2, V, 0, {(0, 0): {0: 1}, (1, 0): {1: 1}, (0, 1): {0: 1}})
    with pytest.raises(StructureError) as info:
        from_binary_algebra(prod)
    assert info.value.witness is not None


def test_dg_algebra_with_differential():
    # d b = a with zero product: Leibniz holds trivially
    V = GradedSpace.from_pairs([["a", 0], ["b", 1]])
    d = MultilinearMap(1, V, -1, {(1,): {0: 1}})
    m = from_binary_algebra(MultilinearMap(2, V, 0, {}), d, A_INF)
    assert m.context.differential == {1: {(1,): {0: 1}}}
    with pytest.raises(StructureError) as info:
        # a·a = a: d(a·b) = 0 but a·d(b) = a
        from_binary_algebra(MultilinearMap(2, V, 0, {(0, 0): {0: 1}}), d, A_INF)
    assert info.value.witness == ("leibniz", "a", "b")


def test_coalgebra_orientation():
    # Δ t2 = t ⊗ t: the mirror of the truncated polynomial algebra
    V = GradedSpace.from_pairs([["t", 0], ["t2", 0]])
    m = from_binary_algebra(MultilinearMap(2, V, 0, {(0, 0): {1: 1}}, COALGEBRA), flavor=C_INF)
    assert m.context.orientation == COALGEBRA and is_mc(m.mc)


# retraction

def test_retraction_binary_degree_zero():
    ctx = _ctx("dim3", ALGEBRA)
    assert ctx.degrees[:2] == (0, 0)
    f = ConvElement(ctx, {2: {(0, 1): {0: F(3)}, (0, 0): {1: F(2)}, (1, 0): {1: F(1)}}}, 0)
    s = pbw_retraction(f)
    assert s.comps == {2: {(0, 1): {0: F(3, 2), 1: F(-1, 2)}, (1, 0): {0: F(-3, 2), 1: F(1, 2)}}}


def test_retraction_of_zero():
    ctx = _ctx()
    assert pbw_retraction(ConvElement.zero(ctx)).is_zero()


@given(seeds, orientations)
def test_retraction_fixes_c_infinity_and_is_idempotent(seed, orientation):
    rng = random.Random(seed)
    ctx = _ctx(rng.choice(["dim2", "dim3", "dim3-odd"]), orientation)
    y = random_small_element(ctx, rng.choice([-1, 0, 1]), rng, density=0.3)
    assert pbw_retraction(y) == y
    x = random_element(ctx, rng.choice([-1, 0, 1]), rng, density=0.3)
    sx = pbw_retraction(x)
    assert pbw_retraction(sx) == sx
    assert harrison_check(sx)[0]
    assert filtration_degree(sx) >= filtration_degree(x)


@given(seeds, orientations)
def test_retraction_is_a_module_map(seed, orientation):
    rng = random.Random(seed)
    big = _ctx(rng.choice(["dim3", "dim3-odd"]), orientation, 4)
    small = commutative_context(big)
    x = random_element(big, rng.choice([-1, 0, 1]), rng, density=0.3)
    y = random_small_element(small, rng.choice([-1, 0, 1]), rng, density=0.3)
    assert pbw_retraction(bracket(x, y.in_context(big)), small) == bracket(pbw_retraction(x, small), y)


def test_retraction_rejects_other_space():
    with pytest.raises(PreconditionError):
        pbw_retraction(ConvElement.zero(_ctx("dim2")), commutative_context(_ctx("dim3")))


# strictly unital contexts

def test_su_unit_alone():
    V = GradedSpace.from_pairs([["1", 0]])
    ctx = su_context(V, "1")
    D = ctx.base_differential
    assert not D.is_zero() and star(D, D).is_zero()
    assert random_element(ctx, 0, random.Random(0), density=1.0).is_zero()


@given(seeds, orientations)
def test_su_differential_squares_to_zero(seed, orientation):
    rng = random.Random(seed)
    V = GradedSpace.from_pairs([["1", 0], ["x", rng.choice([0, 1])]])
    ctx = su_context(V, "1", SU_A_INF, orientation, 4)
    f = random_element(ctx, rng.choice([-1, 0, 1]), rng, density=0.5, hi=3)
    assert differential(differential(f)).is_zero()
    assert flavor_violation(pbw_retraction(f)) is None
    assert pbw_retraction(f).ctx.flavor == SU_C_INF


def test_strictly_unital_product_is_mu0():
    V = GradedSpace.from_pairs([["1", 0], ["x", 0]])
    prod = MultilinearMap(2, V, 0, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}})
    m = from_binary_algebra(prod, flavor=A_INF)
    assert m.mc.comps[2] == mu0_entries(V, 0, ALGEBRA)


def test_su_preconditions():
    V = GradedSpace.from_pairs([["1", 1], ["x", 0]])
    with pytest.raises(PreconditionError):
        su_context(V, "1")
    with pytest.raises(PreconditionError):
        su_context(V, "u")


# isotopies

def _structure(ctx, rng):
    return InftyStructure(random_c_infinity(commutative_context(ctx), rng).in_context(ctx))


def test_identity_isotopy():
    ctx = _ctx()
    m = _structure(ctx, random.Random(3))
    assert transport_structure(Isotopy.identity(ctx), m).mc == m.mc
    assert isotopy_from_gauge(ConvElement.zero(ctx)) == Isotopy.identity(ctx)


def test_binary_isotopy_on_zero_structure():
    ctx = _ctx("dim3", ALGEBRA, 4)
    a = random_element(ctx, 0, random.Random(4), lo=2, hi=2, density=0.5)
    phi = Isotopy(ctx, {2: a.comps[2]})
    assert transport_structure(phi, InftyStructure(ConvElement.zero(ctx, -1))).mc.is_zero()


@given(seeds, orientations)
def test_transport_equals_gauge_action(seed, orientation):
    rng = random.Random(seed)
    ctx = _ctx(rng.choice(["dim2", "dim3-odd"]), orientation)
    m = _structure(ctx, rng)
    a = random_element(ctx, 0, rng, density=0.3)
    assert transport_structure(isotopy_from_gauge(a), m).mc == gauge_act(a, m.mc)


@given(seeds, orientations)
def test_exponential_is_a_homomorphism(seed, orientation):
    rng = random.Random(seed)
    ctx = _ctx(rng.choice(["dim2", "dim3", "dim3-odd"]), orientation)
    a = random_element(ctx, 0, rng, density=0.3)
    b = random_element(ctx, 0, rng, density=0.3)
    assert isotopy_from_gauge(bch(a, b)) == compose_isotopies(isotopy_from_gauge(a), isotopy_from_gauge(b))
    assert gauge_from_isotopy(isotopy_from_gauge(a)) == a


def test_binary_gauge_gives_half_square():
    # a in arity 2 only: f_2 = a_2 and f_3 = ½ (a ⋆ a)_3 in the algebra orientation
    ctx = _ctx("dim3-odd", ALGEBRA, 3)
    a = random_element(ctx, 0, random.Random(6), lo=2, hi=2, density=0.5)
    phi = isotopy_from_gauge(a)
    assert phi.comps[2] == a.comps[2]
    assert ConvElement(ctx, {3: phi.comps.get(3, {})}, 0) == star(a, a).scale(F(1, 2))


def test_isotopy_from_gauge_preconditions():
    ctx = _ctx()
    with pytest.raises(PreconditionError):
        isotopy_from_gauge(random_element(ctx, -1, random.Random(0), density=0.5))


# Harrison condition

@given(seeds)
def test_harrison_accepts_retractions(seed):
    rng = random.Random(seed)
    x = random_element(_ctx(rng.choice(["dim2", "dim3"]), rng.choice([ALGEBRA, COALGEBRA])), 0, rng)
    assert harrison_check(pbw_retraction(x)) == (True, None)


def test_harrison_accepts_commutator():
    ctx = _ctx("dim3", ALGEBRA)
    f = ConvElement(ctx, {2: {(0, 1): {0: F(1)}, (1, 0): {0: F(-1)}}}, 0)
    assert harrison_check(f)[0]


def test_harrison_rejects_generic_arity_three():
    ctx = _ctx("dim3", ALGEBRA)
    f = random_element(ctx, 0, random.Random(8), lo=3, hi=3, density=0.5)
    ok, w = harrison_check(f)
    assert not ok
    p, q, key, out, c = w
    W = ctx.shifted
    image = act_on_inputs(shuffle_sum(p, q), f.component(3))
    assert image.entries[tuple(W.index(n) for n in key)][W.index(out)] == c != 0
