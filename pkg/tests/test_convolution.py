import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from artifact.convolution import (A_INF, INFINITY, ConvContext, ConvElement, PreconditionError, bch,
                                  bch_series, bracket, differential, filtration_degree, gauge_act,
                                  is_mc, mc_defect, star, twist)
from artifact.exactcore import ALGEBRA, COALGEBRA, GradedSpace, compose_at
from artifact.fixtures import family_space, heisenberg, random_c_infinity, random_element
from artifact.oracles import dynkin_bch, stasheff_violation, tree_series_expansion
from artifact.pipeline import coalgebra_structure
from artifact.structures import commutative_context, from_binary_algebra, shifted_binary

F = Fraction
seeds = st.integers(0, 10 ** 6)
orientations = st.sampled_from([ALGEBRA, COALGEBRA])


def _ctx(family="dim3-odd", orientation=ALGEBRA, N=4):
    return ConvContext(family_space(family, orientation), orientation, A_INF, N)


def _mc(ctx, rng):
    return random_c_infinity(commutative_context(ctx), rng).in_context(ctx)


def test_star_with_zero():
    ctx = _ctx()
    f = random_element(ctx, 0, random.Random(1))
    assert star(f, ConvElement.zero(ctx, 0)).is_zero()


def test_star_binary_components_is_two_composites():
    ctx = _ctx(N=3)
    rng = random.Random(2)
    f = random_element(ctx, -1, rng, lo=2, hi=2, density=0.6)
    g = random_element(ctx, 0, rng, lo=2, hi=2, density=0.6)
    fg = star(f, g)
    assert fg.arities() == [3]
    fc, gc = f.component(2), g.component(2)
    assert fg.component(3) == compose_at(fc, gc, 1) + compose_at(fc, gc, 2)


def test_star_truncates():
    ctx = _ctx(N=3)
    rng = random.Random(3)
    f = random_element(ctx, 0, rng, lo=3, hi=3, density=0.6)
    assert star(f, f).is_zero()


@given(seeds)
def test_odd_self_bracket(seed):
    ctx = _ctx()
    f = random_element(ctx, -1, random.Random(seed), density=0.3)
    assert bracket(f, f) == star(f, f).scale(2)


@given(seeds, orientations)
def test_antisymmetry_and_jacobi(seed, orientation):
    rng = random.Random(seed)
    ctx = _ctx(rng.choice(["dim2", "dim3", "dim3-odd"]), orientation)
    x, y, z = (random_element(ctx, rng.choice([-1, 0, 1]), rng, density=0.3) for _ in range(3))
    s = (-1) ** (x.degree * y.degree % 2)
    assert bracket(x, y) == bracket(y, x).scale(-s)
    jac = bracket(x, bracket(y, z)) - bracket(bracket(x, y), z) - bracket(y, bracket(x, z)).scale(s)
    assert jac.is_zero()


def test_mc_zero():
    assert mc_defect(ConvElement.zero(_ctx(), -1)).is_zero()


def _algebra_on(entries, names_degrees, N=4):
    V = GradedSpace.from_pairs(names_degrees)
    ctx = ConvContext(V, ALGEBRA, A_INF, N)
    return ConvElement(ctx, {2: shifted_binary(entries, V, ALGEBRA)}, -1)


def test_associative_product_is_mc():
    # t·t = t², everything else 0: the truncated polynomial pattern
    x = _algebra_on({(0, 0): {1: 1}}, [["t", 0], ["t2", 0]])
    assert is_mc(x)
    assert stasheff_violation(x) is None


def test_non_associative_product_is_not_mc():
    # e·e = e, f·e = f, e·f = e: (f·e)·f = 0 but f·(e·f) = f
    x = _algebra_on({(0, 0): {0: 1}, (1, 0): {1: 1}, (0, 1): {0: 1}}, [["e", 0], ["f", 0]])
    assert mc_defect(x).arities() == [3]
    assert stasheff_violation(x) is not None


def test_mc_defect_rejects_wrong_degree():
    with pytest.raises(PreconditionError):
        mc_defect(random_element(_ctx(), 0, random.Random(0)))


@given(seeds)
def test_mc_agrees_with_stasheff_relations(seed):
    rng = random.Random(seed)
    ctx = _ctx(rng.choice(["dim2", "dim3-odd"]), ALGEBRA, 4)
    if rng.random() < 0.5:
        x = _mc(ctx, rng)
    else:
        x = random_element(ctx, -1, rng, density=0.15, lo=2, hi=rng.randint(2, 4))
    v = stasheff_violation(x)
    assert is_mc(x) == (v is None)
    if v is not None:
        assert v[0] == min(mc_defect(x).arities())


@given(seeds)
def test_twist_by_zero(seed):
    ctx = _ctx()
    assert twist(ctx, ConvElement.zero(ctx, -1)).same_as(ctx)


@given(seeds, orientations)
def test_twisted_differential_squares_to_zero(seed, orientation):
    rng = random.Random(seed)
    ctx = _ctx(rng.choice(["dim2", "dim3-odd"]), orientation)
    tctx = twist(ctx, _mc(ctx, rng))
    f = random_element(tctx, rng.choice([-1, 0, 1]), rng, density=0.3, lo=1)
    assert differential(differential(f)).is_zero()


@given(seeds, orientations)
def test_mc_after_twist(seed, orientation):
    rng = random.Random(seed)
    ctx = _ctx(rng.choice(["dim2", "dim3-odd"]), orientation)
    x = _mc(ctx, rng)
    tctx = twist(ctx, x)
    y = random_element(ctx, -1, rng, density=0.2) if rng.random() < 0.5 else _mc(ctx, rng)
    moved = (y - x).in_context(tctx)
    # the twisted defect of y − x is the defect of y
    assert mc_defect(moved).in_context(ctx) == mc_defect(y)
    assert is_mc(moved) == is_mc(y)


def test_twist_rejects_non_mc():
    ctx = _ctx()
    x = random_element(ctx, -1, random.Random(5), density=0.5)
    assert not is_mc(x)
    with pytest.raises(PreconditionError):
        twist(ctx, x)


def test_bch_unit():
    ctx = _ctx()
    a = random_element(ctx, 0, random.Random(7), density=0.4)
    assert bch(a, ConvElement.zero(ctx, 0)) == a
    assert bch(ConvElement.zero(ctx, 0), a) == a


@given(seeds)
def test_bch_second_order(seed):
    # at arity_max 3 every double bracket of arity-2 elements is truncated
    rng = random.Random(seed)
    ctx = _ctx("dim3", rng.choice([ALGEBRA, COALGEBRA]), 3)
    a = random_element(ctx, 0, rng, lo=2, hi=2, density=0.5)
    b = random_element(ctx, 0, rng, lo=2, hi=2, density=0.5)
    assert bch(a, b) == a + b + bracket(a, b).scale(F(1, 2))


def test_bch_series_matches_dynkin():
    assert tree_series_expansion(bch_series(5)) == dynkin_bch(5)


def test_bch_weight_three_coefficients():
    series = dict(bch_series(3))
    assert series[(0, (0, 1))] == F(1, 12)
    # [[X,Y],Y] = −[Y,[X,Y]]
    assert series[((0, 1), 1)] == F(1, 12)
    expected = tree_series_expansion([((0, (0, 1)), F(1, 12)), ((1, (0, 1)), F(-1, 12))])
    assert {w: c for w, c in dynkin_bch(3).items() if len(w) == 3} == expected


# BCH on strictly upper triangular matrices, where exp and log are finite sums

def _mm(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def _madd(a, b, c=1):
    return [[x + c * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _series(a, coeffs):
    n = len(a)
    out = [[F(0)] * n for _ in range(n)]
    power = [[F(int(i == j)) for j in range(n)] for i in range(n)]
    for c in coeffs:
        out = _madd(out, power, c)
        power = _mm(power, a)
    return out


def _mexp(a):
    fact = [F(1)]
    for k in range(1, len(a) + 1):
        fact.append(fact[-1] / k)
    return _series(a, fact)


def _mlog(a):
    # log(1 + u) with u nilpotent
    n = len(a)
    u = _madd(a, [[F(int(i == j)) for j in range(n)] for i in range(n)], -1)
    return _series(u, [F(0)] + [F((-1) ** (k + 1), k) for k in range(1, n + 1)])


def _eval(tree, x, y):
    if not isinstance(tree, tuple):
        return x if tree == 0 else y
    a, b = _eval(tree[0], x, y), _eval(tree[1], x, y)
    return _madd(_mm(a, b), _mm(b, a), -1)


@given(seeds)
def test_bch_series_on_nilpotent_matrices(seed):
    rng = random.Random(seed)
    n = 5
    x, y = ([[F(rng.randint(-3, 3)) if j > i else F(0) for j in range(n)] for i in range(n)]
            for _ in range(2))
    expected = _mlog(_mm(_mexp(x), _mexp(y)))
    total = [[F(0)] * n for _ in range(n)]
    for tree, c in bch_series(n - 1):
        total = _madd(total, _eval(tree, x, y), c)
    assert total == expected


def test_gauge_by_zero():
    ctx = _ctx()
    x = _mc(ctx, random.Random(11))
    assert gauge_act(ConvElement.zero(ctx, 0), x) == x


def test_gauge_leading_term():
    # coalgebra structure of the Heisenberg CE chains: base differential in arity 1
    m = coalgebra_structure(heisenberg())
    x = m.mc
    assert x.ctx.differential
    rng = random.Random(12)
    a = random_element(x.ctx, 0, rng, lo=2, hi=2, density=0.2)
    assert filtration_degree(x) == filtration_degree(a) == 1
    rest = gauge_act(a, x) - (x - differential(a))
    assert filtration_degree(rest) >= 2


@given(seeds, orientations)
def test_gauge_preserves_mc_and_composes(seed, orientation):
    rng = random.Random(seed)
    ctx = _ctx(rng.choice(["dim2", "dim3-odd"]), orientation)
    x = _mc(ctx, rng)
    a = random_element(ctx, 0, rng, density=0.3)
    b = random_element(ctx, 0, rng, density=0.3)
    assert is_mc(gauge_act(a, x))
    assert gauge_act(bch(a, b), x) == gauge_act(a, gauge_act(b, x))
    assert bch(a, a.scale(-1)).is_zero()


def test_gauge_preconditions():
    ctx = _ctx()
    x = _mc(ctx, random.Random(13))
    with pytest.raises(PreconditionError):
        gauge_act(random_element(ctx, 0, random.Random(1), lo=1, hi=1, density=1.0), x)
    with pytest.raises(PreconditionError):
        gauge_act(random_element(ctx, 0, random.Random(1)), random_element(ctx, -1, random.Random(2)))


def test_filtration_degree():
    ctx = _ctx(N=5)
    rng = random.Random(0)
    assert filtration_degree(ConvElement.zero(ctx)) == INFINITY
    assert filtration_degree(random_element(ctx, 0, rng, lo=2, hi=3, density=1.0)) == 1
    assert filtration_degree(random_element(ctx, 0, rng, lo=5, hi=5, density=1.0)) == 4
