"""Seeded fixture families.

The stabilizer-corrupted family produces honest inputs for the rectification
pipeline: a C∞ structure m, a C∞ gauge h with y = exp(h)·m, and an A∞
stabilizer c of m that is not C∞; then a = BCH(h, c) is an A∞ gauge from m to
y that is not C∞.  Nothing about the descent theorem is assumed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .convolution import (A_INF, C_INF, ConvContext, ConvElement, PreconditionError, bch, bracket,
                          component_keys, exp_ad, gauge_act, mc_defect)
from .exactcore import ALGEBRA, COALGEBRA, GradedSpace, MultilinearMap
from .linalg import kernel, solve, span_basis
from .liealg import FiniteDgLie, WeightAlgebra, homotopy_completion_model
from .structures import (Isotopy, associative_context, commutative_context, harrison_check,
                         isotopy_from_gauge, pbw_retraction)


def random_element(ctx: ConvContext, degree: int, rng: random.Random, density: float = 0.4,
                   lo: int = 2, hi: int = None, coeffs=(-3, 3)) -> ConvElement:
    hi = ctx.arity_max if hi is None else hi
    comps = {}
    for n in range(lo, hi + 1):
        e = {}
        for key, j in component_keys(ctx, n, degree):
            if ctx.unit_split is not None and ctx.unit_split.unit in key:
                continue
            if rng.random() < density:
                c = rng.randint(*coeffs)
                if c:
                    e.setdefault(key, {})[j] = Fraction(c)
        comps[n] = e
    return ConvElement(ctx, comps, degree)


def random_small_element(ctx: ConvContext, degree: int, rng: random.Random, **kw) -> ConvElement:
    """Random element of the C∞ flavor, obtained by retracting a random one."""
    return pbw_retraction(random_element(associative_context(ctx), degree, rng, **kw),
                          commutative_context(ctx))


def _basis_elements(ctx: ConvContext, arity: int, degree: int, commutative: bool) -> List[ConvElement]:
    keys = component_keys(ctx, arity, degree)
    if ctx.unit_split is not None:
        keys = [(k, j) for k, j in keys if ctx.unit_split.unit not in k]
    elems = [ConvElement(ctx, {arity: {k: {j: Fraction(1)}}}, degree) for k, j in keys]
    if not commutative:
        return elems
    images = [pbw_retraction(e, ctx).to_vector() for e in elems]
    return [ConvElement.from_vector(ctx, v, degree) for v in span_basis(images)]


def _combine(basis: List[ConvElement], coeffs: Dict[int, Fraction], ctx, degree) -> ConvElement:
    total = ConvElement(ctx, {}, degree)
    for j, c in sorted(coeffs.items()):
        total = total + basis[j].scale(c)
    return total


def random_c_infinity(ctx: ConvContext, rng: random.Random, attempts: int = 40) -> ConvElement:
    """Random C∞ Maurer–Cartan element, solved arity by arity.

    The arity-2 part is a sparse random C∞ element with vanishing arity-3
    defect; each later component solves the linear equation the Maurer–Cartan
    condition imposes one arity up, plus a random kernel vector.  An
    obstruction restarts from a new arity-2 part.  Requires no arity-1
    differential.
    """
    small = commutative_context(ctx)
    if 1 in small.differential:
        raise PreconditionError("order-by-order solving needs a minimal base differential")
    basis2 = _basis_elements(small, 2, -1, True)
    for _ in range(attempts):
        x = _random_quadratic(small, basis2, rng)
        if x is not None:
            x = _extend_mc(small, x, rng)
        if x is not None:
            if not mc_defect(x).is_zero():
                raise ArithmeticError("order-by-order solution is not Maurer–Cartan")
            return x
    return ConvElement(small, {}, -1)


def _random_quadratic(small: ConvContext, basis2, rng) -> Optional[ConvElement]:
    if not basis2:
        return ConvElement(small, {}, -1)
    picks = rng.sample(range(len(basis2)), min(len(basis2), rng.randint(1, 3)))
    cand = ConvElement(small, {}, -1)
    for j in picks:
        cand = cand + basis2[j].scale(rng.choice([-2, -1, 1, 2]))
    return cand if mc_defect(cand).restrict(1, 3).is_zero() else None


def _extend_mc(small: ConvContext, x: ConvElement, rng) -> Optional[ConvElement]:
    N = small.arity_max
    for k in range(3, N + 1):
        basis = _basis_elements(small, k, -1, True)
        if not basis:
            continue
        if k + 1 <= N:
            defect = mc_defect(x).restrict(k + 1, k + 1)
            lin = ConvElement(small, small.differential, -1) + x.restrict(2, 2)
            cols = [bracket(lin, b).restrict(k + 1, k + 1).to_vector() for b in basis]
            sol = solve(cols, {key: -c for key, c in defect.to_vector().items()})
            if sol is None:
                return None
            kern = kernel(cols)
        else:
            sol, kern = {}, [{j: Fraction(1)} for j in range(len(basis))]
        comp = _combine(basis, sol, small, -1)
        if kern:
            vec = kern[rng.randrange(len(kern))]
            comp = comp + _combine(basis, vec, small, -1).scale(rng.choice([-1, 1, 2]))
        x = x + comp
    return x


def stabilizer_element(x: ConvElement, rng: random.Random) -> ConvElement:
    """Degree-0 c in the A∞ algebra with exp(c)·x = x and a non-C∞ low-arity part.

    Solved arity by arity: with total codifferential M = D + x and no arity-1
    part, c_k enters the arity-(k+1) equation linearly through [c_k, M_2].
    The particular solution uses pivot columns only (free variables zero); the
    first arity admitting a non-C∞ kernel vector gets one added.
    """
    big = associative_context(x.ctx)
    if 1 in big.differential:
        return _stabilizer_from_coboundary(x, rng)
    N = big.arity_max
    x = ConvElement(big, x.comps, -1)
    M = big.base_differential + x
    M2 = M.restrict(2, 2)
    c = ConvElement(big, {}, 0)
    corrupted = False
    for k in range(2, N + 1):
        basis = _basis_elements(big, k, 0, False)
        if not basis:
            continue
        if k + 1 <= N:
            defect = (exp_ad(c, M) - M).restrict(k + 1, k + 1)
            cols = [bracket(b, M2).restrict(k + 1, k + 1).to_vector() for b in basis]
            sol = solve(cols, {key: -v for key, v in defect.to_vector().items()})
            if sol is None:
                raise ArithmeticError(f"stabilizer equation inconsistent at arity {k + 1}")
            kern = kernel(cols)
        else:
            sol, kern = {}, [{j: Fraction(1)} for j in range(len(basis))]
        comp = _combine(basis, sol, big, 0)
        if not corrupted:
            bad = [v for v in kern if not harrison_check(_combine(basis, v, big, 0))[0]]
            if bad:
                comp = comp + _combine(basis, bad[rng.randrange(len(bad))], big, 0).scale(
                    rng.choice([-2, -1, 1, 2]))
                corrupted = True
        c = c + comp
    if gauge_act(c, x, check=False) != x:
        raise ArithmeticError("stabilizer solution does not fix x")
    return c


def _stabilizer_from_coboundary(x: ConvElement, rng: random.Random) -> ConvElement:
    # c = [D + x, b] for a degree-1 b commutes with D + x, hence fixes x exactly
    big = associative_context(x.ctx)
    x = ConvElement(big, x.comps, -1)
    M = big.base_differential + x
    for _ in range(50):
        b = random_element(big, 1, rng, density=0.3)
        c = bracket(M, b).restrict(2)
        if not c.is_zero() and not harrison_check(c)[0] and (bracket(c, M)).is_zero():
            return c
    raise ArithmeticError("no non-C∞ coboundary stabilizer found")


@dataclass
class StabilizerFixture:
    name: str
    context: ConvContext
    x: ConvElement
    y: ConvElement
    h: ConvElement
    c: ConvElement
    a: ConvElement

    def isotopy(self) -> Isotopy:
        return isotopy_from_gauge(self.a)


# graded spaces for the rectification families, given by the degrees of the
# shifted space W; V is recovered by undoing the shift for each orientation
SHIFTED_FAMILIES = {
    "dim2": (("u", 1), ("w", 0)),
    "dim3": (("u", 0), ("v", 0), ("w", -1)),
    "dim3-odd": (("u", 1), ("v", 1), ("w", 0)),
}


def family_space(family: str, orientation: str) -> GradedSpace:
    pairs = SHIFTED_FAMILIES[family]
    if orientation == ALGEBRA:
        return GradedSpace(tuple((n, d - 1) for n, d in pairs))
    # mirror: stored degrees of the coalgebra side are the negated algebra ones
    return GradedSpace(tuple((n, -d + 1) for n, d in pairs))


def stabilizer_fixture(family: str, orientation: str, arity_max: int, seed: int,
                       attempts: int = 20) -> StabilizerFixture:
    rng = random.Random(f"stabilizer:{family}:{orientation}:{arity_max}:{seed}")
    ctx = ConvContext(family_space(family, orientation), orientation, A_INF, arity_max)
    small = commutative_context(ctx)
    for _ in range(attempts):
        x = random_c_infinity(small, rng)
        if x.is_zero():
            continue
        h = random_small_element(small, 0, rng, density=0.5)
        y = gauge_act(h, x, check=False)
        try:
            c = stabilizer_element(x, rng)
        except ArithmeticError:
            continue
        a = bch(h.in_context(ctx), c)
        if harrison_check(a)[0] or y == x:
            continue
        name = f"{family}-{orientation}-N{arity_max}-s{seed}"
        return StabilizerFixture(name, ctx, x, y, h, c, a)
    raise ArithmeticError(f"could not build a stabilizer fixture for {family}/{orientation}")


def acceptance_fixture_grid(seeds=(0, 1)) -> List[Tuple[str, str, int, int]]:
    grid = []
    for orientation in (ALGEBRA, COALGEBRA):
        for family in ("dim2", "dim3"):
            for N in (3, 4):
                for s in seeds:
                    grid.append((family, orientation, N, s))
    return grid


def random_c_infinity_fixture(family: str, orientation: str, arity_max: int, seed: int) -> ConvElement:
    rng = random.Random(f"random-c-infinity:{family}:{orientation}:{arity_max}:{seed}")
    ctx = ConvContext(family_space(family, orientation), orientation, C_INF, arity_max)
    for _ in range(20):
        x = random_c_infinity(ctx, rng)
        if not x.is_zero():
            return x
    return x


# Lie algebra fixtures

def abelian_lie(dim: int = 1) -> FiniteDgLie:
    names = ["x", "y", "z", "w"][:dim] if dim <= 4 else [f"x{i}" for i in range(dim)]
    return FiniteDgLie(GradedSpace.from_pairs([[n, 0] for n in names]), {}, name=f"abelian-{dim}d")


def heisenberg() -> FiniteDgLie:
    space = GradedSpace.from_pairs([["x", 0], ["y", 0], ["z", 0]])
    return FiniteDgLie(space, {(0, 1): {2: 1}}, name="heisenberg")


def free_nilpotent_class2() -> FiniteDgLie:
    """Free nilpotent Lie algebra of class 2 on two generators."""
    space = GradedSpace.from_pairs([["a", 0], ["b", 0], ["ab", 0]])
    return FiniteDgLie(space, {(0, 1): {2: 1}}, name="free-nilpotent-2-2")


def negative_graded_lie() -> FiniteDgLie:
    """a in degree -1, b in degree -2, [a, a] = b: the smallest non-abelian such example."""
    space = GradedSpace.from_pairs([["a", -1], ["b", -2]])
    return FiniteDgLie(space, {(0, 0): {1: 1}}, name="negative-graded")


def acyclic_extension(g: FiniteDgLie) -> Tuple[FiniteDgLie, Dict[int, Dict[int, Fraction]]]:
    """g ⊕ span{u, v} with du = v, and the projection back onto g (a quasi-isomorphism)."""
    pairs = [list(p) for p in g.space.basis] + [["u", 1], ["v", 0]]
    n = g.dim
    table = {k: dict(v) for k, v in g.table.items()}
    diff = {k: dict(v) for k, v in g.diff.items()}
    diff[n] = {n + 1: Fraction(1)}
    h = FiniteDgLie(GradedSpace.from_pairs(pairs), table, diff, tuple(g.weights) + (1, 1),
                    name=g.name + "+acyclic")
    proj = {i: {i: Fraction(1)} for i in range(n)}
    return h, proj


LIE_FIXTURES = {
    "abelian-1d": lambda: abelian_lie(1),
    "heisenberg": heisenberg,
    "free-nilpotent-2-2": free_nilpotent_class2,
    "negative-graded": negative_graded_lie,
}


# broken fixtures for negative controls

def broken_associative_product(orientation: str = ALGEBRA) -> MultilinearMap:
    """e·e = e, e·f = f, f·e = e, f·f = 0 on degree-0 generators.

    Not associative: (f·e)·f = e·f = f while f·(e·f) = f·f = 0.
    """
    space = GradedSpace.from_pairs([["e", 0], ["f", 0]])
    entries = {(0, 0): {0: Fraction(1)}, (0, 1): {1: Fraction(1)}, (1, 0): {0: Fraction(1)}}
    return MultilinearMap(2, space, 0, entries, orientation)


def broken_mc_element(orientation: str = ALGEBRA, arity_max: int = 3) -> ConvElement:
    """The shifted encoding of the non-associative product above: not Maurer–Cartan."""
    from .structures import shifted_binary
    m = broken_associative_product(orientation)
    ctx = ConvContext(m.source, orientation, A_INF, arity_max)
    return ConvElement(ctx, {2: shifted_binary(m.entries, m.source, orientation)}, -1)


def broken_harrison_element(seed: int = 0) -> ConvElement:
    """A random arity-3 map; random maps are not killed by the shuffle sums."""
    rng = random.Random(f"broken-harrison:{seed}")
    ctx = ConvContext(family_space("dim2", ALGEBRA), ALGEBRA, A_INF, 3)
    while True:
        x = random_element(ctx, -1, rng, density=0.8, lo=3, hi=3)
        if not harrison_check(x)[0]:
            return x


def broken_weight_algebra() -> WeightAlgebra:
    """Degree-0 algebra on e (weight 1), f (weight 2), g (weight 3) with e·e = f, e·f = g,
    f·e = 0: (e·e)·e = f·e = 0 but e·(e·e) = e·f = g."""
    return WeightAlgebra.from_table([("e", 0, 1), ("f", 0, 2), ("g", 0, 3)],
                                    {("e", "e"): {"f": 1}, ("e", "f"): {"g": 1}})


def broken_completion_map(g: FiniteDgLie = None, max_weight: int = 4):
    """The counit Q g → g with one linear differential term of Q g dropped.

    Returns (model, source complex with the damaged differential, target complex, map).
    """
    g = heisenberg() if g is None else g
    model = homotopy_completion_model(g, max_weight)
    src = model.complex("F")
    tgt = model.target_complex()
    fmap = model.counit()
    for a in src.keys:
        if model.cobar.length[a] != 1:
            continue
        lin = {k: c for k, c in src.d.get(a, {}).items() if model.cobar.length[k] == 1}
        if lin:
            k = min(lin)
            d = dict(src.d)
            d[a] = {j: c for j, c in src.d[a].items() if j != k}
            src = type(src)(src.keys, src.degree, src.weight, d, src.filtration, src.label)
            return model, src, tgt, fmap
    raise ArithmeticError("no linear differential term to drop")
