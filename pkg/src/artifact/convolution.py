"""Truncated convolution dg Lie algebras of multilinear maps.

Elements live on the shifted space W (sV for algebras, s^{-1}V for
coalgebras), so a structure is one degree -1 element and a gauge is a degree 0
element.  Every identity holds modulo arities > arity_max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exactcore import (ALGEBRA, COALGEBRA, Entries, GradedSpace, MultilinearMap,
                        add_into, compose_entries)
from .linalg import solve

A_INF = "A_inf"
C_INF = "C_inf"
SU_A_INF = "su_A_inf"
SU_C_INF = "su_C_inf"
FLAVORS = (A_INF, C_INF, SU_A_INF, SU_C_INF)

INFINITY = math.inf


class PreconditionError(ValueError):
    """An operation was called on inputs violating its stated precondition."""


def is_commutative_flavor(flavor: str) -> bool:
    return flavor in (C_INF, SU_C_INF)


def is_unital_flavor(flavor: str) -> bool:
    return flavor in (SU_A_INF, SU_C_INF)


@dataclass(frozen=True)
class UnitalSplit:
    unit: int
    complement: Tuple[int, ...]
    mu0: Dict[int, Entries] = field(compare=False, hash=False, repr=False)


@dataclass(frozen=True, eq=False)
class ConvContext:
    """Ambient truncated convolution algebra.

    ``differential`` holds the stored tables of the base differential D, a
    degree -1 element (it may have an arity-1 part); d = [D, -].
    """

    space: GradedSpace
    orientation: str = ALGEBRA
    flavor: str = A_INF
    arity_max: int = 4
    differential: Dict[int, Entries] = field(default_factory=dict, repr=False)
    unit_split: Optional[UnitalSplit] = None

    def __post_init__(self):
        if self.orientation not in (ALGEBRA, COALGEBRA):
            raise ValueError(f"unknown orientation {self.orientation!r}")
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if self.arity_max < 2:
            raise ValueError("arity_max must be at least 2")
        if is_unital_flavor(self.flavor) and self.unit_split is None:
            raise ValueError("strictly unital flavors need a unit split")
        diff = {n: e for n, e in self.differential.items() if e and n <= self.arity_max}
        object.__setattr__(self, "differential", diff)

    @property
    def shifted(self) -> GradedSpace:
        return self.space.shift(1 if self.orientation == ALGEBRA else -1)

    @property
    def degrees(self) -> Tuple[int, ...]:
        return self.shifted.degrees

    @property
    def base_differential(self) -> "ConvElement":
        return ConvElement(self, self.differential, -1)

    def family(self):
        return (self.space, self.orientation, self.arity_max)

    def compatible(self, other: "ConvContext") -> bool:
        return self is other or self.family() == other.family()

    def with_flavor(self, flavor: str) -> "ConvContext":
        return replace(self, flavor=flavor)

    def with_differential(self, comps: Dict[int, Entries]) -> "ConvContext":
        return replace(self, differential=comps)

    def same_as(self, other: "ConvContext") -> bool:
        return (self.family() == other.family() and self.flavor == other.flavor
                and self.base_differential == other.base_differential
                and self.unit_split == other.unit_split)


def _clean_comps(comps, arity_max) -> Dict[int, Entries]:
    out = {}
    for n, e in comps.items():
        if isinstance(e, MultilinearMap):
            e = e.entries
        if n > arity_max:
            continue
        clean = {}
        for k, v in e.items():
            v2 = {j: Fraction(c) for j, c in v.items() if c}
            if v2:
                clean[k] = v2
        if clean:
            out[n] = clean
    return out


class ConvElement:
    """Homogeneous element of a truncated convolution algebra.

    ``comps`` maps arity to the stored entry table of that component on the
    shifted space.  Treated as immutable.
    """

    __slots__ = ("ctx", "comps", "degree")

    def __init__(self, ctx: ConvContext, comps=None, degree: int = 0):
        self.ctx = ctx
        self.comps = _clean_comps(comps or {}, ctx.arity_max)
        self.degree = degree

    # construction helpers

    @classmethod
    def zero(cls, ctx: ConvContext, degree: int = 0) -> "ConvElement":
        return cls(ctx, {}, degree)

    def component(self, n: int) -> MultilinearMap:
        return MultilinearMap(n, self.ctx.shifted, self.degree, self.comps.get(n, {}),
                              self.ctx.orientation)

    @property
    def components(self) -> Dict[int, MultilinearMap]:
        return {n: self.component(n) for n in sorted(self.comps)}

    def in_context(self, ctx: ConvContext) -> "ConvElement":
        if not ctx.compatible(self.ctx):
            raise PreconditionError("contexts act on different spaces")
        return ConvElement(ctx, self.comps, self.degree)

    def arities(self) -> List[int]:
        return sorted(self.comps)

    def restrict(self, lo: int = 1, hi: int = None) -> "ConvElement":
        hi = self.ctx.arity_max if hi is None else hi
        return ConvElement(self.ctx, {n: e for n, e in self.comps.items() if lo <= n <= hi},
                           self.degree)

    # linear structure

    def is_zero(self) -> bool:
        return not self.comps

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConvElement):
            return NotImplemented
        if not self.ctx.compatible(other.ctx):
            return False
        if self.comps != other.comps:
            return False
        return self.degree == other.degree or self.is_zero()

    __hash__ = None

    def __repr__(self):
        sizes = {n: sum(len(v) for v in e.values()) for n, e in sorted(self.comps.items())}
        return f"ConvElement(degree={self.degree}, nnz={sizes})"

    def _check(self, other: "ConvElement"):
        if not self.ctx.compatible(other.ctx):
            raise PreconditionError("context mismatch")

    def __add__(self, other: "ConvElement") -> "ConvElement":
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return ConvElement(self.ctx, other.comps, other.degree)
        if self.degree != other.degree:
            raise PreconditionError("cannot add elements of different degrees")
        out = {n: {k: dict(v) for k, v in e.items()} for n, e in self.comps.items()}
        for n, e in other.comps.items():
            tgt = out.setdefault(n, {})
            for k, v in e.items():
                for j, c in v.items():
                    add_into(tgt, k, j, c)
        return ConvElement(self.ctx, out, self.degree)

    def __neg__(self) -> "ConvElement":
        return self.scale(-1)

    def __sub__(self, other: "ConvElement") -> "ConvElement":
        return self + other.scale(-1)

    def scale(self, c) -> "ConvElement":
        c = Fraction(c)
        if not c:
            return ConvElement(self.ctx, {}, self.degree)
        return ConvElement(self.ctx, {n: {k: {j: c * x for j, x in v.items()} for k, v in e.items()}
                                      for n, e in self.comps.items()}, self.degree)

    def min_arity(self):
        return min(self.comps) if self.comps else None

    # coordinates for linear algebra: keys (arity, input tuple, output)

    def to_vector(self) -> Dict[tuple, Fraction]:
        return {(n, k, j): c for n, e in self.comps.items() for k, v in e.items()
                for j, c in v.items()}

    @classmethod
    def from_vector(cls, ctx: ConvContext, vec: Dict[tuple, Fraction], degree: int) -> "ConvElement":
        comps: Dict[int, Entries] = {}
        for (n, k, j), c in vec.items():
            add_into(comps.setdefault(n, {}), k, j, Fraction(c))
        return cls(ctx, comps, degree)


def component_keys(ctx: ConvContext, arity: int, degree: int) -> List[Tuple[Tuple[int, ...], int]]:
    """All (tuple, index) basis slots of the given arity and element degree."""
    degs = ctx.degrees
    by_degree: Dict[int, List[int]] = {}
    for j, d in enumerate(degs):
        by_degree.setdefault(d, []).append(j)
    sign = 1 if ctx.orientation == ALGEBRA else -1
    out = []
    for key in product(range(len(degs)), repeat=arity):
        target = sum(degs[i] for i in key) + sign * degree
        for j in by_degree.get(target, ()):
            out.append((key, j))
    return out


def star(f: ConvElement, g: ConvElement) -> ConvElement:
    """f ⋆ g = Σ_{p,q,i} f_p ∘_i g_q, truncated at arity_max."""
    f._check(g)
    ctx = f.ctx
    N = ctx.arity_max
    degs = ctx.degrees
    out: Dict[int, Entries] = {}
    for p, fe in f.comps.items():
        for q, ge in g.comps.items():
            n = p + q - 1
            if n > N:
                continue
            tgt = out.setdefault(n, {})
            for i in range(p):
                compose_entries(fe, ge, g.degree, degs, i, tgt)
    return ConvElement(ctx, out, f.degree + g.degree)


def bracket(f: ConvElement, g: ConvElement) -> ConvElement:
    """[f, g] = f ⋆ g − (−1)^{|f||g|} g ⋆ f."""
    sign = -1 if (f.degree * g.degree) % 2 == 0 else 1
    return star(f, g) + star(g, f).scale(sign)


def differential(f: ConvElement) -> ConvElement:
    """d f = [D, f] for the context's base differential D."""
    D = f.ctx.base_differential
    if D.is_zero() or f.is_zero():
        return ConvElement(f.ctx, {}, f.degree - 1)
    return bracket(D, f)


def mc_defect(x: ConvElement) -> ConvElement:
    """dx + ½[x, x]; zero exactly when x is Maurer–Cartan."""
    if x.degree != -1 and not x.is_zero():
        raise PreconditionError(f"Maurer–Cartan elements have degree -1, got {x.degree}")
    x = ConvElement(x.ctx, x.comps, -1)
    return differential(x) + star(x, x)


def is_mc(x: ConvElement) -> bool:
    return mc_defect(x).is_zero()


def first_nonzero(elem: ConvElement):
    """(arity, tuple, index, coefficient) of the first nonzero entry, or None."""
    for n in sorted(elem.comps):
        e = elem.comps[n]
        key = min(e)
        j = min(e[key])
        return n, key, j, e[key][j]
    return None


def twist(ctx: ConvContext, x: ConvElement, check: bool = True) -> ConvContext:
    """Context with base differential D + x, so that d_x = d + [x, -]."""
    if check:
        defect = mc_defect(x)
        if not defect.is_zero():
            raise PreconditionError(f"twisting element is not Maurer–Cartan: {first_nonzero(defect)}")
    total = ConvElement(ctx, ctx.differential, -1) + x.in_context(ctx)
    return ctx.with_differential(total.comps)


def filtration_degree(f: ConvElement):
    """Largest p with f in F^p (components of arity >= p+1); ∞ for zero."""
    if f.is_zero():
        return INFINITY
    return min(f.comps) - 1


def _require_gauge(a: ConvElement):
    if a.is_zero():
        return
    if a.degree != 0:
        raise PreconditionError(f"gauge elements have degree 0, got {a.degree}")
    if min(a.comps) < 2:
        raise PreconditionError("gauge elements must lie in F^1 (arity >= 2)")


def exp_ad(a: ConvElement, y: ConvElement) -> ConvElement:
    """e^{ad_a}(y), a finite sum because a raises arity."""
    total = y
    term = y
    k = 0
    while not term.is_zero():
        k += 1
        term = bracket(a, term).scale(Fraction(1, k))
        total = total + term
    return total


def gauge_act(a: ConvElement, x: ConvElement, check: bool = True) -> ConvElement:
    """exp(a)·x = x − Σ_{n≥0} ad_a^n/(n+1)! (dx a).

    Evaluated as e^{ad_a}(D + x) − D, which is the same series.
    """
    _require_gauge(a)
    if check and not x.is_zero():
        defect = mc_defect(x)
        if not defect.is_zero():
            raise PreconditionError(f"not a Maurer–Cartan element: {first_nonzero(defect)}")
    a = a.in_context(x.ctx) if not a.ctx is x.ctx else a
    a = ConvElement(x.ctx, a.comps, 0)
    D = x.ctx.base_differential
    x = ConvElement(x.ctx, x.comps, -1)
    if a.is_zero():
        return x
    return exp_ad(a, D + x) - D


# Baker–Campbell–Hausdorff through the free Lie algebra on two letters

def _assoc_mul(p: Dict[tuple, Fraction], q: Dict[tuple, Fraction], cap: int):
    out: Dict[tuple, Fraction] = {}
    for u, a in p.items():
        for v, b in q.items():
            if len(u) + len(v) <= cap:
                w = u + v
                out[w] = out.get(w, 0) + a * b
    return {w: c for w, c in out.items() if c}


def _assoc_exp(letter: int, cap: int):
    return {(letter,) * k: Fraction(1, math.factorial(k)) for k in range(cap + 1)}


@lru_cache(maxsize=None)
def bch_series(max_weight: int) -> Tuple[Tuple[object, Fraction], ...]:
    """log(e^X e^Y) up to the given weight as (bracket tree, coefficient) pairs.

    Trees are letters 0 (X), 1 (Y) or nested pairs (u, v) = [u, v], taken from
    the Lyndon basis on X < Y.  Coefficients are found by solving against the
    associative expansion of log(e^X e^Y).
    """
    from .words import expand_bracket, is_lyndon, standard_bracketing

    cap = max_weight
    P = _assoc_mul(_assoc_exp(0, cap), _assoc_exp(1, cap), cap)
    P.pop((), None)
    log: Dict[tuple, Fraction] = {}
    power = {(): Fraction(1)}
    for k in range(1, cap + 1):
        power = _assoc_mul(power, P, cap)
        for w, c in power.items():
            log[w] = log.get(w, 0) + Fraction((-1) ** (k + 1), k) * c
    series = []
    for n in range(1, cap + 1):
        target = {w: c for w, c in log.items() if len(w) == n and c}
        if not target:
            continue
        words = [w for w in product((0, 1), repeat=n) if is_lyndon(w)]
        trees = [standard_bracketing(w) for w in words]
        cols = [expand_bracket(t) for t in trees]
        coeffs = solve(cols, target)
        if coeffs is None:
            raise ArithmeticError(f"weight-{n} part of log(e^X e^Y) is not a Lie element")
        for j in sorted(coeffs):
            series.append((trees[j], coeffs[j]))
    return tuple(series)


def tree_weight(tree) -> int:
    return 1 if not isinstance(tree, tuple) else tree_weight(tree[0]) + tree_weight(tree[1])


def evaluate_tree(tree, letters: Sequence[ConvElement], memo=None) -> ConvElement:
    memo = {} if memo is None else memo
    if tree in memo:
        return memo[tree]
    if not isinstance(tree, tuple):
        val = letters[tree]
    else:
        left = evaluate_tree(tree[0], letters, memo)
        right = evaluate_tree(tree[1], letters, memo)
        val = bracket(left, right) if not (left.is_zero() or right.is_zero()) else \
            ConvElement(left.ctx, {}, left.degree + right.degree)
    memo[tree] = val
    return val


def bch(a: ConvElement, b: ConvElement) -> ConvElement:
    """log(exp(a) exp(b)) truncated by the arity filtration."""
    a._check(b)
    for e in (a, b):
        _require_gauge(e)
    a = ConvElement(a.ctx, a.comps, 0)
    b = ConvElement(a.ctx, b.comps, 0)
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    # a weight-w bracket of F^1 elements lies in F^w, i.e. arity >= w+1
    fa, fb = filtration_degree(a), filtration_degree(b)
    low = min(fa, fb)
    max_weight = max(1, (a.ctx.arity_max - 1) // max(1, low))
    memo: Dict = {}
    total = ConvElement(a.ctx, {}, 0)
    for tree, c in bch_series(max_weight):
        total = total + evaluate_tree(tree, (a, b), memo).scale(c)
    return total
