"""Brute-force reference computations, written independently of the main code paths.

Each function here recomputes something the library derives another way:
Koszul signs by adjacent transpositions, e^{(1)} by its closed descent
formula, BCH by Dynkin's formula, enveloping algebras by a presentation
T(g)/I, and the A∞ relations by direct unshifted expansion.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import rank

Poly = Dict[Tuple[int, ...], Fraction]


# signs

def koszul_sign_by_transpositions(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of moving factor i to slot perm[i], by bubble-sorting adjacent swaps."""
    slots = list(perm)
    degs = list(degrees)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(slots) - 1):
            if slots[i] > slots[i + 1]:
                if degs[i] % 2 and degs[i + 1] % 2:
                    sign = -sign
                slots[i], slots[i + 1] = slots[i + 1], slots[i]
                degs[i], degs[i + 1] = degs[i + 1], degs[i]
                changed = True
    return sign


# Eulerian idempotents

def descents(s: Sequence[int]) -> int:
    return sum(1 for i in range(len(s) - 1) if s[i] > s[i + 1])


def first_eulerian_closed_form(n: int) -> Dict[Tuple[int, ...], Fraction]:
    """e^{(1)}_n = Σ_σ (−1)^{d(σ)} / (n·C(n−1, d(σ))) σ, d = number of descents."""
    out = {}
    for s in permutations(range(n)):
        d = descents(s)
        out[s] = Fraction((-1) ** d, n * comb(n - 1, d))
    return out


def stirling_first(n: int, k: int) -> int:
    """Unsigned Stirling number of the first kind: permutations of n with k cycles."""
    table = [[0] * (n + 1) for _ in range(n + 1)]
    table[0][0] = 1
    for m in range(1, n + 1):
        for j in range(1, m + 1):
            table[m][j] = table[m - 1][j - 1] + (m - 1) * table[m - 1][j]
    return table[n][k]


# free associative algebra on letters 0 (X) and 1 (Y)

def _mul(p: Poly, q: Poly, cap: int) -> Poly:
    out: Poly = {}
    for u, a in p.items():
        for v, b in q.items():
            if len(u) + len(v) <= cap:
                out[u + v] = out.get(u + v, 0) + a * b
    return {w: c for w, c in out.items() if c}


def _sub(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for w, c in q.items():
        out[w] = out.get(w, 0) - c
    return {w: c for w, c in out.items() if c}


def expand_tree(tree) -> Poly:
    """Associative expansion of a bracket tree (letters are even)."""
    if not isinstance(tree, tuple):
        return {(tree,): Fraction(1)}
    a, b = expand_tree(tree[0]), expand_tree(tree[1])
    cap = 10 ** 6
    return _sub(_mul(a, b, cap), _mul(b, a, cap))


def _right_nested(word: Sequence[int]) -> Poly:
    p: Poly = {(word[-1],): Fraction(1)}
    for letter in reversed(word[:-1]):
        x = {(letter,): Fraction(1)}
        cap = len(word)
        p = _sub(_mul(x, p, cap), _mul(p, x, cap))
    return p


def dynkin_bch(max_weight: int) -> Poly:
    """log(e^X e^Y) up to the given weight by Dynkin's explicit formula."""
    total: Poly = {}
    for n in range(1, max_weight + 1):
        pairs = [(r, s) for r in range(max_weight + 1) for s in range(max_weight + 1)
                 if 0 < r + s <= max_weight]
        for choice in product(pairs, repeat=n):
            length = sum(r + s for r, s in choice)
            if length > max_weight:
                continue
            word: List[int] = []
            denom = 1
            for r, s in choice:
                word += [0] * r + [1] * s
                denom *= factorial(r) * factorial(s)
            coeff = Fraction((-1) ** (n - 1), n * length * denom)
            for w, c in _right_nested(word).items():
                total[w] = total.get(w, 0) + coeff * c
    return {w: c for w, c in total.items() if c}


def tree_series_expansion(series) -> Poly:
    """Associative expansion of a list of (tree, coefficient) pairs."""
    total: Poly = {}
    for tree, c in series:
        for w, x in expand_tree(tree).items():
            total[w] = total.get(w, 0) + c * x
    return {w: c for w, c in total.items() if c}


# generating functions

def sym_dims(weights: Sequence[int], parities: Sequence[int], max_weight: int) -> Dict[int, int]:
    """Weight-graded dims of the free graded-commutative algebra on the given generators."""
    poly = [0] * (max_weight + 1)
    poly[0] = 1
    for w, odd in zip(weights, parities):
        new = list(poly)
        if odd:
            for k in range(max_weight, w - 1, -1):
                new[k] = poly[k] + poly[k - w]
        else:
            for k in range(w, max_weight + 1):
                new[k] += new[k - w]
        poly = new
    return {k: poly[k] for k in range(1, max_weight + 1)}


def ce_euler_characteristic(weights: Sequence[int], degrees: Sequence[int],
                            max_weight: int) -> Dict[int, int]:
    """Per weight, Σ (−1)^{deg} dim of Sym^c(s g), from a product formula.

    A generator sx of degree |x|+1 contributes (1 − t^w) if it is odd and
    1/(1 − t^w) with sign (−1)^{|x|+1} per power if it is even.
    """
    poly = [0] * (max_weight + 1)
    poly[0] = 1
    for w, d in zip(weights, degrees):
        sd = d + 1
        sgn = -1 if sd % 2 else 1
        new = list(poly)
        if sd % 2:
            for k in range(max_weight, w - 1, -1):
                new[k] = poly[k] + sgn * poly[k - w]
        else:
            for k in range(w, max_weight + 1):
                new[k] += sgn * new[k - w]
        poly = new
    return {k: poly[k] for k in range(1, max_weight + 1)}


# enveloping algebras by presentation

def uea_presentation_dims(basis_degrees: Sequence[int], weights: Sequence[int],
                          table: Dict[Tuple[int, int], Dict[int, Fraction]],
                          max_weight: int) -> Dict[int, int]:
    """dim (T g / I)_w with I generated by xy − (−1)^{|x||y|} yx − [x, y]."""
    n = len(weights)
    words_by_weight: Dict[int, List[Tuple[int, ...]]] = {0: [()]}
    for w in range(1, max_weight + 1):
        words_by_weight[w] = []
        for i in range(n):
            if weights[i] <= w:
                words_by_weight[w] += [(i,) + rest for rest in words_by_weight[w - weights[i]]]
    dims = {}
    for w in range(1, max_weight + 1):
        rels = []
        for i, j in product(range(n), repeat=2):
            wr = weights[i] + weights[j]
            if wr > w:
                continue
            rel: Poly = {(i, j): Fraction(1)}
            s = -1 if (basis_degrees[i] * basis_degrees[j]) % 2 else 1
            rel[(j, i)] = rel.get((j, i), 0) - s
            for k, c in table.get((i, j), {}).items():
                rel[(k,)] = rel.get((k,), 0) - Fraction(c)
            rel = {u: c for u, c in rel.items() if c}
            if not rel:
                continue
            for lw in range(0, w - wr + 1):
                for left in words_by_weight[lw]:
                    for right in words_by_weight[w - wr - lw]:
                        rels.append({left + u + right: c for u, c in rel.items()})
        dims[w] = len(words_by_weight[w]) - rank(rels)
    return dims


# A∞ relations by direct expansion

def stasheff_violation(x) -> Optional[Tuple[int, Tuple[int, ...]]]:
    """First (arity, input tuple) where the unshifted A∞ relations fail.

    ``x`` is an algebra-oriented element of degree −1 on the shifted space;
    together with the base differential it is decoded into operations
    m_n(a_1..a_n) = (−1)^{Σ (n−i)|a_i|} b_n(sa_1..sa_n) on V and the relations
    Σ (−1)^{r+st} m_{r+1+t}(1^r ⊗ m_s ⊗ 1^t) = 0 are checked on every basis
    tuple of arity ≤ arity_max.
    """
    ctx = x.ctx
    if ctx.orientation != "algebra":
        raise ValueError("the direct expansion is written for the algebra orientation")
    V = ctx.space
    dv = V.degrees
    N = ctx.arity_max
    total: Dict[int, dict] = {}
    for source in (ctx.differential, x.comps):
        for n, e in source.items():
            slot = total.setdefault(n, {})
            for key, vec in e.items():
                out = slot.setdefault(key, {})
                for j, c in vec.items():
                    out[j] = out.get(j, 0) + c

    def m(n: int, args: Tuple[int, ...]) -> Dict[int, Fraction]:
        vec = total.get(n, {}).get(args, {})
        if not vec:
            return {}
        s = (-1) ** (sum((n - 1 - i) * dv[a] for i, a in enumerate(args)) % 2)
        return {j: s * c for j, c in vec.items()}

    for n in range(1, N + 1):
        for args in product(range(V.dim), repeat=n):
            acc: Dict[int, Fraction] = {}
            for s in range(1, n + 1):
                for r in range(0, n - s + 1):
                    t = n - r - s
                    inner = m(s, args[r:r + s])
                    if not inner:
                        continue
                    sign = (-1) ** ((r + s * t + (s - 2) * sum(dv[a] for a in args[:r])) % 2)
                    for j, c in inner.items():
                        for k, c2 in m(r + 1 + t, args[:r] + (j,) + args[r + s:]).items():
                            acc[k] = acc.get(k, 0) + sign * c * c2
            if any(acc.values()):
                return n, args
    return None
