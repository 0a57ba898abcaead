"""Finite dg Lie algebras, enveloping algebras, bar/cobar constructions and filtrations.

Everything lives in a weight grading: a positive integer weight on the basis of
the Lie algebra that the bracket adds and the differential preserves.  For a
nilpotent algebra with a basis adapted to its lower central series the
weights can be read off that series.  Every construction below splits as a
direct sum over total weight, so truncating at weight W is exact: the pieces
of weight at most W are computed honestly, nothing is approximated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .convolution import PreconditionError
from .exactcore import GradedSpace, MultilinearMap, parse_rational
from .linalg import Echelon, SparseVec, axpy, rank, span_basis
from .structures import StructureError


def _add(target: SparseVec, key, c) -> None:
    if not c:
        return
    v = target.get(key, 0) + c
    if v:
        target[key] = v
    else:
        target.pop(key, None)


# ----------------------------------------------------------------------------
# chain complexes split by (degree, weight)


@dataclass
class ChainComplex:
    """Finite complex on a basis of hashable keys.

    ``d[key]`` is the image of a basis element as a sparse vector.  An optional
    descending filtration gives each basis element its filtration degree; the
    basis is then assumed adapted, so F^p is spanned by keys of level ≥ p.
    """

    keys: List[Hashable]
    degree: Dict[Hashable, int]
    weight: Dict[Hashable, int]
    d: Dict[Hashable, SparseVec]
    filtration: Optional[Dict[Hashable, int]] = None
    label: Callable[[Hashable], str] = repr

    def blocks(self) -> Dict[Tuple[int, int], List[Hashable]]:
        out: Dict[Tuple[int, int], List[Hashable]] = {}
        for k in self.keys:
            out.setdefault((self.degree[k], self.weight[k]), []).append(k)
        return out

    def apply_d(self, vec: SparseVec) -> SparseVec:
        out: SparseVec = {}
        for k, c in vec.items():
            axpy(out, c, self.d.get(k, {}))
        return out

    def d_squared_violation(self):
        for k in self.keys:
            dd = self.apply_d(self.d.get(k, {}))
            if dd:
                return k, dd
        return None

    def homology(self) -> Dict[Tuple[int, int], int]:
        """Dimensions of homology per (degree, weight) block."""
        blocks = self.blocks()
        ranks = {bw: rank([self.d.get(k, {}) for k in ks]) for bw, ks in blocks.items()}
        return {(deg, w): len(ks) - ranks[(deg, w)] - ranks.get((deg + 1, w), 0)
                for (deg, w), ks in sorted(blocks.items())}

    def nonzero_homology(self) -> Dict[Tuple[int, int], int]:
        return {k: v for k, v in self.homology().items() if v}

    def gr(self, p: int) -> "ChainComplex":
        """The associated graded piece Gr^p = F^p / F^{p+1}."""
        F = self.filtration
        keys = [k for k in self.keys if F[k] == p]
        kept = set(keys)
        d = {k: {j: c for j, c in self.d.get(k, {}).items() if j in kept} for k in keys}
        return ChainComplex(keys, self.degree, self.weight, d, {k: p for k in keys}, self.label)

    def filtration_violation(self):
        F = self.filtration
        for k in self.keys:
            for j in self.d.get(k, {}):
                if F[j] < F[k]:
                    return k, j
        return None


def cone(source: ChainComplex, target: ChainComplex, fmap: Dict[Hashable, SparseVec]) -> ChainComplex:
    """Mapping cone of a chain map; acyclic iff the map is a quasi-isomorphism."""
    keys = [("s", k) for k in source.keys] + [("t", k) for k in target.keys]
    degree = {("s", k): source.degree[k] + 1 for k in source.keys}
    degree.update({("t", k): target.degree[k] for k in target.keys})
    weight = {("s", k): source.weight[k] for k in source.keys}
    weight.update({("t", k): target.weight[k] for k in target.keys})
    tkeys = set(target.keys)
    d: Dict[Hashable, SparseVec] = {}
    for k in source.keys:
        img: SparseVec = {}
        for j, c in source.d.get(k, {}).items():
            img[("s", j)] = -c
        for j, c in fmap.get(k, {}).items():
            if j in tkeys:
                _add(img, ("t", j), c)
        d[("s", k)] = img
    for k in target.keys:
        d[("t", k)] = {("t", j): c for j, c in target.d.get(k, {}).items()}
    return ChainComplex(keys, degree, weight, d)


# ----------------------------------------------------------------------------
# sign helpers


def sym_normal(seq: Sequence[int], parity: Callable[[int], int]):
    """Sort a graded-commutative monomial; returns (sign, sorted tuple) or (0, None)."""
    s = list(seq)
    sign = 1
    n = len(s)
    for i in range(n):
        for j in range(n - 1 - i):
            if s[j] > s[j + 1]:
                if parity(s[j]) and parity(s[j + 1]):
                    sign = -sign
                s[j], s[j + 1] = s[j + 1], s[j]
    for a, b in zip(s, s[1:]):
        if a == b and parity(a):
            return 0, None
    return sign, tuple(s)


def unshuffle_sign(parities: Sequence[int], chosen: Sequence[int]) -> int:
    """Koszul sign for moving the factors at positions ``chosen`` to the front."""
    chosen_set = set(chosen)
    sign = 1
    for i in chosen:
        if not parities[i]:
            continue
        for j in range(i):
            if j not in chosen_set and parities[j]:
                sign = -sign
    return sign


# ----------------------------------------------------------------------------
# dg Lie algebras


class FiniteDgLie:
    """Structure-constant dg Lie algebra with a positive additive weight grading.

    ``bracket`` maps index pairs (i, j) to sparse outputs; the graded
    antisymmetric closure is filled in (and checked where both orders are
    given).  ``differential`` maps i to d(e_i).  Weights are inferred from the
    lower central series when not supplied.
    """

    def __init__(self, space: GradedSpace, bracket: Dict[Tuple[int, int], SparseVec] = None,
                 differential: Dict[int, SparseVec] = None, weights: Sequence[int] = None,
                 check: bool = True, name: str = "g", max_weight: int = None):
        self.space = space
        self.name = name
        self.max_weight = max_weight
        table: Dict[Tuple[int, int], SparseVec] = {}
        degs = space.degrees
        for (i, j), out in (bracket or {}).items():
            out = {k: Fraction(c) for k, c in out.items() if c}
            if not out:
                continue
            sign = -1 if degs[i] * degs[j] % 2 == 0 else 1
            mirrored = {k: sign * c for k, c in out.items()}
            for key, val in (((i, j), out), ((j, i), mirrored)):
                if key in table and table[key] != val:
                    raise StructureError(f"bracket not graded antisymmetric on {space.name(i)}, {space.name(j)}",
                                         ("antisymmetry", space.name(i), space.name(j)))
                table[key] = val
        self.table = table
        self.diff = {i: {k: Fraction(c) for k, c in v.items() if c} for i, v in (differential or {}).items()}
        self.diff = {i: v for i, v in self.diff.items() if v}
        if weights is None:
            self.weights = self._infer_weights()
        else:
            self.weights = tuple(weights)
        if check:
            self.check()

    # basic access
    @property
    def dim(self) -> int:
        return self.space.dim

    def degree(self, i: int) -> int:
        return self.space.degree(i)

    def weight(self, i: int) -> int:
        return self.weights[i]

    def br(self, i: int, j: int) -> SparseVec:
        return self.table.get((i, j), {})

    def bracket(self, u: SparseVec, v: SparseVec) -> SparseVec:
        out: SparseVec = {}
        for i, a in u.items():
            for j, b in v.items():
                axpy(out, a * b, self.br(i, j))
        return out

    def d(self, u: SparseVec) -> SparseVec:
        out: SparseVec = {}
        for i, a in u.items():
            axpy(out, a, self.diff.get(i, {}))
        return out

    def basis(self, i: int) -> SparseVec:
        return {i: Fraction(1)}

    @property
    def bracket_map(self) -> MultilinearMap:
        return MultilinearMap(2, self.space, 0, {k: dict(v) for k, v in self.table.items()})

    @property
    def differential_map(self) -> MultilinearMap:
        return MultilinearMap(1, self.space, -1, {(i,): dict(v) for i, v in self.diff.items()})

    def is_abelian(self) -> bool:
        return not self.table

    # validation
    def check(self) -> None:
        """Degrees, weights, Jacobi, d² = 0 and Leibniz, exactly; raises with a witness."""
        n, degs, W = self.dim, self.space.degrees, self.weights
        nm = self.space.name
        if len(W) != n or any(w < 1 for w in W):
            raise StructureError("weights must be positive, one per basis element", ("weights", W))
        for (i, j), out in self.table.items():
            for k in out:
                if degs[k] != degs[i] + degs[j]:
                    raise StructureError(f"[{nm(i)},{nm(j)}] has wrong degree", ("degree", nm(i), nm(j), nm(k)))
                if W[k] != W[i] + W[j]:
                    raise StructureError(f"[{nm(i)},{nm(j)}] breaks the weight grading",
                                         ("weight", nm(i), nm(j), nm(k)))
        for i, out in self.diff.items():
            for k in out:
                if degs[k] != degs[i] - 1:
                    raise StructureError(f"d({nm(i)}) has wrong degree", ("degree", nm(i), nm(k)))
                if W[k] != W[i]:
                    raise StructureError(f"d({nm(i)}) breaks the weight grading", ("weight", nm(i), nm(k)))
        for i in range(n):
            if self.d(self.d({i: 1})):
                raise StructureError(f"d² ≠ 0 on {nm(i)}", ("d2", nm(i)))
        cap = self.max_weight
        for i, j in self.table:
            for k in range(n):
                if cap is not None and W[i] + W[j] + W[k] > cap:
                    continue
                # [x,[y,z]] = [[x,y],z] + (-1)^{|x||y|} [y,[x,z]]
                lhs = self.bracket({i: 1}, self.bracket({j: 1}, {k: 1}))
                rhs = self.bracket(self.bracket({i: 1}, {j: 1}), {k: 1})
                axpy(rhs, (-1) ** (degs[i] * degs[j]), self.bracket({j: 1}, self.bracket({i: 1}, {k: 1})))
                axpy(lhs, -1, rhs)
                if lhs:
                    raise StructureError(f"Jacobi fails on {nm(i)}, {nm(j)}, {nm(k)}",
                                         ("jacobi", nm(i), nm(j), nm(k)))
        for i in range(n):
            for j in range(n):
                if cap is not None and W[i] + W[j] > cap:
                    continue
                lhs = self.d(self.bracket({i: 1}, {j: 1}))
                rhs = self.bracket(self.d({i: 1}), {j: 1})
                axpy(rhs, (-1) ** degs[i], self.bracket({i: 1}, self.d({j: 1})))
                axpy(lhs, -1, rhs)
                if lhs:
                    raise StructureError(f"Leibniz fails on {nm(i)}, {nm(j)}", ("leibniz", nm(i), nm(j)))

    # lower central series
    def lcs(self) -> "LcsResult":
        return lcs(self)

    def _infer_weights(self) -> Tuple[int, ...]:
        chain = lcs(self, max_steps=self.dim + 2)
        if chain.nilpotency_class is None:
            raise PreconditionError("weights cannot be inferred: the algebra is not nilpotent")
        weights = []
        for i in range(self.dim):
            w = 1
            for n, sub in enumerate(chain.terms, start=1):
                if _echelon_contains(sub, {i: Fraction(1)}):
                    w = n
            weights.append(w)
        # the basis must be adapted: each L^n spanned by basis vectors of weight ≥ n
        for n, sub in enumerate(chain.terms, start=1):
            if len(sub) != sum(1 for w in weights if w >= n):
                raise PreconditionError(f"basis is not adapted to the lower central series at L^{n}")
        return tuple(weights)

    def lcs_level(self, i: int) -> int:
        return self.weights[i]

    # serialization helpers
    def to_json(self) -> dict:
        nm = self.space.name
        from .exactcore import format_rational
        bracket = []
        for (i, j), out in sorted(self.table.items()):
            if i > j:
                continue
            for k, c in sorted(out.items()):
                bracket.append([nm(i), nm(j), nm(k), format_rational(c)])
        diff = []
        for i, out in sorted(self.diff.items()):
            for k, c in sorted(out.items()):
                diff.append([nm(i), nm(k), format_rational(c)])
        return {"basis": [[n, d] for n, d in self.space.basis], "bracket": bracket,
                "differential": diff, "weights": list(self.weights)}

    @classmethod
    def from_json(cls, doc: dict, check: bool = True, name: str = "g") -> "FiniteDgLie":
        space = GradedSpace.from_pairs(doc["basis"])
        table: Dict[Tuple[int, int], SparseVec] = {}
        for entry in doc.get("bracket", []):
            a, b, c, coeff = entry
            key = (space.index(a), space.index(b))
            _add(table.setdefault(key, {}), space.index(c), parse_rational(coeff))
        diff: Dict[int, SparseVec] = {}
        for entry in doc.get("differential", []):
            a, c, coeff = entry
            _add(diff.setdefault(space.index(a), {}), space.index(c), parse_rational(coeff))
        return cls(space, table, diff, doc.get("weights"), check=check, name=name)


def _echelon_contains(basis: List[SparseVec], vec: SparseVec) -> bool:
    e = Echelon()
    for v in basis:
        e.insert(v)
    return e.contains(vec)


@dataclass
class LcsResult:
    terms: List[List[SparseVec]]          # terms[n-1] is a basis of L^n
    nilpotency_class: Optional[int]

    def dims(self) -> List[int]:
        return [len(t) for t in self.terms]


def lcs(g: FiniteDgLie, max_steps: int = None) -> LcsResult:
    """L^1 = g, L^n = [g, L^{n-1}]; stops at 0 (nilpotent) or when the chain stabilizes."""
    max_steps = g.dim + 2 if max_steps is None else max_steps
    current = [{i: Fraction(1)} for i in range(g.dim)]
    terms = [current] if current else []
    while current and len(terms) <= max_steps:
        nxt = span_basis([g.bracket({i: 1}, v) for i in range(g.dim) for v in current])
        if len(nxt) == len(current):
            return LcsResult(terms, None)
        terms.append(nxt)
        current = nxt
    if current:
        return LcsResult(terms, None)
    # the last entry is the zero term L^{c+1}
    return LcsResult(terms, len(terms) - 1)


# ----------------------------------------------------------------------------
# weight-truncated associative algebras and coalgebras


class WeightAlgebra(ChainComplex):
    """Associative algebra on positive-weight basis keys, truncated at max_weight.

    When unital, the key ``()`` is the unit (weight 0, degree 0).  The
    product is given by ``mult(k1, k2)``; products of total weight above
    max_weight are zero in the truncation.
    """

    def __init__(self, keys, degree, weight, d, mult: Callable[[Hashable, Hashable], SparseVec],
                 max_weight: int, unital: bool = False, label=repr, augmentation: Dict = None):
        super().__init__(list(keys), dict(degree), dict(weight), d, None, label)
        self._mult = mult
        self._cache: Dict[Tuple[Hashable, Hashable], SparseVec] = {}
        self.max_weight = max_weight
        self.unital = unital
        self.augmentation_values = augmentation

    UNIT = ()

    def mult(self, a, b) -> SparseVec:
        if self.unital:
            if a == self.UNIT:
                return {b: Fraction(1)}
            if b == self.UNIT:
                return {a: Fraction(1)}
        if self.weight[a] + self.weight[b] > self.max_weight:
            return {}
        key = (a, b)
        if key not in self._cache:
            self._cache[key] = self._mult(a, b)
        return self._cache[key]

    def multiply(self, u: SparseVec, v: SparseVec) -> SparseVec:
        out: SparseVec = {}
        for a, x in u.items():
            for b, y in v.items():
                axpy(out, x * y, self.mult(a, b))
        return out

    def augmentation(self, u: SparseVec) -> Fraction:
        if self.augmentation_values is not None:
            return sum((c * self.augmentation_values.get(k, 0) for k, c in u.items()), Fraction(0))
        return Fraction(u.get(self.UNIT, 0)) if self.unital else Fraction(0)

    def positive_keys(self) -> List[Hashable]:
        return [k for k in self.keys if not (self.unital and k == self.UNIT)]

    def augmentation_ideal(self) -> "WeightAlgebra":
        keys = self.positive_keys()
        d = {k: self.d.get(k, {}) for k in keys}
        return WeightAlgebra(keys, {k: self.degree[k] for k in keys}, {k: self.weight[k] for k in keys},
                             d, self._mult, self.max_weight, unital=False, label=self.label)

    def associativity_violation(self):
        ks = self.positive_keys()
        W = self.max_weight
        for a in ks:
            for b in ks:
                if self.weight[a] + self.weight[b] > W:
                    continue
                ab = self.mult(a, b)
                for c in ks:
                    if self.weight[a] + self.weight[b] + self.weight[c] > W:
                        continue
                    lhs = self.multiply(ab, {c: 1})
                    axpy(lhs, -1, self.multiply({a: 1}, self.mult(b, c)))
                    if lhs:
                        return ("associativity", self.label(a), self.label(b), self.label(c))
        return None

    def leibniz_violation(self):
        ks = self.positive_keys()
        for a in ks:
            for b in ks:
                if self.weight[a] + self.weight[b] > self.max_weight:
                    continue
                lhs = self.apply_d(self.mult(a, b))
                axpy(lhs, -1, self.multiply(self.d.get(a, {}), {b: 1}))
                axpy(lhs, -(-1) ** self.degree[a], self.multiply({a: 1}, self.d.get(b, {})))
                if lhs:
                    return ("leibniz", self.label(a), self.label(b))
        return None

    def check(self) -> None:
        w = self.associativity_violation()
        if w:
            raise StructureError(f"associativity fails on {w[1:]}", w)
        w = self.d_squared_violation()
        if w:
            raise StructureError(f"d² ≠ 0 on {self.label(w[0])}", ("d2", self.label(w[0])))
        w = self.leibniz_violation()
        if w:
            raise StructureError(f"Leibniz fails on {w[1:]}", w)

    @classmethod
    def from_table(cls, basis: Sequence[Tuple[str, int, int]], table: Dict[Tuple[str, str], Dict[str, object]],
                   differential: Dict[str, Dict[str, object]] = None, max_weight: int = None) -> "WeightAlgebra":
        """Non-unital algebra from named basis (name, degree, weight) and a product table."""
        keys = [b[0] for b in basis]
        degree = {b[0]: b[1] for b in basis}
        weight = {b[0]: b[2] for b in basis}
        max_weight = max(weight.values()) if max_weight is None else max_weight
        tab = {k: {o: Fraction(c) for o, c in v.items() if Fraction(c)} for k, v in table.items()}
        d = {k: {o: Fraction(c) for o, c in v.items()} for k, v in (differential or {}).items()}
        return cls(keys, degree, weight, d, lambda a, b: dict(tab.get((a, b), {})), max_weight, label=str)


class WeightCoalgebra(ChainComplex):
    """Conilpotent coalgebra on positive-weight keys with reduced coproduct tables."""

    def __init__(self, keys, degree, weight, d, coproduct: Dict[Hashable, Dict[Tuple, Fraction]],
                 max_weight: int, cocommutative: bool = False, label=repr, length=None):
        super().__init__(list(keys), dict(degree), dict(weight), d, None, label)
        self.coproduct = coproduct
        self.max_weight = max_weight
        self.cocommutative = cocommutative
        # coradical filtration: word length of each basis element
        self.length = length or {}

    def delta(self, u: SparseVec) -> Dict[Tuple, Fraction]:
        out: Dict[Tuple, Fraction] = {}
        for k, c in u.items():
            axpy(out, c, self.coproduct.get(k, {}))
        return out

    def coassociativity_violation(self):
        for k in self.keys:
            left: Dict[Tuple, Fraction] = {}
            right: Dict[Tuple, Fraction] = {}
            for (a, b), c in self.coproduct.get(k, {}).items():
                for (a1, a2), c1 in self.coproduct.get(a, {}).items():
                    _add(left, (a1, a2, b), c * c1)
                for (b1, b2), c2 in self.coproduct.get(b, {}).items():
                    _add(right, (a, b1, b2), c * c2)
            axpy(left, -1, right)
            if left:
                return ("coassociativity", self.label(k))
        return None

    def cocommutativity_violation(self):
        for k in self.keys:
            delta = self.coproduct.get(k, {})
            for (a, b), c in delta.items():
                sign = (-1) ** (self.degree[a] * self.degree[b])
                if delta.get((b, a), 0) != sign * c:
                    return ("cocommutativity", self.label(k), self.label(a), self.label(b))
        return None

    def coleibniz_violation(self):
        for k in self.keys:
            lhs: Dict[Tuple, Fraction] = {}
            for (a, b), c in self.coproduct.get(k, {}).items():
                for a2, c2 in self.d.get(a, {}).items():
                    _add(lhs, (a2, b), c * c2)
                for b2, c2 in self.d.get(b, {}).items():
                    _add(lhs, (a, b2), c * c2 * (-1) ** self.degree[a])
            axpy(lhs, -1, self.delta(self.d.get(k, {})))
            if lhs:
                return ("coleibniz", self.label(k))
        return None

    def check(self) -> None:
        for w in (self.coassociativity_violation(), self.coleibniz_violation(),
                  self.cocommutativity_violation() if self.cocommutative else None):
            if w:
                raise StructureError(f"{w[0]} fails at {w[1:]}", w)
        w = self.d_squared_violation()
        if w:
            raise StructureError(f"d² ≠ 0 on {self.label(w[0])}", ("d2", self.label(w[0])))


# ----------------------------------------------------------------------------
# universal enveloping algebra


class UniversalEnvelope(WeightAlgebra):
    """U(g) on PBW monomials (nondecreasing index tuples, odd generators at most once)."""

    def __init__(self, g: FiniteDgLie, max_weight: int):
        self.g = g
        self._straight: Dict[Tuple[int, ...], SparseVec] = {}
        keys = [()] + _monomials(g.dim, lambda i: g.weights[i], lambda i: g.degree(i) % 2, max_weight)
        degree = {m: sum(g.degree(i) for i in m) for m in keys}
        weight = {m: sum(g.weights[i] for i in m) for m in keys}
        super().__init__(keys, degree, weight, {}, self._concat, max_weight, unital=True,
                         label=self.monomial_name)
        self.d = {m: self._d_monomial(m) for m in keys}

    def monomial_name(self, m) -> str:
        if not m:
            return "1"
        nm = self.g.space.name
        parts = []
        i = 0
        while i < len(m):
            j = i
            while j < len(m) and m[j] == m[i]:
                j += 1
            parts.append(nm(m[i]) + (f"^{j - i}" if j - i > 1 else ""))
            i = j
        return "*".join(parts)

    def _concat(self, a, b) -> SparseVec:
        return self.straighten(tuple(a) + tuple(b))

    def straighten(self, word: Tuple[int, ...]) -> SparseVec:
        """Rewrite a word in the generators as a combination of PBW monomials."""
        g = self.g
        if sum(g.weights[i] for i in word) > self.max_weight:
            return {}
        if word in self._straight:
            return self._straight[word]
        out: SparseVec = {}
        for p in range(len(word) - 1):
            a, b = word[p], word[p + 1]
            if a > b:
                # ba = (-1)^{|a||b|} ab + [a,b] read backwards: a b = ± b a + [a, b]
                sign = (-1) ** (g.degree(a) * g.degree(b))
                axpy(out, sign, self.straighten(word[:p] + (b, a) + word[p + 2:]))
                for c, coeff in g.br(a, b).items():
                    axpy(out, coeff, self.straighten(word[:p] + (c,) + word[p + 2:]))
                break
            if a == b and g.degree(a) % 2:
                # x x = ½ [x, x] for odd x
                for c, coeff in g.br(a, a).items():
                    axpy(out, coeff / 2, self.straighten(word[:p] + (c,) + word[p + 2:]))
                break
        else:
            out = {word: Fraction(1)}
        self._straight[word] = out
        return out

    def _d_monomial(self, m) -> SparseVec:
        g = self.g
        out: SparseVec = {}
        sign = 1
        for p, i in enumerate(m):
            for c, coeff in g.diff.get(i, {}).items():
                axpy(out, sign * coeff, self.straighten(m[:p] + (c,) + m[p + 1:]))
            if g.degree(i) % 2:
                sign = -sign
        return out

    def generator(self, i: int) -> SparseVec:
        return {(i,): Fraction(1)}

    def dims_by_weight(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for m in self.positive_keys():
            out[self.weight[m]] = out.get(self.weight[m], 0) + 1
        return out

    def dims_by_length(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for m in self.positive_keys():
            out[len(m)] = out.get(len(m), 0) + 1
        return out


def _monomials(n: int, weight, parity, max_weight: int, start: int = 0) -> List[Tuple[int, ...]]:
    """Nonempty nondecreasing tuples (odd letters not repeated) of weight ≤ max_weight."""
    out: List[Tuple[int, ...]] = []

    def rec(prefix, lo, w):
        for i in range(lo, n):
            wi = w + weight(i)
            if wi > max_weight:
                continue
            if prefix and prefix[-1] == i and parity(i):
                continue
            m = prefix + (i,)
            out.append(m)
            rec(m, i, wi)

    rec((), start, 0)
    out.sort(key=lambda m: (sum(weight(i) for i in m), len(m), m))
    return out


def uea(g: FiniteDgLie, max_weight: int) -> UniversalEnvelope:
    if max_weight < 1:
        raise PreconditionError("weight cap must be at least 1")
    return UniversalEnvelope(g, max_weight)


def induced_uea_map(f: Dict[int, SparseVec], source: UniversalEnvelope,
                    target: UniversalEnvelope) -> Dict[Hashable, SparseVec]:
    """Algebra map U(h) → U(g) induced by a weight-preserving Lie map f: h → g."""
    out: Dict[Hashable, SparseVec] = {}
    for m in source.keys:
        v: SparseVec = {(): Fraction(1)}
        for i in m:
            v = target.multiply(v, {(j,): c for j, c in f.get(i, {}).items()})
        out[m] = v
    return out


# ----------------------------------------------------------------------------
# changing the augmentation


@dataclass
class AugmentationFix:
    """Algebra automorphism α of U(g) with α(x) = x − ε̄(x)·1 on generators."""

    algebra: UniversalEnvelope
    eps_bar: Dict[int, Fraction]

    def alpha_generator(self, i: int) -> SparseVec:
        v = {(i,): Fraction(1)}
        if self.eps_bar.get(i):
            v[()] = -self.eps_bar[i]
        return v

    def alpha(self, u: SparseVec) -> SparseVec:
        A = self.algebra
        out: SparseVec = {}
        for m, c in u.items():
            img: SparseVec = {(): Fraction(1)}
            for i in m:
                img = A.multiply(img, self.alpha_generator(i))
            axpy(out, c, img)
        return out

    def eps_bar_of(self, u: SparseVec) -> Fraction:
        total = Fraction(0)
        for m, c in u.items():
            t = Fraction(c)
            for i in m:
                t *= self.eps_bar.get(i, 0)
            total += t
        return total

    def verify(self, max_weight: int = None):
        """First failure among ε = ε̄∘α, multiplicativity, and unitriangularity; None if all hold."""
        A = self.algebra
        W = A.max_weight if max_weight is None else max_weight
        keys = [m for m in A.keys if A.weight[m] <= W]
        for m in keys:
            eps = Fraction(1) if m == () else Fraction(0)
            if self.eps_bar_of(self.alpha({m: 1})) != eps:
                return ("augmentation", A.label(m))
            # associated graded of α for the weight filtration is the identity
            top = {k: c for k, c in self.alpha({m: 1}).items() if A.weight[k] >= A.weight[m]}
            if top != {m: 1}:
                return ("not unitriangular", A.label(m))
        for a in keys:
            for b in keys:
                if A.weight[a] + A.weight[b] > W:
                    continue
                lhs = self.alpha(A.mult(a, b))
                axpy(lhs, -1, A.multiply(self.alpha({a: 1}), self.alpha({b: 1})))
                if lhs:
                    return ("not multiplicative", A.label(a), A.label(b))
        return None


def fix_augmentation(A: UniversalEnvelope, eps_bar: Dict) -> AugmentationFix:
    """α with ε = ε̄∘α for an alternative augmentation ε̄ given on generators."""
    g = A.g
    values: Dict[int, Fraction] = {}
    for k, v in eps_bar.items():
        i = g.space.index(k) if isinstance(k, str) else k
        values[i] = Fraction(v)
    nm = g.space.name
    for i, v in values.items():
        if v and g.degree(i) != 0:
            raise PreconditionError(f"ε̄ must vanish on {nm(i)} of nonzero degree")
    # ε̄ must kill the relations x y − (−1)^{|x||y|} y x − [x, y] and d
    for (i, j), out in g.table.items():
        lhs = values.get(i, 0) * values.get(j, 0) - (-1) ** (g.degree(i) * g.degree(j)) * values.get(j, 0) * values.get(i, 0)
        rhs = sum((c * values.get(k, 0) for k, c in out.items()), Fraction(0))
        if lhs != rhs:
            raise PreconditionError(f"ε̄ is not an algebra map: fails on the relation for {nm(i)}, {nm(j)}")
    for i, out in g.diff.items():
        if sum((c * values.get(k, 0) for k, c in out.items()), Fraction(0)):
            raise PreconditionError(f"ε̄ is not a chain map: ε̄(d {nm(i)}) ≠ 0")
    return AugmentationFix(A, values)


# ----------------------------------------------------------------------------
# Chevalley–Eilenberg chains and the bar construction


def ce_chains(g: FiniteDgLie, max_weight: int) -> WeightCoalgebra:
    """Sym^c(s g) with the Chevalley–Eilenberg differential, reduced (no weight 0)."""
    if max_weight < 1:
        raise PreconditionError("weight cap must be at least 1")
    spar = lambda i: (g.degree(i) + 1) % 2
    keys = _monomials(g.dim, lambda i: g.weights[i], spar, max_weight)
    degree = {m: sum(g.degree(i) + 1 for i in m) for m in keys}
    weight = {m: sum(g.weights[i] for i in m) for m in keys}

    def q1(i):
        return {j: -c for j, c in g.diff.get(i, {}).items()}

    def q2(i, j):
        sign = (-1) ** g.degree(i)
        return {k: sign * c for k, c in g.br(i, j).items()}

    def put(out, sign, coeffs, rest):
        for k, c in coeffs.items():
            s, mono = sym_normal((k,) + rest, spar)
            if s and mono:
                _add(out, mono, sign * s * c)

    d: Dict[Hashable, SparseVec] = {}
    coproduct: Dict[Hashable, Dict[Tuple, Fraction]] = {}
    for m in keys:
        pars = [spar(i) for i in m]
        n = len(m)
        out: SparseVec = {}
        for a in range(n):
            rest = m[:a] + m[a + 1:]
            put(out, unshuffle_sign(pars, (a,)), q1(m[a]), rest)
        for a, b in combinations(range(n), 2):
            rest = tuple(m[c] for c in range(n) if c not in (a, b))
            put(out, unshuffle_sign(pars, (a, b)), q2(m[a], m[b]), rest)
        d[m] = out
        cop: Dict[Tuple, Fraction] = {}
        for r in range(1, n):
            for chosen in combinations(range(n), r):
                left = tuple(m[c] for c in chosen)
                right = tuple(m[c] for c in range(n) if c not in chosen)
                _add(cop, (left, right), Fraction(unshuffle_sign(pars, chosen)))
        coproduct[m] = cop
    nm = g.space.name
    label = lambda m: "∧".join("s" + nm(i) for i in m)
    return WeightCoalgebra(keys, degree, weight, d, coproduct, max_weight, cocommutative=True,
                           label=label, length={m: len(m) for m in keys})


def bar(A: WeightAlgebra, max_weight: int) -> WeightCoalgebra:
    """Tensor coalgebra on s(A) with the bar differential; A is taken non-unital."""
    if max_weight < 1:
        raise PreconditionError("weight cap must be at least 1")
    base = A.positive_keys()
    keys: List[Tuple] = []

    def rec(prefix, w):
        for a in base:
            wa = w + A.weight[a]
            if wa <= max_weight:
                keys.append(prefix + (a,))
                rec(prefix + (a,), wa)

    rec((), 0)
    keys.sort(key=lambda t: (sum(A.weight[a] for a in t), len(t)))
    spar = {a: (A.degree[a] + 1) % 2 for a in base}
    degree = {t: sum(A.degree[a] + 1 for a in t) for t in keys}
    weight = {t: sum(A.weight[a] for a in t) for t in keys}
    d: Dict[Hashable, SparseVec] = {}
    coproduct: Dict[Hashable, Dict[Tuple, Fraction]] = {}
    for t in keys:
        out: SparseVec = {}
        sign = 1
        for i, a in enumerate(t):
            for k, c in A.d.get(a, {}).items():
                _add(out, t[:i] + (k,) + t[i + 1:], -sign * c)
            if i + 1 < len(t):
                s2 = sign * (-1) ** A.degree[a]
                for k, c in A.mult(a, t[i + 1]).items():
                    _add(out, t[:i] + (k,) + t[i + 2:], s2 * c)
            if spar[a]:
                sign = -sign
        d[t] = out
        coproduct[t] = {(t[:i], t[i:]): Fraction(1) for i in range(1, len(t))}
    label = lambda t: "[" + "|".join(A.label(a) for a in t) + "]"
    return WeightCoalgebra(keys, degree, weight, d, coproduct, max_weight, label=label,
                           length={t: len(t) for t in keys})


# ----------------------------------------------------------------------------
# cobar constructions


ASSOCIATIVE = "assoc"
LIE = "lie"


class CobarAlgebra(WeightAlgebra):
    """Tensor algebra on s^{-1}C with the cobar differential, truncated by weight.

    Words are tuples of coalgebra keys (letters).  Truncation bounds word
    length, so at this scale the completed and uncompleted constructions have
    the same underlying space; ``completed`` only records which one was asked for.
    """

    def __init__(self, C: WeightCoalgebra, max_weight: int, unital: bool = False, completed: bool = True):
        self.coalgebra = C
        self.completed = completed
        letters = list(C.keys)
        self.letter_degree = {c: C.degree[c] - 1 for c in letters}
        words: List[Tuple] = []

        def rec(prefix, w):
            for c in letters:
                wc = w + C.weight[c]
                if wc <= max_weight:
                    words.append(prefix + (c,))
                    rec(prefix + (c,), wc)

        rec((), 0)
        words.sort(key=lambda t: (sum(C.weight[c] for c in t), len(t)))
        keys = ([()] if unital else []) + words
        degree = {t: sum(self.letter_degree[c] for c in t) for t in keys}
        weight = {t: sum(C.weight[c] for c in t) for t in keys}
        label = lambda t: "1" if not t else "⟨" + "|".join(C.label(c) for c in t) + "⟩"
        super().__init__(keys, degree, weight, {}, lambda a, b: {a + b: Fraction(1)}, max_weight,
                         unital=unital, label=label)
        self.delta_letter = {c: self._delta(c) for c in letters}
        self.d = {t: self.derivation(t) for t in keys}

    def _delta(self, c) -> SparseVec:
        C = self.coalgebra
        out: SparseVec = {}
        for k, coeff in C.d.get(c, {}).items():
            _add(out, (k,), -coeff)
        for (a, b), coeff in C.coproduct.get(c, {}).items():
            # sign chosen so that the counit L C g → g is a chain map
            _add(out, (a, b), -(-1) ** C.degree[a] * coeff)
        return out

    def derivation(self, word: Tuple) -> SparseVec:
        out: SparseVec = {}
        sign = 1
        for i, c in enumerate(word):
            for w, coeff in self.delta_letter[c].items():
                key = word[:i] + w + word[i + 1:]
                if sum(self.coalgebra.weight[x] for x in key) <= self.max_weight:
                    _add(out, key, sign * coeff)
            if self.letter_degree[c] % 2:
                sign = -sign
        return out

    def word_degree(self, word) -> int:
        return sum(self.letter_degree[c] for c in word)

    def commutator(self, u: SparseVec, v: SparseVec) -> SparseVec:
        """Graded commutator of homogeneous elements."""
        out = self.multiply(u, v)
        if not u or not v:
            return out
        du = self.word_degree(next(iter(u)))
        dv = self.word_degree(next(iter(v)))
        axpy(out, -(-1) ** (du * dv), self.multiply(v, u))
        return out


@dataclass
class LieCobar:
    """Free dg Lie algebra on s^{-1}C realized by Lie polynomials inside the cobar algebra.

    ``lie`` has basis elements adapted to degree, weight, bracket length (the
    operadic filtration) and an optional extra letter grading; ``embedding``
    sends each basis element to its Lie polynomial; ``expressions`` writes each
    basis element as a combination of right-normed brackets of letters.
    """

    lie: FiniteDgLie
    ambient: CobarAlgebra
    embedding: Dict[int, SparseVec]
    expressions: Dict[int, Dict[Tuple, Fraction]]
    length: Dict[int, int]
    extra: Dict[int, int]
    completed: bool = True


def cobar_complete(C: WeightCoalgebra, max_weight: int, flavor: str = ASSOCIATIVE,
                   letter_grading: Callable[[Hashable], int] = None, unital: bool = False,
                   completed: bool = True):
    """Completed cobar construction truncated at weight max_weight.

    flavor "assoc" gives the tensor algebra; flavor "lie" the free Lie algebra
    (needs a cocommutative C).  Under the weight cap the completed and plain
    constructions coincide; ``completed`` is recorded on the result.
    """
    if flavor == ASSOCIATIVE:
        return CobarAlgebra(C, max_weight, unital=unital, completed=completed)
    if flavor != LIE:
        raise PreconditionError(f"unknown cobar flavor {flavor!r}")
    w = C.cocommutativity_violation()
    if w is not None:
        raise PreconditionError(f"the Lie cobar construction needs a cocommutative coalgebra: {w}")
    L = lie_cobar(C, max_weight, letter_grading)
    L.completed = completed
    return L


def lie_cobar(C: WeightCoalgebra, max_weight: int, letter_grading=None) -> LieCobar:
    Om = CobarAlgebra(C, max_weight)
    extra_of = letter_grading or (lambda c: 0)
    letters = list(C.keys)

    def grade(word):
        return (Om.word_degree(word), sum(C.weight[c] for c in word), len(word),
                sum(extra_of(c) for c in word))

    groups: Dict[Tuple, Echelon] = {}
    seqs = [w for w in Om.keys if w]
    for seq in seqs:
        # right-normed bracket [c1, [c2, [..., ck]]]
        v: SparseVec = {(seq[-1],): Fraction(1)}
        for c in reversed(seq[:-1]):
            v = Om.commutator({(c,): Fraction(1)}, v)
        if v:
            groups.setdefault(grade(seq), Echelon(track=True)).insert(v, seq)
    basis: List[Tuple[Tuple, SparseVec, SparseVec]] = []
    for gr in sorted(groups, key=lambda t: (t[1], t[2], t[0], t[3])):
        ech = groups[gr]
        for piv in sorted(ech.rows, key=lambda k: (len(k), repr(k))):
            basis.append((gr, piv, ech.rows[piv], ech.combos[piv]))
    index = {(gr, piv): n for n, (gr, piv, _, _) in enumerate(basis)}

    def coords(vec: SparseVec) -> SparseVec:
        parts: Dict[Tuple, SparseVec] = {}
        for word, c in vec.items():
            parts.setdefault(grade(word), {})[word] = c
        out: SparseVec = {}
        for gr, part in parts.items():
            ech = groups.get(gr)
            if ech is None:
                raise ArithmeticError("element outside the span of Lie polynomials")
            rem, _ = ech.reduce(part)
            if rem:
                raise ArithmeticError("element outside the span of Lie polynomials")
            for piv in ech.rows:
                if part.get(piv):
                    out[index[(gr, piv)]] = part[piv]
        return out

    names = []
    for n, (gr, piv, row, combo) in enumerate(basis):
        names.append((f"L{n}", gr[0]))
    space = GradedSpace.from_pairs(names)
    weights = [gr[1] for gr, _, _, _ in basis]
    table: Dict[Tuple[int, int], SparseVec] = {}
    for a, (ga, _, ra, _) in enumerate(basis):
        for b, (gb, _, rb, _) in enumerate(basis):
            if b < a or ga[1] + gb[1] > max_weight:
                continue
            out = coords(Om.commutator(ra, rb))
            if out:
                table[(a, b)] = out
    diff = {}
    for a, (_, _, ra, _) in enumerate(basis):
        out = coords(Om.apply_d(ra))
        if out:
            diff[a] = out
    lie = FiniteDgLie(space, table, diff, weights, check=False, name="L(C)", max_weight=max_weight)
    return LieCobar(lie, Om, {n: b[2] for n, b in enumerate(basis)},
                    {n: b[3] for n, b in enumerate(basis)},
                    {n: b[0][2] for n, b in enumerate(basis)},
                    {n: b[0][3] for n, b in enumerate(basis)})


def lie_as_complex(g: FiniteDgLie, filtration: Dict[int, int] = None) -> ChainComplex:
    keys = list(range(g.dim))
    return ChainComplex(keys, {i: g.degree(i) for i in keys}, {i: g.weights[i] for i in keys},
                        {i: dict(g.diff.get(i, {})) for i in keys}, filtration, g.space.name)


def cobar_u_comparison(L: LieCobar, max_weight: int):
    """Algebra map U(L C) → (Ω C)⁺ extending the inclusion; returns (U, Ω⁺, map)."""
    U = uea(L.lie, max_weight)
    Om = CobarAlgebra(L.ambient.coalgebra, max_weight, unital=True)
    fmap: Dict[Hashable, SparseVec] = {}
    for m in U.keys:
        v: SparseVec = {(): Fraction(1)}
        for i in m:
            v = Om.multiply(v, L.embedding[i])
        fmap[m] = v
    return U, Om, fmap


@dataclass
class IsomorphismReport:
    ok: bool
    dims: Dict[int, Tuple[int, int]]
    failure: Optional[tuple] = None


def check_algebra_isomorphism(U: WeightAlgebra, V: WeightAlgebra, fmap: Dict[Hashable, SparseVec],
                              max_weight: int) -> IsomorphismReport:
    """Bijective per weight, multiplicative, unital, and a chain map, all exactly."""
    dims: Dict[int, Tuple[int, int]] = {}
    for w in range(0, max_weight + 1):
        src = [k for k in U.keys if U.weight[k] == w]
        tgt = [k for k in V.keys if V.weight[k] == w]
        r = rank([fmap[k] for k in src])
        dims[w] = (len(src), len(tgt))
        if not (len(src) == len(tgt) == r):
            return IsomorphismReport(False, dims, ("not bijective", w))
    for a in U.keys:
        for b in U.keys:
            if U.weight[a] + U.weight[b] > max_weight:
                continue
            lhs: SparseVec = {}
            for k, c in U.mult(a, b).items():
                axpy(lhs, c, fmap[k])
            axpy(lhs, -1, V.multiply(fmap[a], fmap[b]))
            if lhs:
                return IsomorphismReport(False, dims, ("not multiplicative", U.label(a), U.label(b)))
    for a in U.keys:
        lhs: SparseVec = {}
        for k, c in U.d.get(a, {}).items():
            axpy(lhs, c, fmap[k])
        axpy(lhs, -1, V.apply_d(fmap[a]))
        if lhs:
            return IsomorphismReport(False, dims, ("not a chain map", U.label(a)))
    return IsomorphismReport(True, dims)


# ----------------------------------------------------------------------------
# filtrations


def operadic_filtration(A, n: int) -> List[SparseVec]:
    """Basis of F^n: the lower central series term for a Lie algebra, the n-th
    power of the (augmentation) ideal for an associative algebra."""
    if n < 1:
        raise PreconditionError("filtration index starts at 1")
    if isinstance(A, FiniteDgLie):
        terms = lcs(A).terms
        return terms[n - 1] if n - 1 < len(terms) else []
    gens = A.positive_keys()
    current = [{k: Fraction(1)} for k in gens]
    for _ in range(n - 1):
        current = span_basis([A.multiply({a: 1}, v) for a in gens for v in current])
    return current


def is_nilpotent(A) -> bool:
    if isinstance(A, FiniteDgLie):
        return lcs(A).nilpotency_class is not None
    n = 1
    while True:
        if not operadic_filtration(A, n):
            return True
        if n > A.max_weight + 1:
            return False
        n += 1


def completion_dims(g: FiniteDgLie, depth: int) -> List[int]:
    """dim g / L^n for n = 1..depth; constant equal to dim g once the series hits 0."""
    terms = lcs(g).terms
    return [g.dim - (len(terms[n - 1]) if n - 1 < len(terms) else 0) for n in range(1, depth + 1)]


# ----------------------------------------------------------------------------
# filtered quasi-isomorphisms


@dataclass
class GradedPieceReport:
    p: int
    source_homology: Dict[Tuple[int, int], int]
    target_homology: Dict[Tuple[int, int], int]
    cone_homology: Dict[Tuple[int, int], int]
    ok: bool
    reason: str = ""

    def as_dict(self):
        fmt = lambda h: {f"{k[0]},{k[1]}": v for k, v in sorted(h.items()) if v}
        return {"p": self.p, "ok": self.ok, "reason": self.reason,
                "source_homology": fmt(self.source_homology),
                "target_homology": fmt(self.target_homology),
                "cone_homology": fmt(self.cone_homology)}


@dataclass
class FilteredQiReport:
    pieces: List[GradedPieceReport]

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.pieces)

    @property
    def first_failure(self) -> Optional[int]:
        for p in self.pieces:
            if not p.ok:
                return p.p
        return None


def filtered_qi_check(source: ChainComplex, target: ChainComplex, fmap: Dict[Hashable, SparseVec],
                      p_max: int, p_min: int = 1) -> FilteredQiReport:
    """Compare Gr^p of source and target under fmap for p_min ≤ p ≤ p_max."""
    Fs, Ft = source.filtration, target.filtration
    if Fs is None or Ft is None:
        raise PreconditionError("both complexes need a filtration")
    for k in source.keys:
        for j in fmap.get(k, {}):
            if Ft[j] < Fs[k]:
                raise PreconditionError(f"map lowers the filtration on {source.label(k)}")
    pieces = []
    for p in range(p_min, p_max + 1):
        gs, gt = source.gr(p), target.gr(p)
        kept = set(gt.keys)
        f = {k: {j: c for j, c in fmap.get(k, {}).items() if j in kept} for k in gs.keys}
        reason = ""
        for k in gs.keys:
            lhs: SparseVec = {}
            for j, c in gs.d.get(k, {}).items():
                axpy(lhs, c, f.get(j, {}))
            axpy(lhs, -1, gt.apply_d(f[k]))
            if lhs:
                reason = f"not a chain map on {source.label(k)}"
                break
        hs, ht = gs.homology(), gt.homology()
        hc = cone(gs, gt, f).homology() if not reason else {}
        if not reason and any(hc.values()):
            reason = "induced map is not an isomorphism on homology"
        pieces.append(GradedPieceReport(p, hs, ht, hc, not reason, reason))
    return FilteredQiReport(pieces)


def identity_map(C: ChainComplex) -> Dict[Hashable, SparseVec]:
    return {k: {k: Fraction(1)} for k in C.keys}


# ----------------------------------------------------------------------------
# homotopy completion model


@dataclass
class CompletionModel:
    """Q g = L C g truncated at weight W with the F- and G-filtrations.

    F comes from the lower central series of g on the letters (the sum of the
    levels of the g-factors); G is the operadic filtration of Q g, i.e. the
    bracket length in letters.
    """

    g: FiniteDgLie
    coalgebra: WeightCoalgebra
    cobar: LieCobar
    max_weight: int

    @property
    def q(self) -> FiniteDgLie:
        return self.cobar.lie

    def complex(self, filtration: str = "F") -> ChainComplex:
        filt = self.cobar.extra if filtration == "F" else self.cobar.length
        return lie_as_complex(self.q, dict(filt))

    def target_complex(self) -> ChainComplex:
        return lie_as_complex(self.g, {i: self.g.lcs_level(i) for i in range(self.g.dim)})

    def counit(self) -> Dict[int, SparseVec]:
        """The Lie map Q g → g: a letter s^{-1}(s x) goes to x, longer letters to 0."""
        g = self.g
        out: Dict[int, SparseVec] = {}
        for n, combo in self.cobar.expressions.items():
            total: SparseVec = {}
            for seq, c in combo.items():
                if any(len(letter) != 1 for letter in seq):
                    continue
                v: SparseVec = {seq[-1][0]: Fraction(1)}
                for letter in reversed(seq[:-1]):
                    v = g.bracket({letter[0]: Fraction(1)}, v)
                axpy(total, c, v)
            out[n] = total
        return out

    def counit_check(self) -> Optional[tuple]:
        """None if the counit is a dg Lie map, else a witness."""
        f = self.counit()
        q, g = self.q, self.g
        for a in range(q.dim):
            lhs: SparseVec = {}
            for k, c in q.diff.get(a, {}).items():
                axpy(lhs, c, f[k])
            axpy(lhs, -1, g.d(f[a]))
            if lhs:
                return ("differential", q.space.name(a))
        for (a, b), out in q.table.items():
            lhs: SparseVec = {}
            for k, c in out.items():
                axpy(lhs, c, f[k])
            axpy(lhs, -1, g.bracket(f[a], f[b]))
            if lhs:
                return ("bracket", q.space.name(a), q.space.name(b))
        return None

    def filtered_qi(self, p_max: int) -> FilteredQiReport:
        return filtered_qi_check(self.complex("F"), self.target_complex(), self.counit(), p_max)

    def commensurability(self) -> dict:
        """Degreewise witnesses that F and G bound each other.

        For each (degree k, F-level p) the largest G-level present must be ≤ p
        (so G terminates on Gr_F^p); for each (degree k, G-level n) the largest
        F-level present must be ≤ (k + n)·c for the nilpotency class c when g
        is nonnegatively graded (so F terminates on Gr_G^n independently of
        the truncation).
        """
        q = self.q
        cls = lcs(self.g).nilpotency_class
        max_g: Dict[Tuple[int, int], int] = {}
        max_f: Dict[Tuple[int, int], int] = {}
        for a in range(q.dim):
            k, p, n = q.degree(a), self.cobar.extra[a], self.cobar.length[a]
            max_g[(k, p)] = max(max_g.get((k, p), 0), n)
            max_f[(k, n)] = max(max_f.get((k, n), 0), p)
        nonneg = all(d >= 0 for d in self.g.space.degrees)
        g_ok = all(n <= p for (k, p), n in max_g.items())
        f_ok = nonneg and cls is not None and all(p <= (k + n) * cls for (k, n), p in max_f.items())
        return {"G_terminates_on_Gr_F": g_ok, "F_terminates_on_Gr_G": f_ok,
                "max_G_by_degree_and_F": {f"{k},{p}": n for (k, p), n in sorted(max_g.items())},
                "max_F_by_degree_and_G": {f"{k},{n}": p for (k, n), p in sorted(max_f.items())},
                "nilpotency_class": cls, "nonnegatively_graded": nonneg}

    def degreewise_nilpotency(self) -> Optional[tuple]:
        """For strictly negatively graded g every element of bracket length n has
        degree ≤ −n, so the operadic filtration vanishes degreewise.  Returns
        the first counterexample, or None."""
        q = self.q
        for a in range(q.dim):
            if q.degree(a) > -self.cobar.length[a]:
                return (q.space.name(a), q.degree(a), self.cobar.length[a])
        return None


def homotopy_completion_model(g: FiniteDgLie, max_weight: int) -> CompletionModel:
    if max_weight < 1:
        raise PreconditionError("weight cap must be at least 1")
    C = ce_chains(g, max_weight)
    level = lambda m: sum(g.lcs_level(i) for i in m)
    L = lie_cobar(C, max_weight, level)
    return CompletionModel(g, C, L, max_weight)


# ----------------------------------------------------------------------------
# maps between constructions


def lie_map_check(f: Dict[int, SparseVec], h: FiniteDgLie, g: FiniteDgLie) -> Optional[tuple]:
    """None if f: h → g preserves bracket, differential, degree and weight."""
    for i in range(h.dim):
        for k in f.get(i, {}):
            if g.degree(k) != h.degree(i) or g.weights[k] != h.weights[i]:
                return ("grading", h.space.name(i))
        lhs = g.d(f.get(i, {}))
        for k, c in h.diff.get(i, {}).items():
            axpy(lhs, -c, f.get(k, {}))
        if lhs:
            return ("differential", h.space.name(i))
    for (i, j), out in h.table.items():
        lhs = g.bracket(f.get(i, {}), f.get(j, {}))
        for k, c in out.items():
            axpy(lhs, -c, f.get(k, {}))
        if lhs:
            return ("bracket", h.space.name(i), h.space.name(j))
    return None


def ce_map(f: Dict[int, SparseVec], h: FiniteDgLie, Ch: WeightCoalgebra, Cg: WeightCoalgebra,
           g: FiniteDgLie) -> Dict[Hashable, SparseVec]:
    """Coalgebra map Sym^c(s f): C h → C g."""
    spar = lambda i: (g.degree(i) + 1) % 2
    out: Dict[Hashable, SparseVec] = {}
    for m in Ch.keys:
        acc: Dict[Tuple, Fraction] = {(): Fraction(1)}
        for i in m:
            nxt: Dict[Tuple, Fraction] = {}
            for prefix, c in acc.items():
                for j, b in f.get(i, {}).items():
                    _add(nxt, prefix + (j,), c * b)
            acc = nxt
        img: SparseVec = {}
        for word, c in acc.items():
            s, mono = sym_normal(word, spar)
            if s and mono in Cg.d:
                _add(img, mono, s * c)
        out[m] = img
    return out


def cobar_map(fmap: Dict[Hashable, SparseVec], source: CobarAlgebra,
              target: CobarAlgebra) -> Dict[Hashable, SparseVec]:
    """Algebra map Ω C → Ω D induced by a strict coalgebra map C → D."""
    out: Dict[Hashable, SparseVec] = {}
    for word in source.keys:
        v: SparseVec = {(): Fraction(1)}
        for c in word:
            v = {a + (b,): x * y for a, x in v.items() for b, y in fmap.get(c, {}).items()}
            merged: SparseVec = {}
            for k, x in v.items():
                _add(merged, k, x)
            v = merged
        out[word] = v
    return out


def tensor_length_filtration(Om: CobarAlgebra) -> ChainComplex:
    return ChainComplex(list(Om.keys), Om.degree, Om.weight, Om.d, {w: len(w) for w in Om.keys}, Om.label)


def chain_map_violation(source: ChainComplex, target: ChainComplex, fmap) -> Optional[Hashable]:
    for k in source.keys:
        lhs: SparseVec = {}
        for j, c in source.d.get(k, {}).items():
            axpy(lhs, c, fmap.get(j, {}))
        axpy(lhs, -1, target.apply_d(fmap.get(k, {})))
        if lhs:
            return k
    return None


def quasi_isomorphism_check(source: ChainComplex, target: ChainComplex, fmap) -> Dict[Tuple[int, int], int]:
    """Cone homology per block; all zero iff fmap is a quasi-isomorphism."""
    return cone(source, target, fmap).homology()
