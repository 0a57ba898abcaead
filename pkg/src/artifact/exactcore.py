"""Exact substrate: rationals, graded spaces, Koszul signs, sparse multilinear maps.

Maps come in two orientations.  An algebra-oriented map sends V^{⊗n} to V and is
stored as ``entries[(i_1, ..., i_n)] = {j: c}``.  A coalgebra-oriented map sends
V to V^{⊗n}; it is stored in mirror form, keyed by the output tuple with the
input index in the value.  Every composition formula below acts on the stored
tables, so the coalgebra orientation reuses the algebra-side signs verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

Rational = Fraction

ALGEBRA = "algebra"
COALGEBRA = "coalgebra"
ORIENTATIONS = (ALGEBRA, COALGEBRA)

Entries = Dict[Tuple[int, ...], Dict[int, Fraction]]


def parse_rational(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        return Fraction(text.strip())
    raise TypeError(f"cannot read a rational from {text!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class GradedSpace:
    """Finite-dimensional graded vector space with a named, ordered basis."""

    basis: Tuple[Tuple[str, int], ...]
    _index: Dict[str, int] = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        basis = tuple((str(name), int(deg)) for name, deg in self.basis)
        object.__setattr__(self, "basis", basis)
        index = {}
        for i, (name, _) in enumerate(basis):
            if name in index:
                raise ValueError(f"duplicate basis name {name!r}")
            index[name] = i
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence]) -> "GradedSpace":
        return cls(tuple((p[0], p[1]) for p in pairs))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def degree(self, i: int) -> int:
        return self.basis[i][1]

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(d for _, d in self.basis)

    def name(self, i: int) -> str:
        return self.basis[i][0]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown basis element {name!r}") from None

    def shift(self, k: int) -> "GradedSpace":
        return GradedSpace(tuple((n, d + k) for n, d in self.basis))


@dataclass(frozen=True)
class Vector:
    space: GradedSpace
    coords: Mapping[int, Fraction]

    def __post_init__(self):
        clean = {}
        for i, c in self.coords.items():
            if not 0 <= i < self.space.dim:
                raise IndexError(f"basis index {i} out of range")
            c = Fraction(c)
            if c:
                clean[i] = c
        object.__setattr__(self, "coords", clean)

    @classmethod
    def basis_vector(cls, space: GradedSpace, name_or_index) -> "Vector":
        i = space.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        return cls(space, {i: Fraction(1)})

    def __add__(self, other: "Vector") -> "Vector":
        out = dict(self.coords)
        for i, c in other.coords.items():
            out[i] = out.get(i, 0) + c
        return Vector(self.space, out)

    def __sub__(self, other: "Vector") -> "Vector":
        return self + other.scale(-1)

    def scale(self, c) -> "Vector":
        c = Fraction(c)
        return Vector(self.space, {i: c * v for i, v in self.coords.items()})

    def is_zero(self) -> bool:
        return not self.coords

    def is_homogeneous(self) -> bool:
        return len({self.space.degree(i) for i in self.coords}) <= 1

    def degree(self):
        degs = {self.space.degree(i) for i in self.coords}
        if len(degs) > 1:
            raise ValueError("vector is not homogeneous")
        return degs.pop() if degs else None


def koszul_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of the place permutation moving factor i to position perm[i].

    ``perm`` is 0-based.  The sign is the product of (-1)^{d_i d_j} over pairs
    i < j with perm[i] > perm[j].
    """
    n = len(perm)
    if n != len(degrees):
        raise ValueError("permutation and degree list have different lengths")
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm!r} is not a permutation")
    odd = [i for i in range(n) if degrees[i] % 2]
    sign = 1
    for a in range(len(odd)):
        i = odd[a]
        for b in range(a + 1, len(odd)):
            if perm[i] > perm[odd[b]]:
                sign = -sign
    return sign


def _clean(entries: Entries) -> Entries:
    out = {}
    for key, vec in entries.items():
        v = {j: c for j, c in vec.items() if c}
        if v:
            out[key] = v
    return out


def add_into(target: Entries, key, out: int, c) -> None:
    """Accumulate c at (key, out) in a mutable entry table."""
    vec = target.get(key)
    if vec is None:
        target[key] = {out: c}
    else:
        vec[out] = vec.get(out, 0) + c


@dataclass(frozen=True)
class MultilinearMap:
    """Sparse multilinear map of fixed arity and homogeneous degree.

    Instances are treated as immutable; the entry table must not be mutated
    after construction.
    """

    arity: int
    source: GradedSpace
    degree: int
    entries: Entries
    orientation: str = ALGEBRA
    target: GradedSpace = None

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("arity must be at least 1")
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"unknown orientation {self.orientation!r}")
        if self.target is None:
            object.__setattr__(self, "target", self.source)
        object.__setattr__(self, "entries", _clean(self.entries))

    # the tuple side of the stored table lives in `source` and the single
    # index side in `target` for algebra maps; coalgebra maps swap them
    @property
    def tuple_space(self) -> GradedSpace:
        return self.source if self.orientation == ALGEBRA else self.target

    @property
    def single_space(self) -> GradedSpace:
        return self.target if self.orientation == ALGEBRA else self.source

    def validate(self) -> None:
        tsp, ssp = self.tuple_space, self.single_space
        for key, vec in self.entries.items():
            if len(key) != self.arity:
                raise ValueError(f"entry {key} has wrong arity")
            for i in key:
                if not 0 <= i < tsp.dim:
                    raise IndexError(f"basis index {i} out of range")
            tdeg = sum(tsp.degree(i) for i in key)
            for j in vec:
                if not 0 <= j < ssp.dim:
                    raise IndexError(f"basis index {j} out of range")
                if self.orientation == ALGEBRA:
                    ok = ssp.degree(j) == tdeg + self.degree
                else:
                    ok = tdeg == ssp.degree(j) + self.degree
                if not ok:
                    raise ValueError(
                        f"entry {key}->{j} violates degree {self.degree} homogeneity")

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultilinearMap):
            return NotImplemented
        return (self.arity == other.arity and self.orientation == other.orientation
                and self.source == other.source and self.target == other.target
                and (self.degree == other.degree or self.is_zero())
                and self.entries == other.entries)

    __hash__ = None

    def _like(self, entries: Entries, degree: int = None) -> "MultilinearMap":
        return MultilinearMap(self.arity, self.source, self.degree if degree is None else degree,
                              entries, self.orientation, self.target)

    def __add__(self, other: "MultilinearMap") -> "MultilinearMap":
        _check_compatible(self, other)
        out = {k: dict(v) for k, v in self.entries.items()}
        for key, vec in other.entries.items():
            for j, c in vec.items():
                add_into(out, key, j, c)
        deg = self.degree if not self.is_zero() else other.degree
        return self._like(out, deg)

    def __sub__(self, other: "MultilinearMap") -> "MultilinearMap":
        return self + other.scale(-1)

    def __neg__(self) -> "MultilinearMap":
        return self.scale(-1)

    def scale(self, c) -> "MultilinearMap":
        c = Fraction(c)
        if not c:
            return self._like({})
        return self._like({k: {j: c * x for j, x in v.items()} for k, v in self.entries.items()})

    def nnz(self) -> int:
        return sum(len(v) for v in self.entries.values())


def _check_compatible(f: MultilinearMap, g: MultilinearMap) -> None:
    if f.arity != g.arity or f.orientation != g.orientation:
        raise ValueError("maps differ in arity or orientation")
    if f.source != g.source or f.target != g.target:
        raise ValueError("maps act on different spaces")
    if f.degree != g.degree and not (f.is_zero() or g.is_zero()):
        raise ValueError("maps have different degrees")


def zero_map(space: GradedSpace, arity: int, degree: int, orientation: str = ALGEBRA) -> MultilinearMap:
    return MultilinearMap(arity, space, degree, {}, orientation)


def identity_map(space: GradedSpace, orientation: str = ALGEBRA) -> MultilinearMap:
    return MultilinearMap(1, space, 0, {(i,): {i: Fraction(1)} for i in range(space.dim)}, orientation)


def compose_entries(fe: Entries, ge: Entries, g_degree: int, degrees: Sequence[int], i: int,
                    out: Entries, coeff=1, q: int = None) -> None:
    """Accumulate coeff * (f ∘_i g) into ``out``; i is 0-based, tables are stored form."""
    by_output: Dict[int, List[Tuple[Tuple[int, ...], Fraction]]] = {}
    for key, vec in ge.items():
        for b, c in vec.items():
            by_output.setdefault(b, []).append((key, c))
    odd_g = g_degree % 2
    for key, vec in fe.items():
        hits = by_output.get(key[i])
        if not hits:
            continue
        pre = key[:i]
        post = key[i + 1:]
        sign = -1 if odd_g and sum(degrees[x] for x in pre) % 2 else 1
        s = sign * coeff
        for gkey, gc in hits:
            newkey = pre + gkey + post
            sc = s * gc
            slot = out.get(newkey)
            if slot is None:
                slot = out[newkey] = {}
            for j, fc in vec.items():
                slot[j] = slot.get(j, 0) + sc * fc


def compose_at(f: MultilinearMap, g: MultilinearMap, i: int) -> MultilinearMap:
    """Infinitesimal composite f ∘_i g with 1-based slot i.

    Algebra orientation: f(x_1, .., g(x_i, ..), ..) with Koszul sign
    (-1)^{|g|(|x_1|+..+|x_{i-1}|)}.  Coalgebra orientation: g applied to the
    i-th output of f, with the mirrored sign on the preceding outputs.
    """
    if f.orientation != g.orientation:
        raise ValueError("orientation mismatch")
    if not 1 <= i <= f.arity:
        raise IndexError(f"slot {i} out of range for arity {f.arity}")
    if f.source != g.target or g.source != f.source:
        raise ValueError("space mismatch")
    out: Entries = {}
    compose_entries(f.entries, g.entries, g.degree, f.tuple_space.degrees, i - 1, out)
    return MultilinearMap(f.arity + g.arity - 1, f.source, f.degree + g.degree, out,
                          f.orientation, f.target)


def apply(f: MultilinearMap, args: Sequence[Vector]):
    """Evaluate f multilinearly.

    Algebra orientation: ``args`` has ``arity`` vectors and a Vector is returned.
    Coalgebra orientation: ``args`` is a single vector and the result is a
    sparse tensor ``{(i_1..i_n): c}``.
    """
    if f.orientation == ALGEBRA:
        if len(args) != f.arity:
            raise ValueError(f"expected {f.arity} arguments, got {len(args)}")
        out: Dict[int, Fraction] = {}
        for key, vec in f.entries.items():
            c = Fraction(1)
            for pos, b in enumerate(key):
                c *= args[pos].coords.get(b, 0)
                if not c:
                    break
            if c:
                for j, x in vec.items():
                    out[j] = out.get(j, 0) + c * x
        return Vector(f.target, out)
    if len(args) != 1:
        raise ValueError("a coalgebra-oriented map takes one argument")
    (v,) = args
    tensor: Dict[Tuple[int, ...], Fraction] = {}
    for key, vec in f.entries.items():
        c = sum((v.coords.get(j, 0) * x for j, x in vec.items()), Fraction(0))
        if c:
            tensor[key] = tensor.get(key, 0) + c
    return {k: c for k, c in tensor.items() if c}
