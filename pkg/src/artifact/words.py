"""Symmetric group algebras: shuffles, Eulerian idempotents, Lyndon bases.

Permutations are 0-based tuples ``s`` with ``s[i]`` the image of i; the product
in ℚ[S_n] is composition, ``(s·t)[i] = s[t[i]]``.  A permutation acts on
tensors as a place permutation (factor i moves to position s[i]) and on maps
by precomposition, which is a right action:

    act(a·b, f) = act(b, act(a, f)).

With these conventions e^{(1)}·shuffle_sum(p, q) = 0, so act(e^{(1)}, f) is
annihilated by every shuffle sum.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from math import factorial, lcm
from typing import Dict, List, Sequence, Tuple

from .exactcore import Entries, MultilinearMap, koszul_sign

Perm = Tuple[int, ...]

MAX_EULERIAN_ARITY = 7


def compose(s: Perm, t: Perm) -> Perm:
    return tuple(s[i] for i in t)


def inverse(s: Perm) -> Perm:
    out = [0] * len(s)
    for i, j in enumerate(s):
        out[j] = i
    return tuple(out)


def one_line(s: Perm) -> str:
    return "[" + ",".join(str(i + 1) for i in s) + "]"


def parse_one_line(text: str) -> Perm:
    body = text.strip().lstrip("[").rstrip("]")
    s = tuple(int(x) - 1 for x in body.split(",") if x.strip())
    if sorted(s) != list(range(len(s))):
        raise ValueError(f"{text!r} is not a permutation in one-line notation")
    return s


def cycle_notation(s: Perm) -> str:
    seen = set()
    cycles = []
    for i in range(len(s)):
        if i in seen or s[i] == i:
            seen.add(i)
            continue
        cyc = [i]
        seen.add(i)
        j = s[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = s[j]
        cycles.append("(" + " ".join(str(k + 1) for k in cyc) + ")")
    return "".join(cycles) or "()"


@lru_cache(maxsize=None)
def _perm_table(n: int):
    perms = list(permutations(range(n)))
    index = {p: k for k, p in enumerate(perms)}
    return perms, index


@lru_cache(maxsize=8)
def _mult_table(n: int):
    perms, index = _perm_table(n)
    return [[index[compose(s, t)] for t in perms] for s in perms]


class GroupAlgebraElement:
    """Rational combination of permutations of {0..n-1}; immutable by convention."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Dict[Perm, Fraction] = None):
        self.n = n
        clean = {}
        for p, c in (terms or {}).items():
            p = tuple(p)
            if len(p) != n:
                raise ValueError(f"permutation {p} is not in S_{n}")
            c = Fraction(c)
            if c:
                clean[p] = clean.get(p, 0) + c
        self.terms = {p: c for p, c in clean.items() if c}

    @classmethod
    def identity(cls, n: int) -> "GroupAlgebraElement":
        return cls(n, {tuple(range(n)): Fraction(1)})

    @classmethod
    def perm(cls, s: Sequence[int]) -> "GroupAlgebraElement":
        return cls(len(s), {tuple(s): Fraction(1)})

    def __eq__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        return f"GroupAlgebraElement({self.n}, {len(self.terms)} terms)"

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        self._same(other)
        out = dict(self.terms)
        for p, c in other.terms.items():
            out[p] = out.get(p, 0) + c
        return GroupAlgebraElement(self.n, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "GroupAlgebraElement":
        c = Fraction(c)
        return GroupAlgebraElement(self.n, {p: c * x for p, x in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def _same(self, other):
        if self.n != other.n:
            raise ValueError(f"S_{self.n} and S_{other.n} elements do not combine")

    def __mul__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        self._same(other)
        if not self.terms or not other.terms:
            return GroupAlgebraElement(self.n)
        # integer kernel over a precomputed multiplication table
        da = lcm(*(c.denominator for c in self.terms.values()))
        db = lcm(*(c.denominator for c in other.terms.values()))
        perms, index = _perm_table(self.n)
        table = _mult_table(self.n) if self.n <= 6 else None
        acc: Dict[int, int] = {}
        right = [(index[p], int(c * db)) for p, c in other.terms.items()]
        for p, c in self.terms.items():
            a = int(c * da)
            if table is not None:
                row = table[index[p]]
                for j, b in right:
                    k = row[j]
                    acc[k] = acc.get(k, 0) + a * b
            else:
                for t, c2 in other.terms.items():
                    k = index[compose(p, t)]
                    acc[k] = acc.get(k, 0) + a * int(c2 * db)
        den = da * db
        return GroupAlgebraElement(self.n, {perms[k]: Fraction(v, den) for k, v in acc.items() if v})

    def antipode(self) -> "GroupAlgebraElement":
        """Linear extension of s -> s^{-1}."""
        return GroupAlgebraElement(self.n, {inverse(p): c for p, c in self.terms.items()})

    def coefficient(self, s: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(s), Fraction(0))


def block_product(elems: Sequence[GroupAlgebraElement]) -> GroupAlgebraElement:
    """a_1 × ... × a_k acting on consecutive blocks."""
    terms = {(): Fraction(1)}
    offset = 0
    for e in elems:
        new: Dict[Perm, Fraction] = {}
        for s, x in terms.items():
            for t, y in e.terms.items():
                k = s + tuple(offset + i for i in t)
                new[k] = new.get(k, 0) + x * y
        terms = new
        offset += e.n
    return GroupAlgebraElement(offset, terms)


def multishuffle_sum(parts: Sequence[int]) -> GroupAlgebraElement:
    """Sum of permutations increasing on each consecutive block of the given sizes."""
    n = sum(parts)
    out: Dict[Perm, Fraction] = {}

    def rec(avail: List[int], rest: Sequence[int], acc: Tuple[int, ...]):
        if not rest:
            out[acc] = Fraction(1)
            return
        for chosen in combinations(avail, rest[0]):
            left = [a for a in avail if a not in chosen]
            rec(left, rest[1:], acc + chosen)

    rec(list(range(n)), list(parts), ())
    return GroupAlgebraElement(n, out)


def shuffle_sum(p: int, q: int) -> GroupAlgebraElement:
    if p < 1 or q < 1:
        raise ValueError("shuffle_sum needs p, q >= 1")
    return multishuffle_sum((p, q))


def compositions(n: int, k: int):
    if k == 1:
        if n >= 1:
            yield (n,)
        return
    for a in range(1, n - k + 2):
        for rest in compositions(n - a, k - 1):
            yield (a,) + rest


def convolution(elems: Sequence[GroupAlgebraElement]) -> GroupAlgebraElement:
    """Shuffle-algebra convolution a_1 ⋆ ... ⋆ a_k = sh_{n_1..n_k} · (a_1 × ... × a_k)."""
    return multishuffle_sum([e.n for e in elems]) * block_product(elems)


@lru_cache(maxsize=None)
def _log_identity(n: int) -> GroupAlgebraElement:
    # log*(id) = Σ_k (-1)^{k+1}/k J^{*k}, J = id minus the unit; J^{*k} in arity n
    # is the sum of multishuffles over compositions of n into k parts
    total = GroupAlgebraElement(n)
    for k in range(1, n + 1):
        part = GroupAlgebraElement(n)
        for comp in compositions(n, k):
            part = part + multishuffle_sum(comp)
        total = total + part.scale(Fraction((-1) ** (k + 1), k))
    return total


@lru_cache(maxsize=None)
def _eulerian(n: int) -> Tuple[GroupAlgebraElement, ...]:
    out = [_log_identity(n)]
    for k in range(2, n + 1):
        acc = GroupAlgebraElement(n)
        for comp in compositions(n, k):
            acc = acc + convolution([_log_identity(m) for m in comp])
        out.append(acc.scale(Fraction(1, factorial(k))))
    return tuple(out)


def eulerian_idempotents(n: int, max_arity: int = MAX_EULERIAN_ARITY) -> List[GroupAlgebraElement]:
    """[e^{(1)}_n, ..., e^{(n)}_n], e^{(k)} = (log* id)^{*k} / k!."""
    if not 1 <= n <= max_arity:
        raise ValueError(f"arity {n} outside the configured range 1..{max_arity}")
    return list(_eulerian(n))


def right_multiplication_rank(e: GroupAlgebraElement) -> int:
    """Rank of x ↦ x·e on ℚ[S_n] by exact elimination."""
    from .linalg import Echelon
    perms, index = _perm_table(e.n)
    ech = Echelon()
    for s in perms:
        ech.insert({index[compose(s, t)]: c for t, c in e.terms.items()})
    return ech.rank


def _act_entries(a: GroupAlgebraElement, entries: Entries, degrees: Sequence[int]) -> Entries:
    out: Entries = {}
    for s, c in a.terms.items():
        for key, vec in entries.items():
            newkey = tuple(key[s[j]] for j in range(len(s)))
            sign = koszul_sign(s, [degrees[x] for x in newkey])
            sc = c * sign
            slot = out.get(newkey)
            if slot is None:
                slot = out[newkey] = {}
            for j, x in vec.items():
                slot[j] = slot.get(j, 0) + sc * x
    return out


def act_on_inputs(a: GroupAlgebraElement, f: MultilinearMap) -> MultilinearMap:
    """Right action of ℚ[S_n] by signed place permutations.

    Algebra orientation: Σ a(σ) f∘P_σ.  Coalgebra orientation: Σ a(σ) P_σ^{-1}∘f
    on the outputs, which is the same formula on the stored mirror table.
    """
    if a.n != f.arity:
        raise ValueError(f"S_{a.n} cannot act on an arity-{f.arity} map")
    out = _act_entries(a, f.entries, f.tuple_space.degrees)
    return MultilinearMap(f.arity, f.source, f.degree, out, f.orientation, f.target)


# Lyndon words and free Lie brackets

def is_lyndon(word: Sequence) -> bool:
    w = tuple(word)
    return bool(w) and all(w < w[i:] + w[:i] for i in range(1, len(w)))


def standard_factorization(word: Sequence):
    w = tuple(word)
    for i in range(1, len(w)):
        if is_lyndon(w[i:]):
            return w[:i], w[i:]
    raise ValueError(f"{word} has no proper Lyndon suffix")


def standard_bracketing(word: Sequence):
    """Nested pairs: a letter, or (left, right) meaning [left, right]."""
    w = tuple(word)
    if len(w) == 1:
        return w[0]
    u, v = standard_factorization(w)
    return (standard_bracketing(u), standard_bracketing(v))


def expand_bracket(tree) -> Dict[Tuple, Fraction]:
    """Associative expansion of a bracket tree as {word: coefficient}."""
    if not isinstance(tree, tuple):
        return {(tree,): Fraction(1)}
    left, right = expand_bracket(tree[0]), expand_bracket(tree[1])
    out: Dict[Tuple, Fraction] = {}
    for u, a in left.items():
        for v, b in right.items():
            out[u + v] = out.get(u + v, 0) + a * b
            out[v + u] = out.get(v + u, 0) - a * b
    return {w: c for w, c in out.items() if c}


class LyndonBasis:
    def __init__(self, n: int, words: List[Tuple[int, ...]], brackets: List):
        self.n = n
        self.words = words
        self.brackets = brackets

    def __len__(self):
        return len(self.words)

    def elements(self) -> List[GroupAlgebraElement]:
        """Bracket expansions in ℚ[S_n]; the word w_1..w_n is the permutation
        placing letter w_k at position k, i.e. s[w_k - 1] = k - 1."""
        out = []
        for tree in self.brackets:
            terms = {}
            for w, c in expand_bracket(tree).items():
                s = [0] * self.n
                for pos, letter in enumerate(w):
                    s[letter - 1] = pos
                terms[tuple(s)] = c
            out.append(GroupAlgebraElement(self.n, terms))
        return out


def lyndon_basis(n: int) -> LyndonBasis:
    if n < 1:
        raise ValueError("n must be positive")
    words = sorted(w for w in ((1,) + p for p in permutations(range(2, n + 1))) if is_lyndon(w))
    return LyndonBasis(n, words, [standard_bracketing(w) for w in words])
