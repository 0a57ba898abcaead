"""Sparse exact linear algebra over the rationals.

Vectors are dicts ``{key: Fraction}`` with arbitrary hashable keys.  A
:class:`Echelon` keeps a reduced basis incrementally and can remember how each
pivot row was built from the inserted vectors, which gives kernels and
solutions of linear systems without forming dense matrices.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

SparseVec = Dict[Hashable, Fraction]


def axpy(y: SparseVec, a, x: SparseVec) -> None:
    """y += a*x in place, dropping zeros."""
    for k, v in x.items():
        w = y.get(k, 0) + a * v
        if w:
            y[k] = w
        else:
            y.pop(k, None)


def sorted_key(k):
    return (0, k) if isinstance(k, (int, Fraction)) else (1, repr(k))


class Echelon:
    """Incremental row echelon form with optional combination tracking."""

    def __init__(self, track: bool = False):
        self.track = track
        self.rows: Dict[Hashable, SparseVec] = {}   # pivot key -> row (pivot coeff 1)
        self.combos: Dict[Hashable, SparseVec] = {}
        self.kernel: List[SparseVec] = []
        self._count = 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: SparseVec, combo: Optional[SparseVec] = None) -> Tuple[SparseVec, SparseVec]:
        v = dict(vec)
        c = dict(combo) if combo is not None else {}
        # rows are kept reduced against every other pivot, so one pass suffices
        for k in [k for k in v if k in self.rows]:
            a = v.get(k)
            if a:
                axpy(v, -a, self.rows[k])
                if self.track:
                    axpy(c, -a, self.combos[k])
        return v, c

    def insert(self, vec: SparseVec, label: Hashable = None) -> bool:
        """Add a vector; returns True if it was independent of the previous ones."""
        if label is None:
            label = self._count
        self._count += 1
        v, c = self.reduce(vec, {label: Fraction(1)} if self.track else None)
        if not v:
            if self.track:
                self.kernel.append(c)
            return False
        piv = min(v, key=sorted_key)
        a = v[piv]
        inv = 1 / Fraction(a)
        v = {k: x * inv for k, x in v.items()}
        if self.track:
            c = {k: x * inv for k, x in c.items()}
        # keep rows fully reduced in the new pivot
        for k, row in self.rows.items():
            b = row.get(piv)
            if b:
                axpy(row, -b, v)
                if self.track:
                    axpy(self.combos[k], -b, c)
        self.rows[piv] = v
        if self.track:
            self.combos[piv] = c
        return True

    def contains(self, vec: SparseVec) -> bool:
        v, _ = self.reduce(vec)
        return not v

    def express(self, vec: SparseVec) -> Optional[SparseVec]:
        """Coefficients over inserted labels reproducing vec, or None."""
        if not self.track:
            raise ValueError("combination tracking is off")
        v, c = self.reduce(vec, {})
        if v:
            return None
        return {k: -x for k, x in c.items() if x}


def rank(vectors: Sequence[SparseVec]) -> int:
    e = Echelon()
    for v in vectors:
        e.insert(v)
    return e.rank


def kernel(columns: Sequence[SparseVec]) -> List[SparseVec]:
    """Basis of {x : Σ x_j columns[j] = 0}, as sparse dicts over column indices."""
    e = Echelon(track=True)
    for j, col in enumerate(columns):
        e.insert(col, j)
    return e.kernel


def solve(columns: Sequence[SparseVec], rhs: SparseVec) -> Optional[SparseVec]:
    """Some x with Σ x_j columns[j] = rhs, or None if inconsistent.

    The returned solution only uses pivot columns, so free variables are zero.
    """
    e = Echelon(track=True)
    for j, col in enumerate(columns):
        e.insert(col, j)
    return e.express(rhs)


def span_basis(vectors: Sequence[SparseVec]) -> List[SparseVec]:
    """Reduced basis of the span."""
    e = Echelon()
    for v in vectors:
        e.insert(v)
    return [dict(r) for r in e.rows.values()]


def homology_dims(dims: Dict[int, int], diff: Dict[int, List[SparseVec]]) -> Dict[int, int]:
    """Homology dimensions of a finite complex.

    ``dims[k]`` is dim C_k and ``diff[k]`` lists the images d(e) in C_{k-1} of
    the basis vectors of C_k.
    """
    ranks = {k: rank(cols) for k, cols in diff.items()}
    return {k: n - ranks.get(k, 0) - ranks.get(k + 1, 0) for k, n in dims.items()}
