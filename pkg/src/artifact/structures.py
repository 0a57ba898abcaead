"""A∞/C∞ (co)algebra structures, strict units, isotopies and the PBW retraction."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .convolution import (A_INF, C_INF, SU_A_INF, SU_C_INF, ConvContext, ConvElement,
                          PreconditionError, UnitalSplit, first_nonzero, is_commutative_flavor,
                          is_unital_flavor, mc_defect, star)
from .exactcore import (ALGEBRA, COALGEBRA, Entries, GradedSpace, MultilinearMap, add_into,
                        compose_entries, koszul_sign)
from .words import act_on_inputs, eulerian_idempotents, shuffle_sum, _act_entries


class StructureError(PreconditionError):
    """A classical structure failed one of its axioms; carries a witness."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True, eq=False)
class InftyStructure:
    mc: ConvElement

    @property
    def context(self) -> ConvContext:
        return self.mc.ctx

    def total(self) -> ConvElement:
        """D + m: the full codifferential including the base differential."""
        return self.context.base_differential + ConvElement(self.context, self.mc.comps, -1)


def make_structure(mc: ConvElement, check: bool = True) -> InftyStructure:
    mc = ConvElement(mc.ctx, mc.comps, -1)
    if check:
        defect = mc_defect(mc)
        if not defect.is_zero():
            raise PreconditionError(f"not Maurer–Cartan: {first_nonzero(defect)}")
        witness = flavor_violation(mc)
        if witness is not None:
            raise PreconditionError(f"flavor constraint violated: {witness}")
    return InftyStructure(mc)


# flavor constraints

def harrison_check(f: ConvElement):
    """(True, None) if every component is killed by every shuffle sum, else
    (False, (p, q, basis tuple, output name, coefficient)) for the first violation."""
    W = f.ctx.shifted
    for n in sorted(f.comps):
        if n < 2:
            continue
        comp = f.component(n)
        for p in range(1, n):
            g = act_on_inputs(shuffle_sum(p, n - p), comp)
            if g.entries:
                key = min(g.entries)
                j = min(g.entries[key])
                return False, (p, n - p, tuple(W.name(i) for i in key), W.name(j), g.entries[key][j])
    return True, None


def unit_violation(f: ConvElement):
    split = f.ctx.unit_split
    if split is None:
        return None
    u = split.unit
    for n in sorted(f.comps):
        if n < 2:
            continue
        for key in f.comps[n]:
            if u in key:
                return n, key
    return None


def flavor_violation(f: ConvElement):
    ctx = f.ctx
    if is_commutative_flavor(ctx.flavor):
        ok, witness = harrison_check(f)
        if not ok:
            return ("harrison",) + witness
    if is_unital_flavor(ctx.flavor):
        w = unit_violation(f)
        if w is not None:
            return ("unit",) + w
    return None


def commutative_context(ctx: ConvContext) -> ConvContext:
    return ctx.with_flavor({A_INF: C_INF, SU_A_INF: SU_C_INF}.get(ctx.flavor, ctx.flavor))


def associative_context(ctx: ConvContext) -> ConvContext:
    return ctx.with_flavor({C_INF: A_INF, SU_C_INF: SU_A_INF}.get(ctx.flavor, ctx.flavor))


def pbw_retraction(f: ConvElement, target: ConvContext = None) -> ConvElement:
    """Componentwise act_on_inputs(e^{(1)}_n, f_n); lands in the C∞ flavor."""
    target = commutative_context(f.ctx) if target is None else target
    if not target.compatible(f.ctx):
        raise PreconditionError("retraction target acts on a different space")
    degs = f.ctx.degrees
    comps = {}
    for n, e in f.comps.items():
        comps[n] = e if n == 1 else _act_entries(eulerian_idempotents(n)[0], e, degs)
    return ConvElement(target, comps, f.degree)


# shifting classical operations

def _shift_sign(orientation: str, degs_v: Sequence[int], key: Tuple[int, ...]) -> int:
    # b(sa, sb) = (-1)^{|a|} s m(a, b); the coalgebra side mirrors the stored table
    return -1 if degs_v[key[0]] % 2 else 1


def shifted_binary(entries: Entries, space: GradedSpace, orientation: str) -> Entries:
    degs = space.degrees
    out: Entries = {}
    for key, vec in entries.items():
        s = _shift_sign(orientation, degs, key)
        for j, c in vec.items():
            add_into(out, key, j, s * Fraction(c))
    return out


def unshifted_binary(entries: Entries, space: GradedSpace, orientation: str) -> Entries:
    return shifted_binary(entries, space, orientation)


def _check_binary(m: MultilinearMap, d: Optional[MultilinearMap], commutative: bool):
    """Associativity, commutativity, Leibniz and d² = 0 on the stored tables.

    For a coalgebra the stored mirror table is the transpose, so the same
    identities express coassociativity, cocommutativity and coLeibniz.
    """
    V = m.tuple_space
    degs = V.degrees
    n = V.dim
    prod = m.entries

    def mul(a: Dict[int, Fraction], b: Dict[int, Fraction]) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for i, x in a.items():
            for j, y in b.items():
                for k, z in prod.get((i, j), {}).items():
                    out[k] = out.get(k, 0) + x * y * z
        return {k: c for k, c in out.items() if c}

    e = [{i: Fraction(1)} for i in range(n)]
    for i, j, k in product(range(n), repeat=3):
        if mul(mul(e[i], e[j]), e[k]) != mul(e[i], mul(e[j], e[k])):
            raise StructureError("associativity fails", ("associativity", V.name(i), V.name(j), V.name(k)))
    if commutative:
        for i, j in product(range(n), repeat=2):
            s = -1 if (degs[i] * degs[j]) % 2 else 1
            lhs = mul(e[i], e[j])
            rhs = {k: s * c for k, c in mul(e[j], e[i]).items()}
            if lhs != rhs:
                raise StructureError("commutativity fails", ("commutativity", V.name(i), V.name(j)))
    if d is None:
        return
    dif = {k[0]: v for k, v in d.entries.items()}

    def apply_d(a):
        out: Dict[int, Fraction] = {}
        for i, x in a.items():
            for k, z in dif.get(i, {}).items():
                out[k] = out.get(k, 0) + x * z
        return {k: c for k, c in out.items() if c}

    for i in range(n):
        if apply_d(apply_d(e[i])):
            raise StructureError("differential does not square to zero", ("d2", V.name(i)))
    for i, j in product(range(n), repeat=2):
        lhs = apply_d(mul(e[i], e[j]))
        rhs = dict(mul(apply_d(e[i]), e[j]))
        s = -1 if degs[i] % 2 else 1
        for k, c in mul(e[i], apply_d(e[j])).items():
            rhs[k] = rhs.get(k, 0) + s * c
        rhs = {k: c for k, c in rhs.items() if c}
        if lhs != rhs:
            raise StructureError("Leibniz rule fails", ("leibniz", V.name(i), V.name(j)))


def from_binary_algebra(structure_constants: MultilinearMap, differential: MultilinearMap = None,
                        flavor: str = A_INF, arity_max: int = 4) -> InftyStructure:
    """Embed a dg (co)associative (co)algebra as an ∞-structure in arities 1–2.

    The orientation is taken from the structure constants; for a coalgebra
    the map is the comultiplication V → V⊗V in mirror storage.
    """
    m = structure_constants
    if m.arity != 2 or m.degree != 0:
        raise PreconditionError("structure constants must be an arity-2 map of degree 0")
    if differential is not None and (differential.arity != 1 or differential.degree != -1):
        raise PreconditionError("the differential must be an arity-1 map of degree -1")
    m.validate()
    if differential is not None:
        differential.validate()
    _check_binary(m, differential, is_commutative_flavor(flavor))
    V = m.source
    orientation = m.orientation
    dcomps = {}
    if differential is not None and differential.entries:
        dcomps[1] = {k: dict(v) for k, v in differential.entries.items()}
    ctx = ConvContext(V, orientation, flavor, arity_max, dcomps)
    mc = ConvElement(ctx, {2: shifted_binary(m.entries, V, orientation)}, -1)
    return make_structure(mc)


def mu0_entries(space: GradedSpace, unit: int, orientation: str) -> Entries:
    """Shifted unital product with V̄·V̄ = 0."""
    degs = space.degrees
    out: Entries = {}
    for v in range(space.dim):
        add_into(out, (unit, v), v, Fraction(1))
        if v != unit:
            add_into(out, (v, unit), v, Fraction(1))
    return shifted_binary(out, space, orientation)


def su_context(space: GradedSpace, unit: str, flavor: str = SU_A_INF, orientation: str = ALGEBRA,
               arity_max: int = 4, differential: Entries = None) -> ConvContext:
    """Strictly unital context: base differential [μ₀, −] (plus an optional
    linear differential), components vanishing on the unit line."""
    if flavor not in (SU_A_INF, SU_C_INF):
        raise PreconditionError("su_context needs a strictly unital flavor")
    if unit not in [n for n, _ in space.basis]:
        raise PreconditionError(f"unit {unit!r} is not a basis element")
    u = space.index(unit)
    if space.degree(u) != 0:
        raise PreconditionError("the unit must have degree 0")
    mu0 = mu0_entries(space, u, orientation)
    comps = {2: mu0}
    if differential:
        comps[1] = differential
    split = UnitalSplit(u, tuple(i for i in range(space.dim) if i != u), {2: mu0})
    ctx = ConvContext(space, orientation, flavor, arity_max, comps, split)
    D = ctx.base_differential
    if not star(D, D).is_zero():
        raise PreconditionError("μ₀ (with the given differential) is not Maurer–Cartan")
    return ctx


# isotopies

@dataclass(frozen=True, eq=False)
class Isotopy:
    """Components f_n, n >= 2, of an ∞-isotopy; f_1 is the identity."""

    ctx: ConvContext
    comps: Dict[int, Entries]

    def __post_init__(self):
        clean = ConvElement(self.ctx, self.comps, 0).comps
        clean.pop(1, None)
        object.__setattr__(self, "comps", clean)

    @classmethod
    def identity(cls, ctx: ConvContext) -> "Isotopy":
        return cls(ctx, {})

    def __eq__(self, other):
        return isinstance(other, Isotopy) and self.ctx.compatible(other.ctx) and self.comps == other.comps

    __hash__ = None

    def as_element(self) -> ConvElement:
        return ConvElement(self.ctx, self.comps, 0)

    def with_identity(self) -> Dict[int, Entries]:
        comps = dict(self.comps)
        comps[1] = {(i,): {i: Fraction(1)} for i in range(self.ctx.space.dim)}
        return comps


def _by_output(comps: Dict[int, Entries]):
    idx: Dict[int, List[Tuple[int, Tuple[int, ...], Fraction]]] = {}
    for n, e in comps.items():
        for key, vec in e.items():
            for j, c in vec.items():
                idx.setdefault(j, []).append((n, key, c))
    return idx


def compose_full(g: Dict[int, Entries], f: Dict[int, Entries], f_degree: int,
                 degrees: Sequence[int], arity_max: int, arity_filter=None) -> Dict[int, Entries]:
    """Σ_k g_k ∘ (f ⊗ ... ⊗ f) on stored tables, truncated at arity_max.

    Sign: the j-th copy of f passes the inputs of the earlier blocks,
    (-1)^{|f|·(degrees of those inputs)}.
    """
    idx = _by_output(f)
    out: Dict[int, Entries] = {}
    odd = f_degree % 2
    for k, ge in g.items():
        for key, vec in ge.items():
            options = [idx.get(x, ()) for x in key]
            if any(not o for o in options):
                continue

            def rec(pos, arity, tup, coeff, deg_sum):
                if pos == k:
                    if arity_filter is None or arity_filter(arity):
                        tgt = out.setdefault(arity, {})
                        for j, c in vec.items():
                            add_into(tgt, tup, j, coeff * c)
                    return
                remaining = k - pos - 1
                for n, fk, fc in options[pos]:
                    if arity + n + remaining > arity_max:
                        continue
                    s = -1 if odd and deg_sum % 2 else 1
                    rec(pos + 1, arity + n, tup + fk, coeff * fc * s,
                        deg_sum + sum(degrees[x] for x in fk))

            rec(0, 0, (), Fraction(1), 0)
    return {n: {k: v for k, v in e.items() if any(v.values())} for n, e in out.items()}


def _star_with_identity(f: Dict[int, Entries], m: Dict[int, Entries], m_degree: int,
                        degrees, arity_max) -> Dict[int, Entries]:
    out: Dict[int, Entries] = {}
    for p, fe in f.items():
        for q, me in m.items():
            n = p + q - 1
            if n > arity_max:
                continue
            tgt = out.setdefault(n, {})
            for i in range(p):
                compose_entries(fe, me, m_degree, degrees, i, tgt)
    return out


def _sub(a: Dict[int, Entries], b: Dict[int, Entries]) -> Dict[int, Entries]:
    out = {n: {k: dict(v) for k, v in e.items()} for n, e in a.items()}
    for n, e in b.items():
        tgt = out.setdefault(n, {})
        for k, v in e.items():
            for j, c in v.items():
                add_into(tgt, k, j, -c)
    return out


def _transport_algebra(F: Dict[int, Entries], M: Dict[int, Entries], degs, N) -> Dict[int, Entries]:
    # solve F ⋆ M = M' ∘ F̂ for M', arity by arity
    lhs = _star_with_identity(F, M, -1, degs, N)
    Fnon = {n: e for n, e in F.items() if n >= 2}
    M2: Dict[int, Entries] = {}
    for n in range(1, N + 1):
        known = compose_full({k: e for k, e in M2.items() if k < n}, {**Fnon, 1: F[1]}, 0, degs, N,
                             arity_filter=lambda a, n=n: a == n)
        comp = _sub({n: lhs.get(n, {})}, {n: known.get(n, {})}).get(n, {})
        M2[n] = comp
    return M2


def _transport_coalgebra(F: Dict[int, Entries], M: Dict[int, Entries], degs, N) -> Dict[int, Entries]:
    # solve F ⋆ M' = M ∘ F̂ for M', arity by arity (stored tables)
    rhs = compose_full(M, F, 0, degs, N)
    Fhigh = {n: e for n, e in F.items() if n >= 2}
    M2: Dict[int, Entries] = {}
    for n in range(1, N + 1):
        lower = _star_with_identity(Fhigh, {k: e for k, e in M2.items() if k < n}, -1, degs, N)
        M2[n] = _sub({n: rhs.get(n, {})}, {n: lower.get(n, {})}).get(n, {})
    return M2


def transport_structure(phi: Isotopy, m: InftyStructure, check: bool = False) -> InftyStructure:
    """The unique m' such that phi is an ∞-isotopy from m to m'."""
    ctx = m.context
    if not phi.ctx.compatible(ctx):
        raise PreconditionError("isotopy and structure act on different spaces")
    degs = ctx.degrees
    N = ctx.arity_max
    total = m.total()
    F = phi.with_identity()
    if ctx.orientation == ALGEBRA:
        M2 = _transport_algebra(F, total.comps, degs, N)
    else:
        M2 = _transport_coalgebra(F, total.comps, degs, N)
    new_total = ConvElement(ctx, M2, -1)
    mc = new_total - ctx.base_differential
    return make_structure(mc, check=check) if check else InftyStructure(ConvElement(ctx, mc.comps, -1))


def _exp_gauge(a: Dict[int, Entries], dim: int, degs, N) -> Dict[int, Entries]:
    """Projection of exp(â) for the coderivation â, via F_t' = a ∘ F̂_t.

    With F_t = Σ t^k g_k and g_0 = id, (k+1) g_{k+1} is the t^k part of a ∘ F̂_t.
    """
    ident = {(i,): {i: Fraction(1)} for i in range(dim)}
    pieces = {0: {1: ident}}   # t-power -> arity -> entries

    def by_output_tagged():
        idx: Dict[int, List] = {}
        for t, comps in pieces.items():
            for n, e in comps.items():
                for key, vec in e.items():
                    for j, c in vec.items():
                        idx.setdefault(j, []).append((t, n, key, c))
        return idx

    for k in range(0, N - 1):
        idx = by_output_tagged()
        acc: Dict[int, Entries] = {}
        for m, ae in a.items():
            for key, vec in ae.items():
                options = [idx.get(x, ()) for x in key]
                if any(not o for o in options):
                    continue

                def rec(pos, tsum, arity, tup, coeff):
                    if pos == m:
                        if tsum == k:
                            tgt = acc.setdefault(arity, {})
                            for j, c in vec.items():
                                add_into(tgt, tup, j, coeff * c)
                        return
                    for t, n, fk, fc in options[pos]:
                        if tsum + t > k or arity + n + (m - pos - 1) > N:
                            continue
                        rec(pos + 1, tsum + t, arity + n, tup + fk, coeff * fc)

                rec(0, 0, 0, (), Fraction(1))
        scale = Fraction(1, k + 1)
        nxt = {n: {key: {j: c * scale for j, c in v.items() if c} for key, v in e.items()}
               for n, e in acc.items()}
        nxt = {n: {key: v for key, v in e.items() if v} for n, e in nxt.items()}
        nxt = {n: e for n, e in nxt.items() if e}
        if not nxt:
            break
        pieces[k + 1] = nxt
    total: Dict[int, Entries] = {}
    for t, comps in pieces.items():
        if t == 0:
            continue
        for n, e in comps.items():
            tgt = total.setdefault(n, {})
            for key, vec in e.items():
                for j, c in vec.items():
                    add_into(tgt, key, j, c)
    return total


def isotopy_from_gauge(a: ConvElement) -> Isotopy:
    """The isotopy exp(a).

    Algebra orientation: the projection of exp(â) for the coderivation â.
    Coalgebra orientation: the same exponential applied to −a on the stored
    tables, since mirroring reverses which side the derivation acts on.
    """
    if a.degree != 0 and not a.is_zero():
        raise PreconditionError("isotopy_from_gauge needs a degree-0 element")
    if a.comps and min(a.comps) < 2:
        raise PreconditionError("gauge elements must have arity >= 2")
    ctx = a.ctx
    src = a if ctx.orientation == ALGEBRA else a.scale(-1)
    comps = _exp_gauge(src.comps, ctx.space.dim, ctx.degrees, ctx.arity_max)
    return Isotopy(ctx, comps)


def gauge_from_isotopy(phi: Isotopy) -> ConvElement:
    """Inverse of isotopy_from_gauge, solved arity by arity."""
    ctx = phi.ctx
    sign = 1 if ctx.orientation == ALGEBRA else -1
    a = ConvElement(ctx, {}, 0)
    for n in range(2, ctx.arity_max + 1):
        current = isotopy_from_gauge(a).comps.get(n, {})
        diff = _sub({n: phi.comps.get(n, {})}, {n: current})[n]
        a = a + ConvElement(ctx, {n: diff}, 0).scale(sign)
    return a


def compose_isotopies(phi: Isotopy, psi: Isotopy) -> Isotopy:
    """phi after psi: transport(compose(phi, psi)) = transport(phi) ∘ transport(psi)."""
    if not phi.ctx.compatible(psi.ctx):
        raise PreconditionError("isotopies act on different spaces")
    ctx = phi.ctx
    outer, inner = (phi, psi) if ctx.orientation == ALGEBRA else (psi, phi)
    comps = compose_full(outer.with_identity(), inner.with_identity(), 0, ctx.degrees, ctx.arity_max)
    comps.pop(1, None)
    return Isotopy(ctx, comps)


def is_isotopy_between(phi: Isotopy, m: InftyStructure, m2: InftyStructure) -> bool:
    return transport_structure(phi, m).mc == ConvElement(m2.context, m2.mc.comps, -1)


def isotopy_harrison(phi: Isotopy):
    return harrison_check(phi.as_element())
