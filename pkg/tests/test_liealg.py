from fractions import Fraction

import pytest

from artifact.convolution import PreconditionError
from artifact.exactcore import GradedSpace
from artifact.fixtures import (LIE_FIXTURES, abelian_lie, acyclic_extension, broken_completion_map,
                               broken_weight_algebra, free_nilpotent_class2, heisenberg,
                               negative_graded_lie)
from artifact.liealg import (LIE, FiniteDgLie, WeightAlgebra, WeightCoalgebra, bar, ce_chains, ce_map,
                             chain_map_violation, check_algebra_isomorphism, cobar_complete,
                             cobar_u_comparison, fix_augmentation, filtered_qi_check,
                             homotopy_completion_model, identity_map, induced_uea_map, lcs,
                             lie_as_complex, lie_map_check, operadic_filtration,
                             quasi_isomorphism_check, uea)
from artifact.linalg import rank
from artifact.oracles import ce_euler_characteristic, sym_dims, uea_presentation_dims
from artifact.pipeline import run_pipeline
from artifact.structures import StructureError

F = Fraction
FIXTURE_NAMES = sorted(LIE_FIXTURES)


def _euler_by_weight(C, W):
    out = {w: 0 for w in range(1, W + 1)}
    for (k, w), v in C.homology().items():
        out[w] += (-1) ** (k % 2) * v
    return out


# dg Lie algebras

def test_jacobi_failure_is_rejected():
    V = GradedSpace.from_pairs([["x", 0], ["y", 0], ["z", 0]])
    with pytest.raises(StructureError) as info:
        # [x,y] = y, [y,z] = x, [x,z] = 0 with explicit weights breaks Jacobi
        FiniteDgLie(V, {(0, 1): {1: 1}, (1, 2): {0: 1}}, weights=(1, 1, 1))
    assert info.value.witness[0] in ("weight", "jacobi")


def test_antisymmetry_conflict_is_rejected():
    V = GradedSpace.from_pairs([["x", 0], ["y", 0], ["z", 0]])
    with pytest.raises(StructureError):
        FiniteDgLie(V, {(0, 1): {2: 1}, (1, 0): {2: 1}})


def test_weights_inferred_from_lcs():
    assert heisenberg().weights == (1, 1, 2)
    assert negative_graded_lie().weights == (1, 2)


# lower central series

def test_lcs_abelian():
    res = lcs(abelian_lie(2))
    assert res.nilpotency_class == 1 and res.dims()[1:] == [0]


def test_lcs_heisenberg_and_free_nilpotent():
    for g in (heisenberg(), free_nilpotent_class2()):
        res = lcs(g)
        assert res.dims() == [3, 1, 0] and res.nilpotency_class == 2
        assert res.terms[1] == [{2: 1}]


# enveloping algebras

def test_uea_polynomial():
    U = uea(abelian_lie(1), 3)
    assert sorted(U.keys) == [(), (0,), (0, 0), (0, 0, 0)]
    assert U.mult((0,), (0, 0)) == {(0, 0, 0): 1}
    assert U.mult((0, 0), (0, 0)) == {}


def test_uea_heisenberg_straightening():
    U = uea(heisenberg(), 3)
    assert U.mult((1,), (0,)) == {(0, 1): 1, (2,): -1}
    assert U.mult((0,), (1,)) == {(0, 1): 1}


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_uea_dims_match_sym_and_presentation(name):
    g = LIE_FIXTURES[name]()
    U = uea(g, 4)
    U.check()
    parities = [d % 2 for d in g.space.degrees]
    dims = {w: U.dims_by_weight().get(w, 0) for w in range(1, 5)}
    assert dims == sym_dims(g.weights, parities, 4)
    assert dims == uea_presentation_dims(g.space.degrees, g.weights, g.table, 4)


def test_uea_heisenberg_frozen_dims():
    # Sym(x, y in weight 1, z in weight 2): 2, 4, 6, 9
    assert uea(heisenberg(), 4).dims_by_weight() == {1: 2, 2: 4, 3: 6, 4: 9}


def test_uea_preserves_quasi_isomorphisms():
    g = heisenberg()
    h, proj = acyclic_extension(g)
    assert lie_map_check(proj, h, g) is None
    Uh, Ug = uea(h, 3), uea(g, 3)
    f = induced_uea_map(proj, Uh, Ug)
    assert chain_map_violation(Uh, Ug, f) is None
    assert not any(quasi_isomorphism_check(Uh, Ug, f).values())


# augmentations

def test_fix_augmentation_trivial():
    fix = fix_augmentation(uea(heisenberg(), 3), {})
    assert all(fix.alpha({m: 1}) == {m: 1} for m in fix.algebra.keys)


def test_fix_augmentation_polynomial():
    fix = fix_augmentation(uea(abelian_lie(1), 3), {"x": F(5, 2)})
    assert fix.alpha({(0,): 1}) == {(0,): 1, (): F(-5, 2)}
    assert fix.alpha({(0, 0): 1}) == {(0, 0): 1, (0,): -5, (): F(25, 4)}
    assert fix.verify() is None


def test_fix_augmentation_heisenberg():
    fix = fix_augmentation(uea(heisenberg(), 3), {"x": 1})
    assert fix.alpha_generator(0) == {(0,): 1, (): -1}
    assert fix.alpha_generator(1) == {(1,): 1}
    assert fix.alpha_generator(2) == {(2,): 1}
    assert fix.verify(3) is None


def test_fix_augmentation_rejects_non_algebra_map():
    with pytest.raises(PreconditionError, match="relation"):
        fix_augmentation(uea(heisenberg(), 3), {"z": 1})


# Chevalley–Eilenberg chains and bar constructions

def test_ce_abelian_has_no_differential():
    C = ce_chains(abelian_lie(2), 3)
    assert not any(C.d.values())


def test_ce_heisenberg_weight_two():
    C = ce_chains(heisenberg(), 2)
    nonzero = {C.label(k): v for k, v in C.d.items() if v}
    assert list(nonzero) == ["sx∧sy"]
    assert [C.label(k) for k in nonzero["sx∧sy"]] == ["sz"]
    assert abs(next(iter(nonzero["sx∧sy"].values()))) == 1


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_ce_is_a_dg_coalgebra(name):
    C = ce_chains(LIE_FIXTURES[name](), 4)
    C.check()
    assert C.d_squared_violation() is None
    assert C.cocommutativity_violation() is None


def test_ce_heisenberg_first_homology():
    C = ce_chains(heisenberg(), 3)
    assert sum(v for (k, _), v in C.homology().items() if k == 1) == 2


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_ce_euler_characteristic(name):
    g = LIE_FIXTURES[name]()
    C = ce_chains(g, 4)
    assert _euler_by_weight(C, 4) == ce_euler_characteristic(g.weights, g.space.degrees, 4)


def test_ce_heisenberg_frozen_homology():
    assert ce_chains(heisenberg(), 4).nonzero_homology() == {(1, 1): 2, (2, 3): 2, (3, 4): 1}


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_ce_and_bar_homology_agree(name):
    g = LIE_FIXTURES[name]()
    C = ce_chains(g, 4)
    B = bar(uea(g, 4).augmentation_ideal(), 4)
    assert B.d_squared_violation() is None
    assert C.nonzero_homology() == B.nonzero_homology()


def test_bar_zero_multiplication():
    A = WeightAlgebra.from_table([("a", 0, 1), ("b", 1, 1)], {}, max_weight=3)
    assert not any(bar(A, 3).d.values())


def test_bar_truncated_polynomial():
    A = WeightAlgebra.from_table([("x", 0, 1), ("x2", 0, 2)], {("x", "x"): {"x2": 1}}, max_weight=2)
    B = bar(A, 2)
    d = B.d[("x", "x")]
    assert list(d) == [("x2",)] and abs(d[("x2",)]) == 1


@pytest.mark.parametrize("name", ["heisenberg", "negative-graded"])
def test_bar_euler_characteristic(name):
    # tensor coalgebra on s(A): Σ_k (Σ_a (−1)^{|a|+1} t^{w(a)})^k
    g = LIE_FIXTURES[name]()
    A = uea(g, 4).augmentation_ideal()
    gen = [0] * 5
    for a in A.keys:
        gen[A.weight[a]] += (-1) ** ((A.degree[a] + 1) % 2)
    series = [1, 0, 0, 0, 0]
    total = [0] * 5
    for _ in range(4):
        series = [sum(series[i] * gen[w - i] for i in range(w + 1)) for w in range(5)]
        total = [t + s for t, s in zip(total, series)]
    assert _euler_by_weight(bar(A, 4), 4) == {w: total[w] for w in range(1, 5)}


# cobar constructions

def test_cobar_of_trivial_coalgebra():
    C = WeightCoalgebra(["a", "b"], {"a": 1, "b": 2}, {"a": 1, "b": 1}, {}, {}, 3, label=str)
    Om = cobar_complete(C, 3)
    assert not any(Om.d.values())
    assert len(Om.keys) == 2 + 4 + 8


def test_lie_cobar_of_abelian():
    L = cobar_complete(ce_chains(abelian_lie(1), 3), 3, LIE)
    assert lie_as_complex(L.lie).nonzero_homology() == {(0, 1): 1}


def test_lie_cobar_heisenberg_frozen():
    L = cobar_complete(ce_chains(heisenberg(), 3), 3, LIE)
    assert L.lie.dim == 13
    assert lie_as_complex(L.lie).nonzero_homology() == {(0, 1): 2, (0, 2): 1}


def test_cobar_lie_needs_cocommutative():
    B = bar(uea(heisenberg(), 3).augmentation_ideal(), 3)
    with pytest.raises(PreconditionError):
        cobar_complete(B, 3, LIE)


def test_cobar_is_u_of_lie_cobar():
    L = cobar_complete(ce_chains(heisenberg(), 3), 3, LIE)
    U, Om, f = cobar_u_comparison(L, 3)
    rep = check_algebra_isomorphism(U, Om, f, 3)
    assert rep.ok, rep.failure


@pytest.mark.parametrize("name", ["heisenberg", "abelian-1d", "negative-graded"])
def test_completed_cobar_preserves_quasi_isomorphisms(name):
    g = LIE_FIXTURES[name]()
    h, proj = acyclic_extension(g)
    rep = run_pipeline(proj, h, g, max_weight=3)
    assert rep.ok, rep.failure
    assert rep.steps["rectification"]["output_isotopy_is_c_infinity"]


def test_ce_map_of_acyclic_extension_is_qi():
    g = free_nilpotent_class2()
    h, proj = acyclic_extension(g)
    Ch, Cg = ce_chains(h, 3), ce_chains(g, 3)
    f = ce_map(proj, h, Ch, Cg, g)
    assert chain_map_violation(Ch, Cg, f) is None
    assert not any(quasi_isomorphism_check(Ch, Cg, f).values())


# filtrations

def test_operadic_filtration_abelian():
    assert operadic_filtration(abelian_lie(2), 2) == []


def test_operadic_filtration_adic():
    A = uea(abelian_lie(1), 4)
    for n in range(1, 5):
        Fn = operadic_filtration(A, n)
        expected = [{(0,) * k: 1} for k in range(n, 5)]
        assert len(Fn) == len(expected) == rank(Fn + expected)


def test_operadic_filtration_heisenberg():
    assert operadic_filtration(heisenberg(), 2) == [{2: 1}]


def test_completion_model_abelian():
    model = homotopy_completion_model(abelian_lie(1), 4)
    assert model.complex("F").gr(1).nonzero_homology() == {(0, 1): 1}


@pytest.mark.parametrize("name", ["abelian-1d", "heisenberg", "free-nilpotent-2-2"])
def test_completion_counit_is_filtered_qi(name):
    model = homotopy_completion_model(LIE_FIXTURES[name](), 4)
    assert model.counit_check() is None
    rep = model.filtered_qi(3)
    assert rep.ok and rep.first_failure is None


def test_commensurability_heisenberg():
    comm = homotopy_completion_model(heisenberg(), 4).commensurability()
    assert comm["G_terminates_on_Gr_F"] and comm["F_terminates_on_Gr_G"]


def test_negative_graded_is_degreewise_nilpotent():
    model = homotopy_completion_model(negative_graded_lie(), 4)
    assert model.degreewise_nilpotency() is None
    assert model.filtered_qi(3).ok


def test_filtered_qi_identity():
    C = homotopy_completion_model(heisenberg(), 4).complex("F")
    assert filtered_qi_check(C, C, identity_map(C), 4).ok


def test_filtered_qi_broken_map():
    _, src, tgt, fmap = broken_completion_map()
    rep = filtered_qi_check(src, tgt, fmap, 3)
    assert not rep.ok
    # the dropped term is the linear differential of the letter sx∧sy, at F-level 2
    assert rep.first_failure == 2
    assert [p.ok for p in rep.pieces] == [True, False, True]
    assert "chain map" in rep.pieces[1].reason


def test_filtered_qi_needs_filtrations():
    C = ce_chains(heisenberg(), 2)
    with pytest.raises(PreconditionError):
        filtered_qi_check(C, C, identity_map(C), 2)


def test_broken_weight_algebra():
    A = broken_weight_algebra()
    assert A.associativity_violation() == ("associativity", "e", "e", "e")
    with pytest.raises(StructureError):
        A.check()
