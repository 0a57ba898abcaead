import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from artifact.convolution import A_INF, SU_A_INF, ConvContext, twist
from artifact.exactcore import ALGEBRA, COALGEBRA, GradedSpace, MultilinearMap
from artifact.fixtures import (LIE_FIXTURES, family_space, random_c_infinity, random_element,
                               stabilizer_fixture)
from artifact.serialize import (FormatError, dumps, element_from_json, element_to_json,
                                isotopy_from_json, isotopy_to_json, lie_from_json, lie_to_json,
                                map_from_json, map_to_json, read, write)
from artifact.structures import commutative_context, su_context


def _round(doc):
    return json.loads(dumps(doc))


@given(st.integers(0, 10 ** 6), st.sampled_from([ALGEBRA, COALGEBRA]))
def test_element_round_trip(seed, orientation):
    rng = random.Random(seed)
    ctx = ConvContext(family_space(rng.choice(["dim2", "dim3", "dim3-odd"]), orientation),
                      orientation, A_INF, 4)
    x = random_element(ctx, rng.choice([-1, 0, 1]), rng, density=0.3, lo=1)
    back = element_from_json(_round(element_to_json(x)))
    assert back == x and back.ctx.same_as(ctx)


def test_twisted_context_round_trip():
    ctx = ConvContext(family_space("dim2", COALGEBRA), COALGEBRA, A_INF, 4)
    x = random_c_infinity(commutative_context(ctx), random.Random(3)).in_context(ctx)
    tctx = twist(ctx, x)
    y = random_element(tctx, 0, random.Random(4))
    back = element_from_json(_round(element_to_json(y)))
    assert back == y and back.ctx.same_as(tctx)


def test_su_context_round_trip():
    V = GradedSpace.from_pairs([["1", 0], ["a", 0], ["b", 1]])
    ctx = su_context(V, "1", SU_A_INF, ALGEBRA, 3)
    y = random_element(ctx, -1, random.Random(5), density=0.5)
    back = element_from_json(_round(element_to_json(y)))
    assert back == y and back.ctx.same_as(ctx)


def test_isotopy_round_trip():
    fx = stabilizer_fixture("dim2", COALGEBRA, 4, 0)
    phi = fx.isotopy()
    assert isotopy_from_json(_round(isotopy_to_json(phi))) == phi


@pytest.mark.parametrize("orientation", [ALGEBRA, COALGEBRA])
def test_map_round_trip(orientation):
    V = GradedSpace.from_pairs([["t", 0], ["t2", 0], ["u", 1]])
    f = MultilinearMap(2, V, 0, {(0, 0): {1: Fraction(1)}, (0, 2): {2: Fraction(-1, 3)}}, orientation)
    assert map_from_json(_round(map_to_json(f))) == f


@pytest.mark.parametrize("name", sorted(LIE_FIXTURES))
def test_lie_round_trip(name):
    g = LIE_FIXTURES[name]()
    h = lie_from_json(_round(lie_to_json(g)))
    assert h.table == g.table and h.diff == g.diff and h.weights == g.weights
    assert h.space == g.space


def test_dumps_is_canonical():
    x = random_element(ConvContext(family_space("dim2", ALGEBRA)), 0, random.Random(0))
    assert dumps(element_to_json(x)) == dumps(_round(element_to_json(x)))


def test_unknown_basis_name():
    doc = element_to_json(random_element(ConvContext(family_space("dim2", ALGEBRA)), 0,
                                         random.Random(1), density=1.0))
    doc["arity_components"]["2"]["entries"][0]["in"][0] = "nope"
    with pytest.raises(FormatError) as info:
        element_from_json(doc)
    assert info.value.key == "arity_components.2"


def test_inhomogeneous_entry():
    V = family_space("dim3", ALGEBRA)
    doc = {"basis": [[n, d] for n, d in V.basis], "degree": 0,
           "arity_components": {"2": {"entries": [{"in": ["u", "u"], "out": [["w", "1"]]}]}}}
    with pytest.raises(FormatError, match="homogeneous"):
        element_from_json(doc)


@pytest.mark.parametrize("mutate,key", [
    (lambda d: d.pop("degree"), "degree"),
    (lambda d: d.pop("arity_components"), "arity_components"),
    (lambda d: d.update(orientation="sideways"), "orientation"),
    (lambda d: d.update(arity_max="four"), "arity_max"),
    (lambda d: d["arity_components"].update({"9": {"entries": []}}), "arity_components.9"),
])
def test_malformed_documents(mutate, key):
    doc = element_to_json(random_element(ConvContext(family_space("dim2", ALGEBRA)), 0, random.Random(2)))
    mutate(doc)
    with pytest.raises(FormatError) as info:
        element_from_json(doc)
    assert info.value.key == key


def test_isotopy_kind_checked():
    doc = element_to_json(random_element(ConvContext(family_space("dim2", ALGEBRA)), 0, random.Random(2)))
    with pytest.raises(FormatError):
        isotopy_from_json(doc)


def test_lie_bad_entries():
    with pytest.raises(FormatError):
        lie_from_json({"basis": [["x", 0]], "bracket": [["x", "x"]]})
    with pytest.raises(FormatError):
        lie_from_json({"basis": [["x", 0], ["y", 0]], "bracket": [["x", "q", "y", "1"]]})


def test_read_errors(tmp_path):
    with pytest.raises(FormatError, match="cannot read"):
        read(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(FormatError, match="invalid JSON") as info:
        read(bad)
    assert info.value.path == str(bad)
    good = tmp_path / "sub" / "ok.json"
    write({"a": 1}, good)
    assert read(good) == {"a": 1}
