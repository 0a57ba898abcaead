"""End-to-end scenario from a Lie map to completed cobar algebras.

Given a dg Lie map f: h → g:

1. check f, build C f: C h → C g and test it for a quasi-isomorphism;
2. encode the low-weight part of C g as a C∞ coalgebra structure x, move it
   by a random C∞ gauge to y, corrupt that gauge by a non-C∞ stabilizer of x
   when one exists, and rectify the result with the descent loop;
3. compare Ω C h → Ω C g on the tensor-length graded pieces.

Step 2 uses a weight cap of 2 so that the coalgebra stays small enough for
the convolution algebra; steps 1 and 3 use the full cap.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional

from .convolution import C_INF, ConvElement, PreconditionError, bch, gauge_act
from .exactcore import COALGEBRA, GradedSpace, MultilinearMap
from .fixtures import random_small_element, stabilizer_element
from .liealg import (FiniteDgLie, ce_chains, ce_map, chain_map_violation, cobar_complete, cobar_map,
                     filtered_qi_check, lie_map_check, quasi_isomorphism_check,
                     tensor_length_filtration)
from .rectify import theorem_a_driver
from .structures import (InftyStructure, associative_context, from_binary_algebra, harrison_check,
                         isotopy_from_gauge)


@dataclass
class PipelineReport:
    steps: Dict[str, dict] = field(default_factory=dict)
    failure: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.failure is None

    def as_dict(self) -> dict:
        return {"ok": self.ok, "failure": self.failure, "steps": self.steps}


def coalgebra_structure(g: FiniteDgLie, max_weight: int = 2, arity_max: int = 3) -> InftyStructure:
    """The reduced coalgebra C g (weights ≤ max_weight) as a C∞ coalgebra structure."""
    C = ce_chains(g, max_weight)
    keys = list(C.keys)
    index = {k: i for i, k in enumerate(keys)}
    space = GradedSpace(tuple((C.label(k), C.degree[k]) for k in keys))
    # mirror storage: key is the output tensor, value indexes the input
    cop: Dict = {}
    for k in keys:
        for (a, b), c in C.coproduct.get(k, {}).items():
            cop.setdefault((index[a], index[b]), {})[index[k]] = Fraction(c)
    diff: Dict = {}
    for k in keys:
        for j, c in C.d.get(k, {}).items():
            diff.setdefault((index[j],), {})[index[k]] = Fraction(c)
    m = MultilinearMap(2, space, 0, cop, COALGEBRA)
    d = MultilinearMap(1, space, -1, diff, COALGEBRA) if diff else None
    return from_binary_algebra(m, d, C_INF, arity_max)


def run_pipeline(f: Dict[int, Dict[int, Fraction]], h: FiniteDgLie, g: FiniteDgLie,
                 max_weight: int = 3, seed: int = 0) -> PipelineReport:
    rep = PipelineReport()
    w = lie_map_check(f, h, g)
    if w is not None:
        raise PreconditionError(f"not a dg Lie map: {w}")

    Ch, Cg = ce_chains(h, max_weight), ce_chains(g, max_weight)
    cf = ce_map(f, h, Ch, Cg, g)
    bad = chain_map_violation(Ch, Cg, cf)
    cone = {f"{k},{wt}": v for (k, wt), v in sorted(quasi_isomorphism_check(Ch, Cg, cf).items()) if v}
    rep.steps["ce_map"] = {"source_dim": len(Ch.keys), "target_dim": len(Cg.keys),
                           "chain_map": bad is None, "cone_homology": cone}
    if bad is not None:
        rep.failure = f"C f is not a chain map at {Ch.label(bad)}"
        return rep
    if cone:
        rep.failure = "C f is not a quasi-isomorphism"
        return rep

    m = coalgebra_structure(g)
    rng = random.Random(f"pipeline:{g.name}:{seed}")
    x = m.mc
    hg = random_small_element(x.ctx, 0, rng, density=0.5)
    y = gauge_act(hg, x)
    try:
        c = stabilizer_element(x, rng)
    except ArithmeticError:
        c = ConvElement(associative_context(x.ctx), {}, 0)
    a = bch(hg.in_context(c.ctx), c)
    res = theorem_a_driver(m, InftyStructure(y), isotopy_from_gauge(a))
    rep.steps["rectification"] = {
        "coalgebra_dim": x.ctx.space.dim,
        "non_c_infinity_stabilizer": not c.is_zero(),
        "input_gauge_is_c_infinity": harrison_check(a)[0],
        "iterations": res.descent.iterations,
        "steps": [st.as_dict() for st in res.descent.steps],
        "output_isotopy_is_c_infinity": harrison_check(res.isotopy.as_element())[0],
    }

    Oh, Og = cobar_complete(Ch, max_weight), cobar_complete(Cg, max_weight)
    fo = cobar_map(cf, Oh, Og)
    S, T = tensor_length_filtration(Oh), tensor_length_filtration(Og)
    bad = chain_map_violation(S, T, fo)
    qi = filtered_qi_check(S, T, fo, max_weight)
    rep.steps["completed_cobar"] = {"chain_map": bad is None,
                                    "pieces": [p.as_dict() for p in qi.pieces]}
    if bad is not None:
        rep.failure = "Ω C f is not a chain map"
    elif not qi.ok:
        rep.failure = f"Ω C f is not a filtered quasi-isomorphism (p = {qi.first_failure})"
    return rep
