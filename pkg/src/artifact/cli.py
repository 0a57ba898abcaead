"""Command-line entry point.

Exit codes: 0 pass, 1 precondition failure (including bad usage), 2 property
violation, 3 I/O or format error.  Output is deterministic for fixed inputs
and seed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from . import serialize as ser
from .convolution import (ConvElement, PreconditionError, bch, first_nonzero, gauge_act, mc_defect)
from .exactcore import ALGEBRA, COALGEBRA, format_rational
from .rectify import InvariantViolation, theorem_a_driver
from .structures import (InftyStructure, flavor_violation, harrison_check, pbw_retraction,
                         transport_structure)

EXIT_OK, EXIT_PRECONDITION, EXIT_VIOLATION, EXIT_IO = 0, 1, 2, 3


class UsageError(PreconditionError):
    pass


@dataclass
class Outcome:
    report: dict
    artifacts: Dict[str, dict] = field(default_factory=dict)
    status: int = EXIT_OK
    lines: List[str] = field(default_factory=list)
    trace: List[str] = field(default_factory=list)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# loading helpers

def _retruncate(x: ConvElement, arity_max: Optional[int]) -> ConvElement:
    if arity_max is None or arity_max == x.ctx.arity_max:
        return x
    if arity_max < 2:
        raise PreconditionError("--arity-max must be at least 2")
    return ConvElement(replace(x.ctx, arity_max=arity_max), x.comps, x.degree)


def _load_element(path: str, arity_max: Optional[int] = None) -> ConvElement:
    return _retruncate(ser.element_from_json(ser.read(path), path), arity_max)


def _load_lie(path: str):
    return ser.lie_from_json(ser.read(path), path)


def _same_family(*elems: ConvElement):
    base = elems[0].ctx
    for e in elems[1:]:
        if not e.ctx.compatible(base):
            raise PreconditionError("input files live on different spaces, orientations or arity caps")


def _witness(x: ConvElement, w) -> Optional[dict]:
    if w is None:
        return None
    nm = x.ctx.shifted.name
    return {"arity": w[0], "input": [nm(i) for i in w[1]], "output": nm(w[2]), "coefficient": str(w[3])}


def _plain(w) -> str:
    if isinstance(w, tuple):
        return "(" + ", ".join(_plain(v) for v in w) + ")"
    return str(w)


def _elem_summary(x: ConvElement) -> dict:
    return {"degree": x.degree, "arities": sorted(x.comps),
            "entries": sum(len(v) for e in x.comps.values() for v in e.values())}


def _blocks(h: dict) -> Dict[str, int]:
    return {f"{k},{w}": v for (k, w), v in sorted(h.items())}


# words

def cmd_eulerian(args) -> Outcome:
    from .words import cycle_notation, eulerian_idempotents, one_line
    if args.n < 1 or not 1 <= args.k <= args.n:
        raise PreconditionError("need 1 <= k <= n")
    e = eulerian_idempotents(args.n)[args.k - 1]
    terms = sorted(e.terms.items())
    rows = [{"permutation": one_line(p), "cycles": cycle_notation(p), "coefficient": format_rational(c)}
            for p, c in terms]
    lines = [f"{format_rational(c)} * {cycle_notation(p)}" for p, c in terms]
    return Outcome({"command": "eulerian", "n": args.n, "k": args.k, "terms": rows}, lines=lines)


# convolution and structures

def cmd_mc_check(args) -> Outcome:
    x = _load_element(args.file, args.arity_max)
    w = first_nonzero(mc_defect(ConvElement(x.ctx, x.comps, -1)))
    report = {"command": "mc-check", "file": args.file, "maurer_cartan": w is None,
              "first_violation": _witness(x, w)}
    lines = ["Maurer–Cartan: yes" if w is None else f"Maurer–Cartan: no, first violation {_witness(x, w)}"]
    return Outcome(report, status=EXIT_OK if w is None else EXIT_VIOLATION, lines=lines)


def cmd_gauge_act(args) -> Outcome:
    a = _load_element(args.gauge, args.arity_max)
    x = _load_element(args.mc, args.arity_max)
    _same_family(a, x)
    y = gauge_act(ConvElement(x.ctx, a.comps, 0), x)
    return Outcome({"command": "gauge-act", "result": _elem_summary(y)},
                   {"gauge_act.json": ser.element_to_json(y, "structure")},
                   lines=[f"exp(a)·x computed: {_elem_summary(y)}"])


def cmd_bch(args) -> Outcome:
    a = _load_element(args.a, args.arity_max)
    b = _load_element(args.b, args.arity_max)
    _same_family(a, b)
    c = bch(a, ConvElement(a.ctx, b.comps, 0))
    return Outcome({"command": "bch", "result": _elem_summary(c)},
                   {"bch.json": ser.element_to_json(c, "gauge")},
                   lines=[f"BCH(a, b) computed: {_elem_summary(c)}"])


def cmd_harrison_check(args) -> Outcome:
    x = _load_element(args.file, args.arity_max)
    ok, w = harrison_check(x)
    wit = None if ok else {"p": w[0], "q": w[1], "input": list(w[2]), "output": w[3], "coefficient": str(w[4])}
    lines = ["C∞ (Harrison): yes" if ok else f"C∞ (Harrison): no, shuffle ({w[0]},{w[1]}) fails at {wit}"]
    return Outcome({"command": "harrison-check", "file": args.file, "c_infinity": ok, "witness": wit},
                   status=EXIT_OK if ok else EXIT_VIOLATION, lines=lines)


def cmd_retract(args) -> Outcome:
    x = _load_element(args.file, args.arity_max)
    s = pbw_retraction(x)
    kind = ser.read(args.file).get("kind", "conv-element")
    return Outcome({"command": "retract", "result": _elem_summary(s)},
                   {"retract.json": ser.element_to_json(s, kind)},
                   lines=[f"retraction computed: {_elem_summary(s)}"])


def cmd_transport(args) -> Outcome:
    phi = ser.isotopy_from_json(ser.read(args.isotopy), args.isotopy)
    m = _load_element(args.structure, args.arity_max)
    phi_ctx = phi.ctx if args.arity_max is None else replace(phi.ctx, arity_max=args.arity_max)
    phi = type(phi)(phi_ctx, phi.comps)
    if not phi.ctx.compatible(m.ctx):
        raise PreconditionError("isotopy and structure live on different spaces")
    out = transport_structure(phi, InftyStructure(ConvElement(m.ctx, m.comps, -1)), check=True)
    return Outcome({"command": "transport", "result": _elem_summary(out.mc)},
                   {"transport.json": ser.structure_to_json(out)},
                   lines=[f"transported structure: {_elem_summary(out.mc)}"])


def cmd_rectify(args) -> Outcome:
    if not args.structures or len(args.structures) != 2 or not args.isotopy:
        raise UsageError("rectify needs --structures M M2 and --isotopy PHI")
    x = _load_element(args.structures[0], args.arity_max)
    y = _load_element(args.structures[1], args.arity_max)
    phi = ser.isotopy_from_json(ser.read(args.isotopy), args.isotopy)
    a = _retruncate(phi.as_element(), args.arity_max)
    _same_family(x, y, a)
    for name, e in (("m", x), ("m2", y)):
        w = flavor_violation(ConvElement(x.ctx.with_flavor(_commutative(x.ctx.flavor)), e.comps, -1))
        if w is not None:
            raise PreconditionError(f"{name} is not C∞: {_plain(w)}")
    from .structures import Isotopy
    res = theorem_a_driver(InftyStructure(ConvElement(x.ctx, x.comps, -1)),
                           InftyStructure(ConvElement(x.ctx, y.comps, -1)),
                           Isotopy(a.ctx, a.comps))
    steps = [st.as_dict() for st in res.descent.steps]
    trace = [f"iteration {s['n']}: F(s(a_n)) = {s['F(s(a_n))']}, F(x_n) = {s['F(x_n)']}, "
             f"F(d a_n) = {s['F(d a_n)']}" for s in steps]
    report = {"command": "rectify", "iterations": res.descent.iterations, "steps": steps,
              "c_infinity": harrison_check(res.isotopy.as_element())[0], "verified": True}
    return Outcome(report, {"rectified_isotopy.json": ser.isotopy_to_json(res.isotopy)},
                   lines=[f"rectified in {res.descent.iterations} iteration(s); output isotopy is C∞ "
                          "and transports m to m2"], trace=trace)


def _commutative(flavor: str) -> str:
    return {"A_inf": "C_inf", "su_A_inf": "su_C_inf"}.get(flavor, flavor)


# Lie algebras and bar/cobar

def cmd_uea(args) -> Outcome:
    from .liealg import uea
    g = _load_lie(args.file)
    U = uea(g, args.weight_max)
    dims = U.dims_by_weight()
    report = {"command": "uea", "weights": list(g.weights),
              "dims_by_weight": {str(k): v for k, v in sorted(dims.items())},
              "basis": [U.label(m) for m in U.keys]}
    return Outcome(report, {"uea.json": algebra_to_json(U)},
                   lines=[f"U(g) up to weight {args.weight_max}: dims by weight {dims}"])


def cmd_lcs(args) -> Outcome:
    g = _load_lie(args.file)
    res = g.lcs()
    nm = g.space.name
    report = {"command": "lcs", "dims": res.dims(), "nilpotency_class": res.nilpotency_class,
              "weights": {nm(i): g.weights[i] for i in range(g.dim)}}
    cls = res.nilpotency_class
    return Outcome(report, lines=[f"lower central series dims {res.dims()}",
                                  "nilpotent of class " + str(cls) if cls is not None else "not nilpotent"])


def cmd_ce(args) -> Outcome:
    from .liealg import ce_chains
    g = _load_lie(args.file)
    C = ce_chains(g, args.weight_max)
    C.check()
    h = C.nonzero_homology()
    return Outcome({"command": "ce", "dim": len(C.keys), "homology": _blocks(h)},
                   {"ce.json": coalgebra_to_json(C)},
                   lines=[f"C g up to weight {args.weight_max}: dim {len(C.keys)}, homology {_blocks(h)}"])


def cmd_bar(args) -> Outcome:
    from .liealg import bar, uea
    g = _load_lie(args.file)
    B = bar(uea(g, args.weight_max).augmentation_ideal(), args.weight_max)
    B.check()
    h = B.nonzero_homology()
    return Outcome({"command": "bar", "dim": len(B.keys), "homology": _blocks(h)},
                   {"bar.json": coalgebra_to_json(B)},
                   lines=[f"B(aug. ideal of U g): dim {len(B.keys)}, homology {_blocks(h)}"])


def cmd_cobar(args) -> Outcome:
    from .liealg import ce_chains, cobar_complete, lie_as_complex
    g = _load_lie(args.file)
    C = ce_chains(g, args.weight_max)
    Om = cobar_complete(C, args.weight_max, args.flavor, completed=args.complete)
    if args.flavor == "lie":
        L = Om.lie
        L.check()
        h = lie_as_complex(L).nonzero_homology()
        dim = L.dim
        art = ser.lie_to_json(L)
    else:
        w = Om.d_squared_violation()
        if w is not None:
            raise InvariantViolation(f"cobar differential does not square to zero at {Om.label(w)}")
        h = Om.nonzero_homology()
        dim = len(Om.keys)
        art = complex_to_json(Om)
    report = {"command": "cobar", "flavor": args.flavor, "completed": args.complete, "dim": dim,
              "homology": _blocks(h)}
    return Outcome(report, {f"cobar_{args.flavor}.json": art},
                   lines=[f"{'completed ' if args.complete else ''}{args.flavor} cobar of C g: "
                          f"dim {dim}, homology {_blocks(h)}"])


def cmd_hcomplete_check(args) -> Outcome:
    from .liealg import homotopy_completion_model
    g = _load_lie(args.file)
    W = args.weight_max
    model = homotopy_completion_model(g, W)
    counit = model.counit_check()
    rep = model.filtered_qi(max(1, W - 1))
    comm = model.commensurability()
    negative = all(d < 0 for d in g.space.degrees)
    nil = model.degreewise_nilpotency() if negative else None
    ok = counit is None and rep.ok and nil is None
    report = {"command": "hcomplete-check", "dim_Q": model.q.dim, "counit_is_dg_lie_map": counit is None,
              "filtered_qi": rep.ok, "first_failure": rep.first_failure,
              "pieces": [p.as_dict() for p in rep.pieces], "commensurability": comm,
              "strictly_negative": negative, "degreewise_nilpotent": (nil is None) if negative else None}
    lines = [f"Q g up to weight {W}: dim {model.q.dim}",
             f"counit Q g -> g is a filtered quasi-isomorphism for p <= {max(1, W - 1)}: {rep.ok}",
             f"F/G commensurability: G on Gr_F {comm['G_terminates_on_Gr_F']}, "
             f"F on Gr_G {comm['F_terminates_on_Gr_G']}"]
    if negative:
        lines.append(f"degreewise nilpotent: {nil is None}")
    return Outcome(report, status=EXIT_OK if ok else EXIT_VIOLATION, lines=lines)


def _parse_eps(text: str) -> Dict[str, Fraction]:
    out = {}
    for part in filter(None, (p.strip() for p in (text or "").split(","))):
        if "=" not in part:
            raise UsageError(f"--eps entries look like name=value, got {part!r}")
        k, v = part.split("=", 1)
        try:
            out[k.strip()] = Fraction(v.strip())
        except ValueError:
            raise UsageError(f"bad rational {v!r} in --eps") from None
    return out


def cmd_fix_augmentation(args) -> Outcome:
    from .liealg import fix_augmentation, uea
    g = _load_lie(args.file)
    eps = _parse_eps(args.eps)
    for k in eps:
        if k not in [n for n, _ in g.space.basis]:
            raise PreconditionError(f"unknown generator {k!r} in --eps")
    U = uea(g, args.weight_max)
    fix = fix_augmentation(U, eps)
    bad = fix.verify()
    images = {U.label((i,)): {U.label(m): format_rational(c) for m, c in sorted(fix.alpha({(i,): 1}).items())}
              for i in range(g.dim) if (i,) in U.weight}
    report = {"command": "fix-augmentation", "eps_bar": {k: format_rational(v) for k, v in sorted(eps.items())},
              "alpha_on_generators": images, "verified": bad is None, "failure": list(bad) if bad else None}
    lines = [f"alpha({k}) = " + " + ".join(f"{c}*{m}" for m, c in v.items()) for k, v in images.items()]
    lines.append("eps = eps_bar∘alpha on all monomials: " + ("yes" if bad is None else f"no {bad}"))
    return Outcome(report, status=EXIT_OK if bad is None else EXIT_VIOLATION, lines=lines)


def _load_lie_map(path: str, g):
    doc = ser.read(path)
    try:
        h = ser.lie_from_json(doc["source"], path)
        f: Dict[int, Dict[int, Fraction]] = {}
        for n, (a, b, c) in enumerate(doc["map"]):
            i, j = h.space.index(a), g.space.index(b)
            f.setdefault(i, {})[j] = f.get(i, {}).get(j, 0) + ser.parse_rational(c)
    except KeyError as exc:
        raise ser.FormatError(f"missing field or unknown basis name {exc}", "map", path) from None
    except (TypeError, ValueError) as exc:
        raise ser.FormatError(f"bad map entry: {exc}", "map", path) from None
    return h, f


def cmd_theorem_b_demo(args) -> Outcome:
    from .fixtures import acyclic_extension
    from .pipeline import run_pipeline
    g = _load_lie(args.file)
    if args.map:
        h, f = _load_lie_map(args.map, g)
    else:
        h, f = acyclic_extension(g)
    rep = run_pipeline(f, h, g, args.weight_max, args.seed)
    report = {"command": "theorem-b-demo", "source": h.name, "target": g.name}
    report.update(rep.as_dict())
    r = rep.steps.get("rectification", {})
    lines = [f"C f is a quasi-isomorphism: {not rep.steps.get('ce_map', {}).get('cone_homology', {1: 1})}"]
    if r:
        lines.append(f"coalgebra rectification: {r['iterations']} iteration(s), "
                     f"output C∞: {r['output_isotopy_is_c_infinity']}")
    if "completed_cobar" in rep.steps:
        lines.append(f"Ω C f filtered quasi-isomorphism: {rep.ok}")
    if rep.failure:
        lines.append(f"failure: {rep.failure}")
    return Outcome(report, status=EXIT_OK if rep.ok else EXIT_VIOLATION, lines=lines)


# documents for complexes

def complex_to_json(C) -> dict:
    lab = C.label
    return {"basis": [[lab(k), C.degree[k], C.weight[k]] for k in C.keys],
            "differential": [[lab(k), lab(j), format_rational(c)]
                             for k in C.keys for j, c in sorted(C.d.get(k, {}).items(), key=lambda t: C.keys.index(t[0]))]}


def coalgebra_to_json(C) -> dict:
    doc = complex_to_json(C)
    lab = C.label
    doc["coproduct"] = [[lab(k), lab(a), lab(b), format_rational(c)]
                        for k in C.keys for (a, b), c in sorted(C.coproduct.get(k, {}).items(),
                                                                key=lambda t: (C.keys.index(t[0][0]), C.keys.index(t[0][1])))]
    return doc


def algebra_to_json(A) -> dict:
    doc = complex_to_json(A)
    lab = A.label
    pos = {k: i for i, k in enumerate(A.keys)}
    prods = []
    for a in A.keys:
        for b in A.keys:
            if not a or not b or A.weight[a] + A.weight[b] > A.max_weight:
                continue
            for k, c in sorted(A.mult(a, b).items(), key=lambda t: pos[t[0]]):
                prods.append([lab(a), lab(b), lab(k), format_rational(c)])
    doc["product"] = prods
    return doc


# fixtures

FIXTURE_FAMILIES = ("stabilizer-corrupted-gauge", "random-c-infinity", "heisenberg-suite", "negative-graded-lie")


def _provenance(args, family: str, **params) -> dict:
    return {"generator": "artifact fixtures generate", "version": __version__, "family": family,
            "seed": args.seed, "params": params}


def cmd_fixtures_generate(args) -> Outcome:
    from . import fixtures as fx
    from .liealg import ce_chains, uea
    family = args.family
    arts: Dict[str, dict] = {}
    if family == "stabilizer-corrupted-gauge":
        N = args.arity_max or 4
        f = fx.stabilizer_fixture(args.space, args.orientation, N, args.seed)
        prov = _provenance(args, family, space=args.space, orientation=args.orientation, arity_max=N)
        arts["m.json"] = ser.element_to_json(f.x, "structure")
        arts["m2.json"] = ser.element_to_json(f.y, "structure")
        arts["phi.json"] = ser.isotopy_to_json(f.isotopy())
        arts["gauge.json"] = ser.element_to_json(f.a, "gauge")
    elif family == "random-c-infinity":
        N = args.arity_max or 4
        x = fx.random_c_infinity_fixture(args.space, args.orientation, N, args.seed)
        prov = _provenance(args, family, space=args.space, orientation=args.orientation, arity_max=N)
        arts["structure.json"] = ser.element_to_json(x, "structure")
    elif family == "heisenberg-suite":
        g = fx.heisenberg()
        W = args.weight_max
        prov = _provenance(args, family, weight_max=W)
        arts["lie.json"] = ser.lie_to_json(g)
        arts["uea.json"] = algebra_to_json(uea(g, W))
        arts["ce.json"] = coalgebra_to_json(ce_chains(g, W))
    elif family == "negative-graded-lie":
        prov = _provenance(args, family)
        arts["lie.json"] = ser.lie_to_json(fx.negative_graded_lie())
    else:
        raise UsageError(f"unknown fixture family {family!r}; choose from {', '.join(FIXTURE_FAMILIES)}")
    for doc in arts.values():
        doc["provenance"] = prov
    report = {"command": "fixtures generate", "family": family, "files": sorted(arts)}
    return Outcome(report, arts, lines=[f"{family}: {', '.join(sorted(arts))}"])


def cmd_acceptance_run(args) -> Outcome:
    from .acceptance import CRITERIA, run
    only = None
    if args.only:
        try:
            only = {int(x) for x in args.only.split(",")}
        except ValueError:
            raise UsageError(f"--only takes comma-separated criterion numbers, got {args.only!r}") from None
        unknown = sorted(only - set(CRITERIA))
        if unknown:
            raise UsageError(f"unknown criteria {unknown}; choose from 1..{max(CRITERIA)}")
    timings = []

    def progress(res):
        timings.append(f"criterion {res.number:2d}: {res.seconds:.2f}s (budget "
                       f"{'none' if res.budget is None else f'{res.budget:.0f}s'})")
        print(timings[-1], file=sys.stderr, flush=True)

    results = run(args.seed, only, progress)
    report = {"command": "acceptance run", "seed": args.seed, "passed": all(r.passed for r in results),
              "criteria": [r.as_dict() for r in results]}
    lines = []
    for r in results:
        lines.append(r.line())
        lines.extend(f"    {f}" for f in r.failures)
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return Outcome(report, {"acceptance_report.json": report},
                   status=EXIT_OK if report["passed"] else EXIT_VIOLATION, lines=lines)


# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--arity-max", type=int, default=None, help="truncation arity (default: from input)")
    common.add_argument("--weight-max", type=int, default=4, help="weight cap for Lie constructions")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trace", action="store_true", help="print per-step details")
    common.add_argument("--out", default=None, help="directory for output files")
    common.add_argument("--format", choices=("json", "text"), default="text")

    p = _Parser(prog="artifact", description="Exact A∞/C∞ deformation, rectification and bar/cobar tools.")
    p.add_argument("--version", action="version", version=f"artifact {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("eulerian", cmd_eulerian, "print an Eulerian idempotent")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    add("mc-check", cmd_mc_check, "check the Maurer–Cartan equation").add_argument("file")
    sp = add("gauge-act", cmd_gauge_act, "apply a gauge to a Maurer–Cartan element")
    sp.add_argument("gauge")
    sp.add_argument("mc")
    sp = add("bch", cmd_bch, "Baker–Campbell–Hausdorff product of two gauges")
    sp.add_argument("a")
    sp.add_argument("b")
    add("harrison-check", cmd_harrison_check, "check the C∞ (shuffle) condition").add_argument("file")
    add("retract", cmd_retract, "apply the PBW retraction").add_argument("file")
    sp = add("transport", cmd_transport, "transport a structure along an isotopy")
    sp.add_argument("isotopy")
    sp.add_argument("structure")
    sp = add("rectify", cmd_rectify, "turn an A∞ isotopy between C∞ structures into a C∞ one")
    sp.add_argument("--structures", nargs=2, metavar=("M", "M2"))
    sp.add_argument("--isotopy")
    for name, fn, h in (("uea", cmd_uea, "universal enveloping algebra"),
                        ("lcs", cmd_lcs, "lower central series"),
                        ("ce", cmd_ce, "Chevalley–Eilenberg chains"),
                        ("bar", cmd_bar, "bar construction of the augmentation ideal of U g"),
                        ("hcomplete-check", cmd_hcomplete_check, "homotopy completion checks")):
        add(name, fn, h).add_argument("file")
    sp = add("cobar", cmd_cobar, "cobar construction of C g")
    sp.add_argument("file")
    sp.add_argument("--flavor", choices=("lie", "assoc"), default="assoc")
    sp.add_argument("--complete", action="store_true")
    sp = add("fix-augmentation", cmd_fix_augmentation, "automorphism of U g moving the augmentation")
    sp.add_argument("file")
    sp.add_argument("--eps", default="", help="values of the new augmentation, e.g. x=1,y=-2")
    sp = add("theorem-b-demo", cmd_theorem_b_demo, "Lie map -> CE -> coalgebra rectification -> cobar")
    sp.add_argument("file", help="target Lie algebra")
    sp.add_argument("--map", default=None, help="Lie map file (default: projection from an acyclic extension)")

    fx = sub.add_parser("fixtures", help="fixture generation")
    fsub = fx.add_subparsers(dest="action", parser_class=_Parser)
    sp = fsub.add_parser("generate", parents=[common], help="write a fixture family")
    sp.add_argument("family")
    sp.add_argument("--space", default="dim2", choices=("dim2", "dim3", "dim3-odd"))
    sp.add_argument("--orientation", default=ALGEBRA, choices=(ALGEBRA, COALGEBRA))
    sp.set_defaults(func=cmd_fixtures_generate)

    ac = sub.add_parser("acceptance", help="acceptance suite")
    asub = ac.add_subparsers(dest="action", parser_class=_Parser)
    sp = asub.add_parser("run", parents=[common], help="run all acceptance criteria")
    sp.add_argument("--only", default=None, help="comma-separated criterion numbers")
    sp.set_defaults(func=cmd_acceptance_run)
    return p


def emit(out: Outcome, args, stdout=None) -> None:
    stdout = stdout or sys.stdout
    report = dict(out.report)
    if args.out and out.artifacts:
        d = Path(args.out)
        for name, doc in sorted(out.artifacts.items()):
            ser.write(doc, d / name)
        report["files"] = sorted(str(d / n) for n in out.artifacts)
    if args.format == "json":
        if not args.out and out.artifacts:
            report["artifacts"] = {k: v for k, v in out.artifacts.items() if v is not out.report}
        stdout.write(ser.dumps(report))
        return
    if args.trace:
        for line in out.trace:
            stdout.write(line + "\n")
    for line in out.lines:
        stdout.write(line + "\n")
    if args.out and out.artifacts:
        for f in report["files"]:
            stdout.write(f"wrote {f}\n")
    elif out.artifacts and args.command not in ("acceptance",):
        for name, doc in sorted(out.artifacts.items()):
            stdout.write(f"--- {name}\n")
            stdout.write(ser.dumps(doc))


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_help(sys.stderr)
            return EXIT_PRECONDITION
        if args.arity_max is not None and args.arity_max < 2:
            raise UsageError("--arity-max must be at least 2")
        if args.weight_max < 1:
            raise UsageError("--weight-max must be at least 1")
        out = args.func(args)
        emit(out, args)
        return out.status
    except ser.FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvariantViolation as exc:
        print(f"property violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
