"""JSON documents for spaces, maps, convolution elements, isotopies and Lie algebras.

Rationals are written as strings "p/q".  Convolution components are stored in
the shifted encoding, on the basis of V with degrees shifted by +1 (algebra)
or -1 (coalgebra); the ``basis`` field always lists V itself.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Tuple

from .convolution import A_INF, ConvContext, ConvElement
from .exactcore import (ALGEBRA, COALGEBRA, Entries, GradedSpace, MultilinearMap, format_rational,
                        parse_rational)
from .liealg import FiniteDgLie
from .structures import InftyStructure, Isotopy, su_context


class FormatError(ValueError):
    """Malformed document; ``key`` names the first offending field."""

    def __init__(self, message: str, key: str = None, path: str = None):
        self.key = key
        self.path = path
        where = f"{path}: " if path else ""
        at = f" (at {key!r})" if key else ""
        super().__init__(f"{where}{message}{at}")


def _require(doc: dict, key: str, path: str = None):
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError("missing field", key, path)
    return doc[key]


# spaces and entry tables

def space_to_json(space: GradedSpace) -> dict:
    return {"basis": [[n, d] for n, d in space.basis]}


def space_from_json(doc: dict, path: str = None) -> GradedSpace:
    basis = _require(doc, "basis", path)
    try:
        return GradedSpace.from_pairs(basis)
    except (TypeError, ValueError, IndexError) as exc:
        raise FormatError(str(exc), "basis", path) from None


def entries_to_json(entries: Entries, space: GradedSpace, orientation: str) -> list:
    nm = space.name
    out = []
    if orientation == ALGEBRA:
        for key in sorted(entries):
            outs = [[nm(j), format_rational(c)] for j, c in sorted(entries[key].items())]
            out.append({"in": [nm(i) for i in key], "out": outs})
        return out
    # mirror storage: key is the output tensor, value indexes the input
    by_input: Dict[int, list] = {}
    for key in sorted(entries):
        for j, c in sorted(entries[key].items()):
            by_input.setdefault(j, []).append([[nm(i) for i in key], format_rational(c)])
    for j in sorted(by_input):
        out.append({"in": [nm(j)], "out": by_input[j]})
    return out


def entries_from_json(items: list, space: GradedSpace, orientation: str, key: str,
                      path: str = None) -> Entries:
    entries: Entries = {}
    try:
        for n, item in enumerate(items):
            where = f"{key}[{n}]"
            ins = [space.index(x) for x in _require(item, "in", path)]
            for pair in _require(item, "out", path):
                target, coeff = pair
                c = parse_rational(coeff)
                if not c:
                    continue
                if orientation == ALGEBRA:
                    k, j = tuple(ins), space.index(target)
                else:
                    if len(ins) != 1:
                        raise FormatError("coalgebra entries have a single input", where, path)
                    k, j = tuple(space.index(x) for x in target), ins[0]
                slot = entries.setdefault(k, {})
                slot[j] = slot.get(j, 0) + c
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad entry: {exc}", key, path) from None
    return entries


def map_to_json(f: MultilinearMap) -> dict:
    doc = {"arity": f.arity, "degree": f.degree, "orientation": f.orientation,
           "entries": entries_to_json(f.entries, f.source, f.orientation)}
    doc.update(space_to_json(f.source))
    return doc


def map_from_json(doc: dict, path: str = None) -> MultilinearMap:
    space = space_from_json(doc, path)
    orientation = doc.get("orientation", ALGEBRA)
    entries = entries_from_json(_require(doc, "entries", path), space, orientation, "entries", path)
    try:
        f = MultilinearMap(int(_require(doc, "arity", path)), space, int(_require(doc, "degree", path)),
                           entries, orientation)
        f.validate()
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc), "entries", path) from None
    return f


# convolution elements

def context_to_json(ctx: ConvContext) -> dict:
    doc: Dict[str, Any] = space_to_json(ctx.space)
    doc.update({"orientation": ctx.orientation, "flavor": ctx.flavor, "arity_max": ctx.arity_max})
    W = ctx.shifted
    if ctx.unit_split is not None:
        doc["unit"] = ctx.space.name(ctx.unit_split.unit)
        if 1 in ctx.differential:
            doc["differential"] = entries_to_json(ctx.differential[1], W, ctx.orientation)
    elif ctx.differential:
        doc["base_differential"] = {str(n): entries_to_json(e, W, ctx.orientation)
                                    for n, e in sorted(ctx.differential.items())}
    return doc


def context_from_json(doc: dict, path: str = None) -> ConvContext:
    space = space_from_json(doc, path)
    orientation = doc.get("orientation", ALGEBRA)
    if orientation not in (ALGEBRA, COALGEBRA):
        raise FormatError(f"unknown orientation {orientation!r}", "orientation", path)
    flavor = doc.get("flavor", A_INF)
    try:
        N = int(doc.get("arity_max", 4))
    except (TypeError, ValueError):
        raise FormatError("arity_max must be an integer", "arity_max", path) from None
    W = space.shift(1 if orientation == ALGEBRA else -1)
    try:
        if "unit" in doc:
            diff = None
            if "differential" in doc:
                diff = entries_from_json(doc["differential"], W, orientation, "differential", path)
            return su_context(space, doc["unit"], flavor, orientation, N, diff)
        comps = {}
        for n, items in doc.get("base_differential", {}).items():
            comps[int(n)] = entries_from_json(items, W, orientation, f"base_differential.{n}", path)
        return ConvContext(space, orientation, flavor, N, comps)
    except FormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc), "flavor", path) from None


def element_to_json(x: ConvElement, kind: str = "conv-element") -> dict:
    doc = context_to_json(x.ctx)
    W = x.ctx.shifted
    doc.update({"kind": kind, "encoding": "shifted", "degree": x.degree,
                "arity_components": {str(n): {"entries": entries_to_json(e, W, x.ctx.orientation)}
                                     for n, e in sorted(x.comps.items())}})
    return doc


def element_from_json(doc: dict, path: str = None, ctx: ConvContext = None) -> ConvElement:
    ctx = context_from_json(doc, path) if ctx is None else ctx
    W = ctx.shifted
    comps = {}
    raw = _require(doc, "arity_components", path)
    if not isinstance(raw, dict):
        raise FormatError("arity_components must be an object", "arity_components", path)
    for n, comp in raw.items():
        key = f"arity_components.{n}"
        try:
            arity = int(n)
        except ValueError:
            raise FormatError("arity keys must be integers", key, path) from None
        if arity < 1 or arity > ctx.arity_max:
            raise FormatError(f"arity {arity} outside 1..{ctx.arity_max}", key, path)
        entries = entries_from_json(_require(comp, "entries", path), W, ctx.orientation, key, path)
        for k in entries:
            if len(k) != arity:
                raise FormatError("entry length does not match the arity", key, path)
        comps[arity] = entries
    try:
        degree = int(_require(doc, "degree", path))
    except (TypeError, ValueError):
        raise FormatError("degree must be an integer", "degree", path) from None
    x = ConvElement(ctx, comps, degree)
    _check_degrees(x, path)
    return x


def _check_degrees(x: ConvElement, path):
    degs = x.ctx.degrees
    for n, e in x.comps.items():
        for k, out in e.items():
            for j in out:
                src = sum(degs[i] for i in k)
                ok = (degs[j] == src + x.degree) if x.ctx.orientation == ALGEBRA else (src == degs[j] + x.degree)
                if not ok:
                    raise FormatError("entry is not homogeneous of the stated degree",
                                      f"arity_components.{n}", path)


def structure_to_json(m: InftyStructure) -> dict:
    return element_to_json(m.mc, "structure")


def isotopy_to_json(phi: Isotopy) -> dict:
    return element_to_json(phi.as_element(), "isotopy")


def isotopy_from_json(doc: dict, path: str = None, ctx: ConvContext = None) -> Isotopy:
    if doc.get("kind") != "isotopy":
        raise FormatError("expected an isotopy document", "kind", path)
    x = element_from_json(doc, path, ctx)
    if x.degree != 0:
        raise FormatError("isotopies have degree 0", "degree", path)
    return Isotopy(x.ctx, x.comps)


# Lie algebras

def lie_to_json(g: FiniteDgLie) -> dict:
    doc = g.to_json()
    doc["kind"] = "dg-lie"
    doc["name"] = g.name
    return doc


def lie_from_json(doc: dict, path: str = None) -> FiniteDgLie:
    _require(doc, "basis", path)
    for key in ("bracket", "differential"):
        items = doc.get(key, [])
        width = 4 if key == "bracket" else 3
        for n, item in enumerate(items):
            if not isinstance(item, (list, tuple)) or len(item) != width:
                raise FormatError(f"{key} entries have {width} fields", f"{key}[{n}]", path)
    try:
        return FiniteDgLie.from_json(doc, name=doc.get("name", "g"))
    except KeyError as exc:
        raise FormatError(f"unknown basis name {exc}", "bracket", path) from None
    except (TypeError, ZeroDivisionError) as exc:
        raise FormatError(str(exc), "bracket", path) from None


# files

def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write(doc, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(dumps(doc), encoding="utf-8")


def read(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read file: {exc.strerror}", None, str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg} at line {exc.lineno}", None, str(path)) from None
