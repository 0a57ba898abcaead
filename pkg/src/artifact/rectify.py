"""Gauge descent: turning an A∞ gauge between C∞ structures into a C∞ one.

Given a filtered retraction s of the big algebra onto the small one, the
recursion

    a_{n+1} = BCH(a_n, −s(a_n)),    x_{n+1} = exp(s(a_n))·x_n

pushes x_n into F^n, so under truncation it reaches 0 after at most
arity_max − 1 steps.  The product of the exp(s(a_n)) is the answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from .convolution import (ConvContext, ConvElement, PreconditionError, bch, differential,
                          filtration_degree, first_nonzero, gauge_act, mc_defect, twist)
from .structures import (InftyStructure, Isotopy, associative_context, commutative_context,
                         gauge_from_isotopy, harrison_check, isotopy_from_gauge, make_structure,
                         pbw_retraction, transport_structure, flavor_violation)


class InvariantViolation(AssertionError):
    """A congruence from the descent proof failed at some step."""


@dataclass
class RetractionSetup:
    big: ConvContext
    small: ConvContext
    retraction: Callable[[ConvElement], ConvElement] = None

    def __post_init__(self):
        if not self.big.compatible(self.small):
            raise PreconditionError("big and small contexts act on different spaces")
        if self.retraction is None:
            small = self.small
            self.retraction = lambda f: pbw_retraction(f, small)
        w = flavor_violation(self.small.base_differential.in_context(self.small))
        if w is not None:
            raise PreconditionError(f"base differential is not in the small algebra: {w}")

    @classmethod
    def for_context(cls, ctx: ConvContext) -> "RetractionSetup":
        return cls(associative_context(ctx), commutative_context(ctx))

    def twisted(self, y: ConvElement) -> "RetractionSetup":
        big = twist(self.big, y.in_context(self.big), check=False)
        small = twist(self.small, y.in_context(self.small), check=False)
        # the retraction is linear and ignores the differential; only the context moves
        base = self.retraction
        return RetractionSetup(big, small, lambda f: base(f).in_context(small))


@dataclass
class DescentStep:
    n: int
    filtration_s_a: float
    filtration_x: float
    filtration_d_a: float

    def as_dict(self):
        fmt = lambda v: "inf" if v == float("inf") else int(v)
        return {"n": self.n, "F(s(a_n))": fmt(self.filtration_s_a),
                "F(x_n)": fmt(self.filtration_x), "F(d a_n)": fmt(self.filtration_d_a)}


@dataclass
class DescentResult:
    gauge: ConvElement
    iterations: int
    steps: List[DescentStep] = field(default_factory=list)


def _first_violation(elem: ConvElement):
    w = first_nonzero(elem)
    return None if w is None else w[0]


def gauge_descend(setup: RetractionSetup, x: ConvElement, a: ConvElement,
                  check: bool = True) -> DescentResult:
    """Find g in the small algebra with exp(g)·x = 0, given exp(a)·x = 0 in the big one."""
    big, small = setup.big, setup.small
    N = big.arity_max
    x = ConvElement(small, x.comps, -1)
    a = ConvElement(big, a.comps, 0)
    if check:
        defect = mc_defect(x)
        if not defect.is_zero():
            raise PreconditionError(f"x is not Maurer–Cartan (arity {_first_violation(defect)})")
        w = flavor_violation(x)
        if w is not None:
            raise PreconditionError(f"x is not in the small algebra: {w}")
        image = gauge_act(a, x.in_context(big), check=False)
        if not image.is_zero():
            raise PreconditionError(f"a does not gauge x to 0 (arity {_first_violation(image)})")
    s = setup.retraction
    g = ConvElement(small, {}, 0)
    steps: List[DescentStep] = []
    n = 1
    while not x.is_zero():
        if n > N:
            raise InvariantViolation(f"no termination after {N} iterations")
        sa = s(a)
        fs, fx = filtration_degree(sa), filtration_degree(x)
        fd = filtration_degree(differential(a))
        steps.append(DescentStep(n, fs, fx, fd))
        if fs < n or fx < n or fd < n:
            raise InvariantViolation(
                f"step {n}: F(s(a))={fs}, F(x)={fx}, F(da)={fd}, expected all >= {n}")
        x = gauge_act(sa, x, check=False)
        a = bch(a, sa.in_context(big).scale(-1))
        g = bch(sa, g)
        n += 1
    return DescentResult(g, n - 1, steps)


def rectify_pair(setup: RetractionSetup, x: ConvElement, y: ConvElement, a: ConvElement,
                 check: bool = True) -> DescentResult:
    """g in the small algebra with exp(g)·x = y, given exp(a)·x = y in the big one."""
    small = setup.small
    x = ConvElement(small, x.comps, -1)
    y = ConvElement(small, y.comps, -1)
    if check:
        for name, e in (("x", x), ("y", y)):
            defect = mc_defect(e)
            if not defect.is_zero():
                raise PreconditionError(f"{name} is not Maurer–Cartan (arity {_first_violation(defect)})")
            w = flavor_violation(e)
            if w is not None:
                raise PreconditionError(f"{name} is not in the small algebra: {w}")
        image = gauge_act(a.in_context(setup.big), x.in_context(setup.big), check=False)
        diff = image - y.in_context(setup.big)
        if not diff.is_zero():
            raise PreconditionError(f"a does not gauge x to y (arity {_first_violation(diff)})")
    tw = setup.twisted(y)
    shifted = ConvElement(tw.small, (x - y).comps, -1)
    result = gauge_descend(tw, shifted, a.in_context(tw.big), check=False)
    g = ConvElement(small, result.gauge.comps, 0)
    if gauge_act(g, x, check=False) != y:
        raise InvariantViolation("descent output does not gauge x to y")
    return DescentResult(g, result.iterations, result.steps)


@dataclass
class TheoremAResult:
    isotopy: Isotopy
    gauge: ConvElement
    descent: DescentResult


def theorem_a_driver(m: InftyStructure, m2: InftyStructure, phi: Isotopy,
                     check: bool = True) -> TheoremAResult:
    """A C∞ isotopy m → m2 from an A∞ one."""
    setup = RetractionSetup.for_context(m.context)
    small = setup.small
    x = ConvElement(small, m.mc.comps, -1)
    y = ConvElement(small, m2.mc.comps, -1)
    if check:
        image = transport_structure(phi, InftyStructure(x.in_context(setup.big))).mc
        if image != y.in_context(setup.big):
            raise PreconditionError(f"phi is not an isotopy m -> m2 (arity {_first_violation(image - y)})")
    a = gauge_from_isotopy(Isotopy(setup.big, phi.comps))
    result = rectify_pair(setup, x, y, a, check=check)
    psi = isotopy_from_gauge(result.gauge)
    if transport_structure(psi, InftyStructure(x)).mc != y:
        raise InvariantViolation("rectified isotopy does not transport m to m2")
    ok, witness = harrison_check(psi.as_element())
    if not ok:
        raise InvariantViolation(f"rectified isotopy is not C∞: {witness}")
    return TheoremAResult(psi, result.gauge, result)
