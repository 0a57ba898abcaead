"""Exact rational tools for A∞/C∞ deformation complexes, gauge rectification,
and bar/cobar constructions of small dg Lie algebras."""

__version__ = "0.1.0"

from .convolution import (A_INF, C_INF, SU_A_INF, SU_C_INF, ConvContext, ConvElement,
                          PreconditionError, bch, bracket, gauge_act, mc_defect, star)
from .exactcore import ALGEBRA, COALGEBRA, GradedSpace, MultilinearMap, Vector, koszul_sign
from .liealg import FiniteDgLie, ce_chains, cobar_complete, filtered_qi_check, uea
from .rectify import gauge_descend, rectify_pair, theorem_a_driver
from .structures import (InftyStructure, Isotopy, harrison_check, isotopy_from_gauge,
                         pbw_retraction, transport_structure)
from .words import GroupAlgebraElement, eulerian_idempotents, shuffle_sum
