"""Excess statistics of monic polynomials over finite fields.

Exact counts, certified densities, brute-force verification and the integer
counterpart; see the submodules for each piece.
"""

from .densities import (
    DensityReport,
    EpsilonNotAchieved,
    density_enclosures,
    dnk_table,
    exponent_fit,
    reduced_order_asymptotic_A,
    pole_order_asymptotic_A,
    zeta_affine,
)
from .enclosure import Enclosure
from .finite_field import FieldSpec, field_of_order, make_field
from .irreducibles import NuTable, nu_formula, sieve
from .polyring import Poly, factor, excess, is_squarefree
from .series import count_gf, one_minus_qt_product, product_G, squarefree_gf

__all__ = [
    "DensityReport",
    "Enclosure",
    "EpsilonNotAchieved",
    "FieldSpec",
    "NuTable",
    "Poly",
    "count_gf",
    "density_enclosures",
    "dnk_table",
    "excess",
    "exponent_fit",
    "factor",
    "field_of_order",
    "is_squarefree",
    "make_field",
    "nu_formula",
    "one_minus_qt_product",
    "reduced_order_asymptotic_A",
    "pole_order_asymptotic_A",
    "product_G",
    "sieve",
    "squarefree_gf",
    "zeta_affine",
]
__version__ = "0.1.0"
