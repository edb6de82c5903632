"""sumprod: exact-arithmetic laboratory for sum-product growth in Q^d.

Core objects: :class:`~sumprod.pointset.PointSet` (finite subsets of Q^d) and
:class:`~sumprod.matrices.MatSet` (finite sets of d x d rational matrices),
with exact sumset/product-set operations, the named extremal families, a
certificate-producing decomposition pipeline, and growth-exponent reports.

The pairwise-operation kernels have a compiled core with a pure-Python
fallback selected at import; see :mod:`sumprod.kernels`.
"""

from fractions import Fraction

from .analysis import GrowthReport, exponent, extremal_search, sweep
from .decompose import Constants, decompose, verify_certificate
from .families import FamilySpec, gen_cn, gen_geometric, gen_interval, generate
from .matrices import MatSet, diag_embed, diag_project, gen_dn, mat_growth
from .pointset import PointSet, cartesian, growth, productset, sumset

__version__ = "0.1.0"

__all__ = [
    "Constants",
    "FamilySpec",
    "Fraction",
    "GrowthReport",
    "MatSet",
    "PointSet",
    "cartesian",
    "decompose",
    "diag_embed",
    "diag_project",
    "exponent",
    "extremal_search",
    "gen_cn",
    "gen_dn",
    "gen_geometric",
    "gen_interval",
    "generate",
    "growth",
    "mat_growth",
    "productset",
    "sumset",
    "sweep",
    "verify_certificate",
    "__version__",
]
