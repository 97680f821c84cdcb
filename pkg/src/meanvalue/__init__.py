"""Mean-value inequalities for polynomials and rational maps of the sphere.

Numerical tools for the chord/derivative quantity S(p, x), its two rational
analogues built from Moebius normalizations, Newton maps, holomorphic fixed
point indices and the excluded-multiplier disc.
"""

from .complexpoly import Polynomial, RootFindingError, gcd, root_clusters, roots
from .index import fixed_point_index, forbidden_check, forbidden_disc, index_sum_check
from .newton import characterize, h_condition_check, newton_map
from .ratmap import RationalMap, random_map
from .smale import PreconditionError, smale_quantity, thm1_report, thm2_report
from .sphere import INF, MoebiusMap, chordal, cross_ratio, from_three_points

__version__ = "0.1.0"

__all__ = [
    "INF", "MoebiusMap", "Polynomial", "PreconditionError", "RationalMap",
    "RootFindingError", "characterize", "chordal", "cross_ratio", "fixed_point_index",
    "forbidden_check", "forbidden_disc", "from_three_points", "gcd", "h_condition_check",
    "index_sum_check", "newton_map", "random_map", "root_clusters", "roots",
    "smale_quantity", "thm1_report", "thm2_report", "__version__",
]
