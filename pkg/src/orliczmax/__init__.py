"""orliczmax: a numerical laboratory for weighted Orlicz-type maximal
functions over Carleson squares of the upper half-plane.

Core objects: Young functions with complementary functions and strong-type
class tests; tessellations of Carleson squares with exact alpha-measures;
cell-wise density fields with Luxembourg box norms; Bekolle-Bonami weight
class constants; dyadic/shifted/lattice maximal operators; stopping families
and Carleson embeddings; and theorem-level experiment reports.
"""

from ._kernels import backend_name
from .field import GridField, box_mass, integrate, lp_norm, luxembourg_norm
from .grid import (
    CarlesonSquare,
    Domain,
    Interval,
    ShiftedDyadicGrid,
    Tessellation,
    TopHalf,
    alpha_measure,
    cover_interval,
    region_intersection_measure,
    shifted_interval,
)
from .maximal import (
    MaximalField,
    brute_force_maximal,
    dyadic_maximal,
    hardy_littlewood,
    kmu_field,
    two_grid_combined,
)
from .stopping import (
    CarlesonSequence,
    StoppingFamily,
    carleson_embedding_check,
    carleson_measure_levelset_check,
    levelset_mass_bound,
    stopping_family,
)
from .verify import (
    TheoremInstance,
    condition_constant,
    embedding_ratio,
    levelset_inclusion_check,
    negative_instance,
    theorem_report,
)
from .weights import (
    WeightDescriptor,
    bekolle_constant,
    binfty_constant,
    doubling_report,
    power_weight,
    unit_weight,
)
from .young import YoungFunction, bp_check, conjugate, delta2_constant, inverse

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "GridField",
    "integrate",
    "box_mass",
    "luxembourg_norm",
    "lp_norm",
    "Interval",
    "CarlesonSquare",
    "TopHalf",
    "Domain",
    "Tessellation",
    "ShiftedDyadicGrid",
    "alpha_measure",
    "region_intersection_measure",
    "shifted_interval",
    "cover_interval",
    "MaximalField",
    "dyadic_maximal",
    "brute_force_maximal",
    "two_grid_combined",
    "hardy_littlewood",
    "kmu_field",
    "StoppingFamily",
    "stopping_family",
    "levelset_mass_bound",
    "CarlesonSequence",
    "carleson_embedding_check",
    "carleson_measure_levelset_check",
    "TheoremInstance",
    "condition_constant",
    "embedding_ratio",
    "levelset_inclusion_check",
    "theorem_report",
    "negative_instance",
    "WeightDescriptor",
    "power_weight",
    "unit_weight",
    "bekolle_constant",
    "binfty_constant",
    "doubling_report",
    "YoungFunction",
    "conjugate",
    "inverse",
    "delta2_constant",
    "bp_check",
    "__version__",
]
