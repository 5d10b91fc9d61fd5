"""Numerical odd Chern characters, degree functionals, and super-connection
localization on spheres and product spheres."""

from .chern import (
    assemble_split_map,
    chern_simons,
    deg,
    deg_star,
    generator,
    maurer_cartan,
    odd_chern,
    transgression_pair,
)
from .collapse import CollapseMap, build_collapse_map, mapping_degree, signed_preimage_count
from .domains import ChartedSphereDomain, sphere_volume
from .fields import (
    FormField,
    constant_field,
    exterior_derivative,
    integrate_top,
    pullback,
    volume_field,
)
from .forms import (
    GradedMatrixForm,
    SuperMatrix,
    nilpotent_exp,
    normalize_2pi,
    power_odd,
)
from .maps import (
    ChartMap,
    DualMatrixMap,
    HomotopyFamily,
    NumericMatrixMap,
    ProductMatrixMap,
    SmoothMatrixMap,
    circle_winding,
    su2_identity,
)
from .results import DegreeResult
from .superconn import (
    GammaReport,
    LocalizeReport,
    SuperBundleModel,
    flz_point_case,
    gamma_boundary_integral,
    gamma_closed_form,
    gamma_integrand,
    gamma_report,
    gaussian_moment,
    index_report,
    localize,
    superconn_chern_form,
    unitarize,
)

__version__ = "0.1.0"
