"""Counting real zeros of a function by quadrature, with multiplicities."""

from .errors import *  # noqa: F401,F403
from .kernels import Kernel, builtin_kernels, custom_kernel, get_kernel, kernel_mass, KERNEL_NAMES
from .expr import parse, pretty, evaluate
from .jets import Jet
from .models import FunctionModel, expression_model, poly_model, eval_jet
from .counting import (
    CountReport, CountRequest, Grid, OddMap, admissibility_scan, boundary_terms, count_zeros,
    count_zeros_generalized, count_zeros_periodic, estimate_Ibound, generalized_integrand,
    integrand,
)
from .multiplicity import (
    GWeight, MultiplicityProfile, MultiplicitySums, decode_profile, estimate_multiplicity,
    injectivity_gap, probe_multiplicity, select_c, weighted_count, weighted_integrand,
)
from .oracle import RationalPoly, scan_count, sturm_count, sturm_multiplicities

__version__ = "0.1.0"
