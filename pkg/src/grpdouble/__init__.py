"""Product-set doubling, convolution and coset structure on finite groups."""
from .convolution import GroupFunction, GroupMeasure, adjoint, convolve, inner, norm_sq
from .detect import (
    covering_bound_check,
    covering_frontier,
    freiman_coset,
    hamidoune_witness,
    jump_check,
    kneser_witness,
)
from .errors import CapExceededError, EmptySetError, GroupError, GroupMismatchError, NotApplicableError
from .groups import Group, build_group, cyclic, dihedral, direct_product, quaternion8, symmetric
from .periodicity import analytic_pipeline, continuity_witness, cs_witness, fourfold
from .sets import Subset, doubling_report, enumerate_subgroups, inverse_set, product_set, subgroup_closure
from .survey import SurveyConfig, emit_report, parse_set_spec, run_survey

__version__ = "0.1.0"
