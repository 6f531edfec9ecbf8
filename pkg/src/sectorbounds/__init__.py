"""Verification toolkit for Rotfel'd-type norm inequalities on sectorial matrices."""

from .bounds import (
    BoundKind,
    BoundReport,
    PartitionedMatrix,
    dominance_remark,
    lhs_value,
    optimize_s,
    power_corollary_check,
    rhs_value,
    verify_bound,
)
from .matrix import (
    apply_function,
    cartesian_decompose,
    hermitian_eigen,
    is_psd,
    polar_decompose,
    random_matrix,
    singular_values,
)
from .norms import ConcaveFunction, NormFamily, make_concave, norm_value, ui_dominance, weak_majorize
from .sectorial import NotSectorial, SectorAngle, fov_boundary, lemma22_equivalence, sector_angle, sector_contains

__version__ = "0.1.0"
