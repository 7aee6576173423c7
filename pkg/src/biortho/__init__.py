"""Ideal von Neumann premeasurement: Schmidt decompositions, the degenerate
basis ambiguity, and the basis singled out by the apparatus dynamics."""

from ._backend import BACKEND
from .errors import BiorthoError, NotAPremeasurement
from .measurement import (
    AmbiguityReport,
    CalibrationTable,
    MeasurementModel,
    ambiguity_report,
    counterfactual_apparatus,
    evolution_operator,
    extract_calibration_basis,
    pointer_physicality_check,
    premeasure,
)
from .models import bit_by_bit_model, spin_half, stern_gerlach_model
from .schmidt import (
    BasisChange,
    BipartiteState,
    SchmidtDecomposition,
    alternative_decomposition,
    degeneracy_classes,
    schmidt_decompose,
    uniqueness_condition,
)
from .tensor import hermitian_eig, kron, operator_distance, unitary_exp

__version__ = "0.1.0"
