"""Numerical radius and weighted numerical radius machinery.

A library plus CLI that computes the numerical radius v(x) and its weighted
counterpart v_a(x) for complex matrices, builds Orlicz-function pairs, and
evaluates a registry of upper bounds with a randomized verification
harness.
"""

from .errors import (
    DimensionMismatchError,
    FixtureMismatchError,
    MatrixFileError,
    MissingRoleError,
    NegativeInputError,
    NoDensityError,
    NonFiniteError,
    NotHermitianError,
    NotPSDError,
    OrliczRadiusError,
    SingularMatrixError,
    SingularWeightError,
)
from .linalg import (
    HermEig,
    hermitian_eig,
    hermitian_part,
    matrix_abs,
    matrix_func,
    operator_norm,
    polar_unitary,
    psd_power,
)
from .orlicz import (
    ComplementaryPair,
    OrliczFn,
    complementary,
    is_submultiplicative,
    named_orlicz,
    validate_orlicz,
    young_check,
)
from .radius import (
    AState,
    Weight,
    a_adjoint,
    a_numerical_radius,
    a_seminorm,
    is_a_positive,
    is_a_selfadjoint,
    numerical_radius,
    numerical_range_boundary,
    oracle_a_numerical_radius,
    oracle_a_seminorm,
    random_state,
    state_apply,
)
from .bounds import (
    BoundReport,
    Instance,
    evaluate_bound,
    lemma_check,
    registry_ids,
)

__version__ = "0.1.0"
