"""Approximate Schauder frames on finite sequence spaces l^p(d)."""
from .expansion import (
    ExpansionResult,
    ZeroLambda,
    completion_lower_bound,
    expand_tight,
    expand_variant_a,
    expand_variant_b,
    minimal_tight_completion,
)
from .frames import (
    Classification,
    FunctionalSystem,
    NotAnASF,
    ReconstructionSystem,
    classify,
    frame_operator,
    system_from_dict,
    system_to_dict,
    verify_reconstruction,
)
from .linalg import (
    DimensionMismatch,
    Functional,
    LinearMap,
    NotInvertible,
    PVector,
    Tolerances,
    UnsupportedExact,
    apply,
    compose,
    identity,
    invert,
    numerical_rank,
    operator_p_norm,
    outer,
    rank_factorization,
)
from .sequence_spaces import (
    analysis_operator,
    canonical_system,
    deficiency_system,
    example_one_system,
    p_asf_expansion,
    random_system,
    shift_left,
    shift_right,
    synthesis_operator,
)

__version__ = "0.1.0"
