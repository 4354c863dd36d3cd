"""Exact tools for single-system probabilistic theories and their branch-local dynamics.

The package answers, with exact rational arithmetic, which transformations
of a theory's state space survive two requirements: states certain to sit
in another interferometer branch stay fixed, and branch statistics never
change.  Theories whose states keep full freedom under a certain branch
outcome freeze completely (only the identity survives); theories whose
states are pinned by certainty keep non-classical dynamics.
"""

from .exactla import Mat, Rat, Vec, mat, rat, vec
from .mub import (
    MubReport,
    OutcomePermutation,
    is_mutually_unbiased,
    permute_measurement_stats,
    qubit_axis_unbiased,
)
from .restriction import (
    ConditionalSet,
    RestrictionClass,
    RestrictionReport,
    UncertaintyReport,
    check_quantum_like_uncertainty,
    classify_restriction,
    conditional_state_set,
)
from .solver import (
    AllowedTransformSet,
    CandidateVerified,
    ConstraintSystem,
    LinearStage,
    PolytopeFamily,
    TheoremReport,
    TradeoffReport,
    UniqueIdentity,
    VerificationReport,
    allowed_transform_set,
    assemble_constraints,
    count_forced_eigenvectors,
    family_member,
    impose_state_preservation,
    restriction_dynamics_tradeoff,
    sample_family_points,
    solve_linear_stage,
    verify_main_theorem,
    verify_transformation,
)
from .theories import (
    BallStateSpace,
    Effect,
    MeasurementSpec,
    MembershipResult,
    PolytopeStateSpace,
    Rep,
    Role,
    StateVec,
    TheorySpec,
    builtin_theory,
    effect,
    from_minimal,
    make_boxworld,
    make_classical,
    make_gbit,
    make_octahedron,
    make_qubit,
    membership,
    outcome_probability,
    to_expectation,
    to_minimal,
    to_probability,
)
from .theory_io import (
    dump_theory,
    dump_transformation,
    load_theory,
    load_theory_file,
    load_transformation,
    load_transformation_file,
)

__version__ = "0.1.0"

__all__ = [
    "AllowedTransformSet",
    "BallStateSpace",
    "CandidateVerified",
    "ConditionalSet",
    "ConstraintSystem",
    "Effect",
    "LinearStage",
    "Mat",
    "MeasurementSpec",
    "MembershipResult",
    "MubReport",
    "OutcomePermutation",
    "PolytopeFamily",
    "PolytopeStateSpace",
    "Rat",
    "Rep",
    "RestrictionClass",
    "RestrictionReport",
    "Role",
    "StateVec",
    "TheoremReport",
    "TheorySpec",
    "TradeoffReport",
    "UncertaintyReport",
    "UniqueIdentity",
    "Vec",
    "VerificationReport",
    "allowed_transform_set",
    "assemble_constraints",
    "builtin_theory",
    "check_quantum_like_uncertainty",
    "classify_restriction",
    "conditional_state_set",
    "count_forced_eigenvectors",
    "dump_theory",
    "dump_transformation",
    "effect",
    "family_member",
    "from_minimal",
    "impose_state_preservation",
    "is_mutually_unbiased",
    "load_theory",
    "load_theory_file",
    "load_transformation",
    "load_transformation_file",
    "make_boxworld",
    "make_classical",
    "make_gbit",
    "make_octahedron",
    "make_qubit",
    "mat",
    "membership",
    "outcome_probability",
    "permute_measurement_stats",
    "qubit_axis_unbiased",
    "rat",
    "restriction_dynamics_tradeoff",
    "sample_family_points",
    "solve_linear_stage",
    "to_expectation",
    "to_minimal",
    "to_probability",
    "vec",
    "verify_main_theorem",
    "verify_transformation",
]
