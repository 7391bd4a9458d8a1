"""Finite S5 duality, canonical liftings of symmetric-group actions, and
model checking of the theories whose models they are."""

from .actions import (
    SymmetricAction,
    apply,
    canonical_action,
    decompose_faithful,
    fix_is_trivial,
    is_faithful,
    orbits,
    stabilizer,
    validate_action,
)
from .algebras import (
    AlgebraHom,
    S5Algebra,
    algebra_to_frame,
    check_s5_axioms,
    frame_to_algebra,
    hom_to_pmorphism,
    pmorphism_to_hom,
)
from .errors import S5LiftError, ValidationError
from .frames import (
    ClusterFamily,
    FamilyMorphism,
    FiniteFrame,
    PMorphism,
    family_coequalizer,
    frame_coequalizer,
    frame_coproduct,
    frame_pushout,
)
from .lifting import (
    canonical_lifting,
    enumerate_nat_transformations,
    induced_transformation,
    verify_lifting_conditions,
)
from .presheaves import NatTransformation, TruncatedPresheaf
from .surjections import (
    Permutation,
    Surjection,
    coequalizer_surj,
    compose,
    count_surjections,
    enumerate_permutations,
    enumerate_surjections,
    factor,
    pushout_surj,
)
from .theory import (
    check_fix_trivial,
    check_lex_preservation,
    check_T1,
    check_T2,
    classify_model,
    model_from_frame,
)

__all__ = [
    "SymmetricAction",
    "apply",
    "canonical_action",
    "decompose_faithful",
    "fix_is_trivial",
    "is_faithful",
    "orbits",
    "stabilizer",
    "validate_action",
    "AlgebraHom",
    "S5Algebra",
    "algebra_to_frame",
    "check_s5_axioms",
    "frame_to_algebra",
    "hom_to_pmorphism",
    "pmorphism_to_hom",
    "S5LiftError",
    "ValidationError",
    "ClusterFamily",
    "FamilyMorphism",
    "FiniteFrame",
    "PMorphism",
    "family_coequalizer",
    "frame_coequalizer",
    "frame_coproduct",
    "frame_pushout",
    "canonical_lifting",
    "enumerate_nat_transformations",
    "induced_transformation",
    "verify_lifting_conditions",
    "NatTransformation",
    "TruncatedPresheaf",
    "Permutation",
    "Surjection",
    "coequalizer_surj",
    "compose",
    "count_surjections",
    "enumerate_permutations",
    "enumerate_surjections",
    "factor",
    "pushout_surj",
    "check_fix_trivial",
    "check_lex_preservation",
    "check_T1",
    "check_T2",
    "classify_model",
    "model_from_frame",
]

__version__ = "0.1.0"
