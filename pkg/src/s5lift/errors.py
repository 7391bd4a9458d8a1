"""Exception hierarchy.

Every error raised by the library derives from :class:`S5LiftError`, so the
CLI can map any of them to exit code 2 with a machine-readable payload.
"""


class S5LiftError(Exception):
    """Base class for all library errors."""

    code = "error"

    def to_json(self):
        return {"error": self.code, "message": str(self)}


class ValidationError(S5LiftError, ValueError):
    code = "invalid"


class OutOfRange(ValidationError):
    code = "out_of_range"


class NotSurjective(ValidationError):
    code = "not_surjective"


class NotBijective(ValidationError):
    code = "not_bijective"


class SortMismatch(ValidationError):
    code = "sort_mismatch"


class CapExceeded(S5LiftError):
    code = "cap_exceeded"


# frames

class NotOnto(ValidationError):
    code = "not_onto"

    def __init__(self, world, msg=None):
        self.world = world
        super().__init__(msg or f"class image of world {world} is a proper subset of a target class")


class NotIntoOneClass(ValidationError):
    code = "not_into_one_class"

    def __init__(self, world, msg=None):
        self.world = world
        super().__init__(msg or f"class image of world {world} meets two target classes")


class NotParallel(ValidationError):
    code = "not_parallel"


class SourceMismatch(ValidationError):
    code = "source_mismatch"


# algebras

class NotS5(ValidationError):
    code = "not_s5"


class NotEquivalence(ValidationError):
    code = "not_equivalence"


class NotHomomorphism(ValidationError):
    code = "not_homomorphism"


class NoAtomCover(ValidationError):
    code = "no_atom_cover"


class AtomClash(ValidationError):
    code = "atom_clash"


# actions

class DegreeMismatch(ValidationError):
    code = "degree_mismatch"


class InvalidAction(ValidationError):
    code = "invalid_action"


class NotFaithful(ValidationError):
    code = "not_faithful"


# presheaves / liftings

class LevelMismatch(ValidationError):
    code = "level_mismatch"


class NotFunctorial(ValidationError):
    code = "not_functorial"


class NotEquivariant(ValidationError):
    code = "not_equivariant"


class WitnessConflict(ValidationError):
    code = "witness_conflict"


# theories

class NotAModel(ValidationError):
    code = "not_a_model"


class NonIntegralOrbit(ValidationError):
    code = "non_integral_orbit"


class ClusterExceedsTruncation(ValidationError):
    code = "cluster_exceeds_truncation"
