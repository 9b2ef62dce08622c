"""Finite median algebras with saturation sequences and halfspace checks."""

from .errors import (
    AxiomViolation,
    BoundExceeded,
    EmbeddingNotFaithful,
    EmptyCarrier,
    EmptySide,
    GroundSizeTooLarge,
    IndexOutOfRange,
    InternalInvariantViolation,
    MedianFraisseError,
    NotConvex,
    NotCovering,
    NotDisjoint,
    NotLinked,
    NotMedianClosed,
    NotMedianPreserving,
    NotSurjective,
    ParseError,
    PointNotInCarrier,
    ResourceLimit,
    TypeMismatch,
)
from .median_core import (
    ConvexSet,
    Halfspace,
    MaximalLinkedSystem,
    MedianAlgebra,
    brute_force_halfspaces,
    canonicalize,
    convex_hull,
    convex_set,
    enumerate_convex_sets,
    from_median_table,
    halfspace_from_side,
    halfspaces,
    interval,
    majority,
    median,
    mls_median,
    point_to_str,
    quotient_by_halfspaces,
    separate_convex,
    str_to_point,
    superextension,
    validate,
)
from .morphisms import (
    Epimorphism,
    PullbackData,
    automorphisms,
    check_epimorphism,
    compose,
    enumerate_epis,
    factor_epimorphism,
    find_isomorphism,
    identity,
    pullback,
)
from .fraisse_engine import (
    BoundedSearchReport,
    CertificateEntry,
    CounterexampleReport,
    ExtensionWitness,
    InterleavingData,
    InverseSequence,
    M1Witness,
    M2Witness,
    M3Witness,
    RoundData,
    SaturationProvenance,
    SplitData,
    SplitProvenance,
    StartProvenance,
    StuckReport,
    back_and_forth,
    build_fraisse,
    check_M1,
    check_M2,
    check_M3,
    check_extension_property,
    composite_projection,
    enumerate_algebras,
    enumerate_convex_covers,
    saturation_step,
    split_extension,
)
from .cli_io import (
    RunConfig,
    algebra_from_json,
    algebra_to_dot,
    algebra_to_json,
    load_sequence,
    mls_from_json,
    mls_to_json,
    morphism_from_json,
    morphism_to_json,
    save_sequence,
    sequence_from_json,
    sequence_to_json,
)

__version__ = "0.1.0"
