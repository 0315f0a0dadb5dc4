"""Universal structures for classes defined by forbidden homomorphisms, via lifts."""

from .amalgam import (
    AmalgamationError,
    AmalgamProblem,
    extension_property_check,
    free_amalgam,
    generic_build,
    lift_amalgam,
    one_point_extensions,
    universality_check,
)
from .decompose import (
    DecompositionError,
    PieceCatalogue,
    RootedPiece,
    build_catalogue,
    minimal_cuts,
    minimal_homomorphic_images,
    piece_of_piece_check,
    pieces_of,
    rooted_isomorphic,
)
from .duality import (
    NotATree,
    construct_dual,
    csp_membership,
    dual_candidate,
    find_duality_counterexample,
    is_relational_tree,
    monadic_csp_template,
    verify_dual_pair,
)
from .evenodd import (
    EMPTY,
    OMEGA,
    EvenOddError,
    EvenOddPair,
    EvenOddSpace,
    KatetovNode,
    edge_graph_of_space,
    evenodd_amalgam,
    graph_to_evenodd,
    in_class_Kl,
    katetov_distance,
    katetov_embed,
    katetov_extend,
    pair_add,
    pair_leq,
    validate_space,
)
from .liftclass import (
    ForbiddenFamily,
    Lift,
    RootedLift,
    canonical_lift,
    forbidden_family,
    indicator_product,
    member_of_L,
    member_via_forbidden,
    universal_witness,
)
from .relcore import (
    Signature,
    SignatureMismatch,
    Structure,
    VertexMap,
    complete,
    core_of,
    cycle,
    directed_path,
    find_embedding,
    find_homomorphism,
    hom_exists,
    is_homomorphism,
    is_minimal_family,
    make_digraph,
    make_graph,
    path,
    petersen,
)
