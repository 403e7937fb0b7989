"""Finite symplectic polar spaces, their dual polar graphs, and the metric
recognition of apartments via isometric hypercube embeddings."""

from .apartments import (
    ApartmentWitness,
    Embedding,
    base_subspace,
    is_apartment,
    is_isometric_embedding,
    recover_frame,
    search_hypercube_embeddings,
    search_isometric_embeddings,
    verify_lemma1,
    verify_theorem2,
)
from .graphs import (
    DenseGraph,
    HypercubeVertex,
    all_pairs_distances,
    dual_polar_graph,
    geodesics_between,
    hypercube,
    verify_lemma2,
)
from .linalg import GF, Subspace, contains, gf, intersect, rref, sum_span
from .morphisms import (
    GraphEmbedding,
    InducedPointMap,
    LiftError,
    check_frames_preserving,
    induced_point_map,
    lift_frame_preserving_map,
    search_dualpolar_embeddings,
    shifted_point_injection,
    verify_chow,
    verify_lemma5,
    verify_lemma5_bulk,
    verify_theorem3,
)
from .polar import (
    Frame,
    PolarSpace,
    ResidueSpace,
    apartment_of_frame,
    check_polar_axioms,
    enumerate_frames,
    enumerate_points,
    enumerate_singular,
    form_value,
    is_collinear,
    is_frame,
    perp_subspace,
    projdim,
    residue_collinear,
    sample_frames,
    star,
)
from .reporting import CounterexampleError

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
