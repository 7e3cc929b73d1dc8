"""Maximum genus embeddings of complete bipartite graphs.

Rotation-system embeddings and face tracing (:mod:`maxgenus.embedding`), an
exhaustive census oracle (:mod:`maxgenus.oracle`), the v-type-edge
constructor (:mod:`maxgenus.vtype`) and exact lower bounds
(:mod:`maxgenus.bounds`).
"""
from .bounds import f1, f2, stahl_bound
from .embedding import (
    Dart,
    Embedding,
    EmbeddingError,
    FaceCensus,
    Graph,
    ParseError,
    Vertex,
    betti,
    build_complete_bipartite,
    is_one_face,
    is_upper_embeddable_witness,
    max_genus_upper_bound,
    mirror,
    parse,
    serialize,
    trace_faces,
)
from .oracle import CensusReport, face_census, rotation_count
from .vtype import generate_all, predicted_count, verify_distinct

__version__ = "0.1.0"
