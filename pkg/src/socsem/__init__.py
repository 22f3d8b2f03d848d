"""Socio-semantic network toolkit.

Builds binary actor/attribute incidence matrices from declaration lists,
refines attribute and actor similarity jointly (each mode's inner product
is taken in the other mode's similarity metric), thresholds the result
into comparable semantic networks, and composes those networks with
fuzzy set operations.
"""

from .errors import (
    DataError,
    DegenerateDataError,
    NumericError,
    ParseError,
    SocsemError,
    UnknownLabelError,
    ValidationError,
)
from .graphio import (
    NetworkStats,
    read_matrix,
    read_network,
    stats,
    write_edgelist,
    write_gexf,
    write_matrix,
    write_matrix_csv,
)
from .ingest import (
    BipartitePairs,
    DropReport,
    IncidenceMatrix,
    build_incidence,
    parse_pairs,
    top_k_attributes,
    write_pairs,
)
from .netops import NetworkAlignment, align, intersect, subtract
from .semnet import (
    BridgeEntry,
    DegreeEntry,
    PartitionMap,
    SemanticNetwork,
    bridge_report,
    degree_report,
    density,
    read_partition,
    threshold_network,
    write_partition,
)
from .simcore import (
    CenteredViews,
    ConvergenceReport,
    FixedPointResult,
    SimilarityMatrix,
    center,
    pearson_actors,
    pearson_attributes,
    run_fixed_point,
    similarity_between,
    similarity_step,
)
from .synth import SyntheticBlocks, planted_blocks

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "SocsemError",
    "DataError",
    "ParseError",
    "ValidationError",
    "DegenerateDataError",
    "UnknownLabelError",
    "NumericError",
    # ingest
    "BipartitePairs",
    "IncidenceMatrix",
    "DropReport",
    "parse_pairs",
    "top_k_attributes",
    "build_incidence",
    "write_pairs",
    # simcore
    "CenteredViews",
    "SimilarityMatrix",
    "ConvergenceReport",
    "FixedPointResult",
    "center",
    "pearson_attributes",
    "pearson_actors",
    "similarity_step",
    "run_fixed_point",
    "similarity_between",
    # semnet
    "SemanticNetwork",
    "PartitionMap",
    "DegreeEntry",
    "BridgeEntry",
    "threshold_network",
    "density",
    "degree_report",
    "bridge_report",
    "read_partition",
    "write_partition",
    # netops
    "NetworkAlignment",
    "align",
    "intersect",
    "subtract",
    # graphio
    "NetworkStats",
    "write_gexf",
    "write_edgelist",
    "read_network",
    "stats",
    "write_matrix",
    "read_matrix",
    "write_matrix_csv",
    # synth
    "SyntheticBlocks",
    "planted_blocks",
]
