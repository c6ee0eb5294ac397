"""Persistent homology toolkit.

Build filtrations from point clouds, weighted graphs, and bitmaps; compute
Z/2 persistence diagrams with representative cycles; post-process diagrams
into histograms, persistence images, and matching distances.
"""

from .complexes import (
    BoundaryMatrix,
    Cube,
    Filtration,
    Simplex,
    SimplicialComplex,
    boundary,
    make_complex,
    make_filtration,
)
from .alpha import (
    PointCloud,
    alpha_filtration,
    delaunay,
    weighted_alpha_filtration,
)
from .combinatorial import (
    DistanceMatrix,
    WeightedGraph,
    clique_filtration,
    rips_filtration,
)
from .cubical import (
    Bitmap,
    cubical_filtration,
    distance_transform,
)
from .persistence import (
    PersistenceDiagram,
    PersistencePairing,
    RepresentativeCycle,
    betti_numbers,
    compute_persistence,
    representative_cycle,
    tighten_cycle_1d,
)
from .analysis import (
    DiagramDistanceReport,
    DiagramHistogram,
    PersistenceImage,
    bottleneck_distance,
    histogram,
    persistence_image,
    wasserstein_distance,
)
from .fileio import (
    DiagramFile,
    read_bitmap,
    read_diagram_file,
    read_distance_matrix,
    read_point_cloud,
    write_diagram_file,
)
from .svgplot import histogram_svg
from .oracle import oracle_persistence
from . import errors

__version__ = "0.1.0"

__all__ = [
    "Bitmap",
    "BoundaryMatrix",
    "Cube",
    "DiagramDistanceReport",
    "DiagramFile",
    "DiagramHistogram",
    "DistanceMatrix",
    "Filtration",
    "PersistenceDiagram",
    "PersistenceImage",
    "PointCloud",
    "PersistencePairing",
    "RepresentativeCycle",
    "Simplex",
    "SimplicialComplex",
    "WeightedGraph",
    "alpha_filtration",
    "betti_numbers",
    "bottleneck_distance",
    "boundary",
    "clique_filtration",
    "compute_persistence",
    "cubical_filtration",
    "delaunay",
    "distance_transform",
    "errors",
    "histogram",
    "histogram_svg",
    "make_complex",
    "make_filtration",
    "oracle_persistence",
    "persistence_image",
    "read_bitmap",
    "read_diagram_file",
    "read_distance_matrix",
    "read_point_cloud",
    "representative_cycle",
    "rips_filtration",
    "tighten_cycle_1d",
    "wasserstein_distance",
    "weighted_alpha_filtration",
    "write_diagram_file",
]
