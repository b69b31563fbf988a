"""Compare two representation spaces through aligned mapper graphs.

Pipeline: load two embedding matrices over a shared item universe, build a
mapper graph per side, join them on shared-item edges, lay the pair out with
a tunable cross-graph alignment force, discover and classify local
correspondences, and aggregate any pair into supernodes for membrane-style
inspection. `mapalign.cli` drives batch runs; `mapalign.service` serves the
same pipeline over HTTP.
"""

__version__ = "0.1.0"

from .align import AffinityWeights, AlignmentPair, DiscoveryResult, discover_alignments
from .bubbles import BubbleGeometry, bubble_contour, bubble_set
from .ingest import (
    RepresentationSet,
    SessionInput,
    intersect_items,
    load_representation_set,
    project_2d,
    save_representation_set,
)
from .joint import JointGraph, build_joint, jaccard
from .layout import LayoutParams, LayoutResult, energy, optimize_layout, separate_side_by_side
from .mapper import MapperGraph, MapperNode, MapperParams, auto_eps, build_cover, build_mapper, dbscan
from .membrane import MembraneLayout, internal_layout, membrane_layout
from .merge import MergeSequence, Supernode, greedy_merge, state_at
from .motif import MotifLabel, classify, classify_pair, component_correspondence, query_by_motif

__all__ = [
    "AffinityWeights",
    "AlignmentPair",
    "BubbleGeometry",
    "DiscoveryResult",
    "JointGraph",
    "LayoutParams",
    "LayoutResult",
    "MapperGraph",
    "MapperNode",
    "MapperParams",
    "MembraneLayout",
    "MergeSequence",
    "MotifLabel",
    "RepresentationSet",
    "SessionInput",
    "Supernode",
    "auto_eps",
    "bubble_contour",
    "bubble_set",
    "build_cover",
    "build_joint",
    "build_mapper",
    "classify",
    "classify_pair",
    "component_correspondence",
    "dbscan",
    "discover_alignments",
    "energy",
    "greedy_merge",
    "internal_layout",
    "intersect_items",
    "jaccard",
    "load_representation_set",
    "membrane_layout",
    "optimize_layout",
    "project_2d",
    "query_by_motif",
    "save_representation_set",
    "separate_side_by_side",
    "state_at",
]
