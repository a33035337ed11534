"""Desk-scale laboratory for Stark-Heegner and ATR cycles.

Exact arithmetic (fields, orders, forms, embeddings, p-adics, tree) feeds
deterministic sampling of closed geodesics and their canonical coordinates
on the quotient of (upper half plane) x (p-adic upper half plane), plus
equidistribution diagnostics against the Haar limit.  No randomness is
used anywhere: identical inputs give bit-identical outputs.
"""

from .errors import PreconditionError, PrecisionError, SearchBoundExceeded
from .orders import (
    Order,
    QuadElement,
    QuadField,
    field_from_discriminant,
    fundamental_unit,
    make_field,
    totally_positive_fundamental_unit,
    trace_zero_decomposition,
)
from .forms import QForm, compose, narrow_class_group, picard_S, reduce_form
from .embeddings import (
    Embedding,
    embedding_from_form,
    enumerate_classes_bruteforce,
    is_optimal,
    star_action,
)
from .hyperbolic import (
    GeodesicArc,
    GeodesicWalker,
    automorph,
    geodesic_from_embedding,
    reduce_to_fundamental_domain,
    sample_geodesic,
)
from .padic import PadicNumber, Qp2Element, embed_sqrt_dK, moebius_qp2
from .tree import TreeVertex, act_on_vertex, navigate_to_base, reduce_point, residue_class
from .cycles import SHCycle, CyclePoint, build_cycles, canonical_points, toral_discriminant
from .stats import (
    Box,
    BoxPartition,
    duke_geodesic_report,
    hyperbolic_box_mass,
    joint_independence,
    residue_uniformity,
    sh_cycle_report,
)

__version__ = "0.1.0"
