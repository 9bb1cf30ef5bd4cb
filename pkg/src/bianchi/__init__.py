"""Bianchi fundamental polyhedra, Floege complexes and H^2 of SL2(O_{-m})."""

from .arith import FieldContext, KElem, field_context
from .geometry import FundamentalRectangle, Hemisphere, UhsPoint
from .swan import PolyhedronData, compute_polyhedron, singular_points

__all__ = [
    "FieldContext",
    "KElem",
    "field_context",
    "FundamentalRectangle",
    "Hemisphere",
    "UhsPoint",
    "PolyhedronData",
    "compute_polyhedron",
    "singular_points",
]
