"""Constructive Delaunay realization toolkit.

Given a combinatorial plane triangulation, generate polynomial constraint
systems encoding realizability, search for a satisfying placement
numerically, certify it with exact rational geometry, and emit an integer
point set whose Delaunay triangulation is the input graph.
"""

from .geometry import Rat, RatPoint, pt
from .plane_graph import PlaneTriangulation, build_triangulation, validate_triangulation
from .constraints import build_const, build_constsqu, evaluate, export_system
from .oracle import delaunay, general_position_check, as_plane_triangulation
from .realizer import RealizeConfig, RealizationResult, certify, realize, scale_to_integers
from .solver import SolverConfig, solve
from .instances import fan_triangulation, radius_bounds, random_instance

__all__ = [
    "Rat", "RatPoint", "pt",
    "PlaneTriangulation", "build_triangulation", "validate_triangulation",
    "build_const", "build_constsqu", "evaluate", "export_system",
    "delaunay", "general_position_check", "as_plane_triangulation",
    "RealizeConfig", "RealizationResult", "certify", "realize", "scale_to_integers",
    "SolverConfig", "solve",
    "fan_triangulation", "radius_bounds", "random_instance",
]

__version__ = "0.1.0"
