"""Exact-arithmetic tools for 2-sum and 3-sum polyhedra and their diameters."""
from .errors import (ConstructionError, ContractError, EnumerationCapError, GenerationError,
                     IntegrityError, NoVerticesError, PerturbationError, PolysumError)
from .polyhedron import (AdjacencyGraph, StandardFormSystem, Vertex, Walk, adjacency_graph,
                         are_adjacent, diameter, distance, enumerate_vertices, is_simple,
                         perturb_to_simple, restrict_face)
from .ratmat import RationalMatrix, format_rational, kernel_basis, parse_rational, rref, solve

__version__ = "0.1.0"
