"""Cutting-plane strengthenings of the Lovasz theta function."""

from .graph import Graph, complement, parse_dimacs, write_dimacs, read_dimacs
from .model import Cut, Family, Problem, SdpModel, build_theta_coloring, build_theta_stable
from .solver import PrimalSolution, SolverConfig, Status, certify, solve, theta
from .cutloop import BoundReport, LoopAbort, LoopConfig, compute_bounds, integer_bound

__version__ = "0.1.0"
