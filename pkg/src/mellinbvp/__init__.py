"""Mellin convolution operators, their symbols on the contour rectangle, and a
mixed Dirichlet-Neumann problem on the half-plane reduced to a model system of
Mellin equations.

Modules
-------
mellin      kernels, weighted log grids, Mellin transform and operator application
symbols     lifted symbols on the rectangle, corner-continuous branches
fredholm    ellipticity, winding numbers, region scans, solvability criteria
solver      model-system solvers (Mellin diagonalisation and Nystrom)
potentials  half-plane layer potentials, traces and the manufactured pipeline
cli         command-line interface
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConditioningError,
    DomainError,
    GrowthWarning,
    NonEllipticError,
    NumericalError,
    ResolutionError,
    SingularSampleError,
    TruncationWarning,
)
from .mellin import (  # noqa: E402
    KernelTerm,
    LogGridFunction,
    MellinLine,
    MeromorphicKernel,
    apply_mellin_convolution,
    k1_kernel,
    mellin_forward,
    mellin_inverse,
    mellin_symbol,
)
from .symbols import Edge, RectanglePath, RectanglePoint, SpaceParams, SymbolSpec, identity_symbol, k1_symbol  # noqa: E402
from .fredholm import Verdict, bvp_criterion, index_report, scan_region, winding_number  # noqa: E402
from .solver import ModelSystemInstance, solve_mellin, solve_nystrom  # noqa: E402
from .potentials import BoundaryGrid, CASES, double_layer, run_pipeline, single_layer, trace_operators  # noqa: E402
