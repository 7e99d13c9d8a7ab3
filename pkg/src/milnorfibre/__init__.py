"""Homology of Milnor fibres of non-isolated hypersurface singularities.

The input is a deformation diagram: the singular branches of a
one-parameter deformation, their points of special type and any
isolated critical points, together with integral monodromy data.
"""

from .cw_oracle import OracleMismatch, OracleReport, cross_validate
from .diagram import DeformationDiagram, diagram_from_dict, diagram_to_dict, load_diagram, validate
from .errors import (
    CoverageError,
    DataMissingError,
    DiagramValidationError,
    DimensionError,
    InconsistentDataError,
    MilnorFibreError,
    ParseError,
)
from .homology import (
    assemble_j,
    betti_bound_special,
    betti_bound_vertical,
    betti_intervals,
    bouquet_check,
    branch_euler,
    branch_group,
    compose_vertical,
    concentration_check,
    euler_characteristic,
    mv_exact,
    nonsplitting_check,
    trivial_bound,
    wang_groups,
)
from .report import AnalysisConfig, Report, analyze, render_text
from .zlattice import AbelianGroup, IntMatrix, SmithForm, cokernel, rank, rank_mod_p, smith_normal_form

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
