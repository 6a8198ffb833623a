"""Toolkit for decomposing regular graphs into four locally irregular subgraphs.

The pipeline splits a regular graph into two balanced halves via a random
vertex colouring plus balanced edge rounding, then splits each half again
using greedy per-vertex edge selections and a degree-constrained subgraph
solver. Standalone pieces (rounding, DCS solving, an exact small-graph
oracle, and the numeric feasibility system for the governing constants) are
usable on their own, in-process or through the ``lidecomp`` CLI.
"""

from lidecomp.constants import (
    ConstantProfile,
    REFERENCE_PROFILE,
    check_profile,
    min_feasible_d,
    optimize_profile,
)
from lidecomp.errors import BudgetError, InputError
from lidecomp.graphs import (
    Graph,
    generate_circulant,
    generate_regular,
    is_locally_irregular,
    read_graph,
    write_graph,
)
from lidecomp.pipeline import decompose_to_four, verify_decomposition
from lidecomp.rounding import FractionalEdgeWeights, balanced_round, verify_rounding

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "ConstantProfile",
    "FractionalEdgeWeights",
    "Graph",
    "InputError",
    "REFERENCE_PROFILE",
    "balanced_round",
    "check_profile",
    "decompose_to_four",
    "generate_circulant",
    "generate_regular",
    "is_locally_irregular",
    "min_feasible_d",
    "optimize_profile",
    "read_graph",
    "verify_decomposition",
    "verify_rounding",
    "write_graph",
    "__version__",
]
