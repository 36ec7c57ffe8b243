"""Groverian entanglement measure and Grover search on n-qudit registers."""

__version__ = "0.1.0"

from .entropy import schmidt_coefficients, von_neumann_entropy
from .errors import *  # noqa: F401,F403
from .evolution import trace_general, trace_two_qutrit
from .grover import (
    GroverConfig,
    diffusion_reflect,
    grover_iterate,
    optimal_iterations,
    oracle_reflect,
    run_search,
    success_probability,
)
from .measure import (
    EntanglementReport,
    MethodInapplicable,
    OptimizerConfig,
    groverian,
    pmax_closed_form_two_qutrit_real,
    pmax_grid,
    pmax_numeric,
    pmax_schmidt_bipartite,
)
from .product import (
    QuditProductAngles,
    QutritProductAngles,
    overlap_gradient,
    overlap_probability,
    qudit_product_state,
    qutrit_product_state,
)
from .qudit import (
    DensityMatrix,
    QuditRegisterState,
    basis_index,
    basis_state,
    inner_product,
    make_state,
    reduced_density_matrix,
    tensor_product,
    uniform_state,
)
from .trace import EvolutionTrace, TraceRecord
