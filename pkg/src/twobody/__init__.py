"""Level sets, bifurcations and contact geometry of the reduced two-body problem on the sphere."""

from .core_model import (
    ParamPair,
    ReducedState,
    SphericalPoint,
    casimir,
    from_spherical,
    grad_hamiltonian,
    hamiltonian,
    hamiltonian_vector_field,
    poisson_matrix,
    spherical_hamiltonian,
    to_spherical,
    xi_of_q,
)
from .level_sets import (
    CompactPoint,
    FiberType,
    TopologyClass,
    classify_fiber,
    classify_topology,
    hole_count_fast,
    hole_count_oracle,
    sample_level_set,
)
from .bifurcation import BifurcationDiagram, EquilibriumPoint, trace_diagram, verify_coincidence
from .dynamics import Trajectory, drift_report, integrate

__all__ = [
    "BifurcationDiagram",
    "CompactPoint",
    "EquilibriumPoint",
    "FiberType",
    "ParamPair",
    "ReducedState",
    "SphericalPoint",
    "TopologyClass",
    "Trajectory",
    "casimir",
    "classify_fiber",
    "classify_topology",
    "drift_report",
    "from_spherical",
    "grad_hamiltonian",
    "hamiltonian",
    "hamiltonian_vector_field",
    "hole_count_fast",
    "hole_count_oracle",
    "integrate",
    "poisson_matrix",
    "sample_level_set",
    "spherical_hamiltonian",
    "to_spherical",
    "trace_diagram",
    "verify_coincidence",
    "xi_of_q",
]
