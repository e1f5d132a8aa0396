"""Entanglement capability of self-inverse Hamiltonian evolution."""

from .capability import (
    capability_bound,
    capability_self_inverse,
    entropy_rate_fd,
    gate_capability,
    rate_commutator,
    rate_sweep,
    rate_zero_general,
    rate_zero_schmidt,
)
from .operator_entanglement import (
    correspondence_check,
    lower_bound_check,
    op_concurrence,
    op_entanglement,
    op_rate,
    op_rate_max,
    op_schmidt,
)
from .self_inverse import (
    ProductHamiltonian,
    SelfInverseFactor,
    boson_parity,
    evolution,
    evolve_state,
    make_factor,
    parity,
    pauli_z,
)
from .states import (
    BipartiteState,
    binomial_state,
    ecs,
    entropy,
    max_entangled,
    optimal_input,
    schmidt,
    spin_coherent,
)

__version__ = "0.1.0"
