"""Optimal incoherent and two-qubit coherent eavesdropping on the BB84 protocol."""
from .coherent import CoherentParams, PyramidSolution, from_free, product_embedding, pyramid_solve
from .errors import AttackError, ConsistencyError, DomainError, InfeasibleError, OptimizationError
from .incoherent import IncoherentParams, new_params, optimal_attack
from .optimizer import OptimizationOptions, maximize_pair_information, maximize_pair_success, sweep_curves

__version__ = "0.1.0"

__all__ = [
    "AttackError", "CoherentParams", "ConsistencyError", "DomainError", "IncoherentParams",
    "InfeasibleError", "OptimizationError", "OptimizationOptions", "PyramidSolution",
    "from_free", "maximize_pair_information", "maximize_pair_success", "new_params",
    "optimal_attack", "product_embedding", "pyramid_solve", "sweep_curves",
]
