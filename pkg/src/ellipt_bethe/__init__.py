"""Eight-vertex model at eta = 2P/Q: generalized algebraic Bethe ansatz and scalar products."""
from .algebra import dense_determinant, dense_eigen, pair, projective_distance
from .bethe import BetheSystem, bethe_residuals, solve_bethe, sum_rule_defect
from .errors import (EllipticBetheError, IllConditionedStateError, NotOnShellError, PoleError,
                     SingularConfigurationError, SingularGaugeError, ThetaDomainError)
from .gauge_aba import BetheState, GaugeParams, bethe_vector, transfer_eigenvalue, vacuum_eigenvalues
from .qop import q_eigenvalue_model, q_operator
from .scalar import (det_overlap_free_fermion, free_fermion_scalar, gaudin_matrix, normalized_scalar_product,
                     overlap_matrix)
from .theta import ModularParam, theta, theta_prime
from .vertex import ModelParams, monodromy, r_matrix, transfer_matrix

__version__ = "0.1.0"

__all__ = [
    "BetheState", "BetheSystem", "EllipticBetheError", "GaugeParams", "IllConditionedStateError", "ModelParams",
    "ModularParam", "NotOnShellError", "PoleError", "SingularConfigurationError", "SingularGaugeError",
    "ThetaDomainError", "bethe_residuals", "bethe_vector", "dense_determinant", "dense_eigen",
    "det_overlap_free_fermion", "free_fermion_scalar", "gaudin_matrix", "monodromy", "normalized_scalar_product",
    "pair", "projective_distance", "q_eigenvalue_model", "q_operator", "r_matrix", "overlap_matrix",
    "solve_bethe", "sum_rule_defect", "theta", "theta_prime", "transfer_eigenvalue", "transfer_matrix",
    "vacuum_eigenvalues",
]
