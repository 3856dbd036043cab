"""Star products as points of the associativity constraint manifold.

Structure-constant algebras, their axiom checks, Lagrange-multiplier geodesic
tests, and projected geodesic integration in product-coordinate space.
"""
from .algebra import (
    AlgebraSpec,
    AutomorphismMap,
    AxiomReport,
    ProductCurve,
    associator_form,
    check_automorphism,
    check_commutativity,
    check_poisson_axioms,
    check_star_axioms,
    curve_eval,
    multiply,
    product_norm_estimate,
    pushforward_product,
)
from .clifford import clifford_algebra, generator_rotation
from .constraints import QuadraticConstraintSystem, build_constraint_system
from .geodesic import (
    GeodesicState,
    IntegratorConfig,
    MultiplierReport,
    TrajectoryRecord,
    geodesic_acceleration,
    integrate_geodesic,
    multiplier_operator,
    project_tangent,
    project_to_manifold,
    quantum_product_initial_data,
    verify_geodesic_point,
)
from .kernels import BACKEND
from .linalg import DenseTensor, LinearSystemReport, contract, flatten, least_squares_solve, unflatten

__version__ = "0.1.0"
