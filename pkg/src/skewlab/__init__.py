"""Numerical laboratory for partially hyperbolic skew-products on T^2 x S^1.

Builds F(x, t) = (f(x), t + gamma(x)) over hyperbolic toral automorphisms
and mechanically verifies the chain: coboundary <=> invariant graph
foliation, tangency of the hyperbolic splitting to the transfer graph,
Frobenius integrability of the joint bundle, and the divergence obstruction
to F preserving a contact form.
"""

from .fields import TrigField, circle_dist, torus_dist, wrap
from .torus import NotHyperbolicError, SkewProduct, ToralAutomorphism, cat_map
from .cocycles import (
    birkhoff_sum,
    coboundary_from_transfer,
    livsic_obstruction,
    solve_cohomological,
)
from .splitting import (
    FiberCorrection,
    GraphLeaf,
    fiber_correction,
    graph_tangency_check,
    joint_bundle_form,
    leaf_invariance_check,
)
from .forms import (
    OneForm,
    contact_test,
    exterior_derivative,
    frobenius_form,
    frobenius_test,
    graph_form,
    invariant_form_residual,
    transport_identity_check,
    pullback_covector,
    reeb_field,
)
from .charfol import (
    PlanarVectorField,
    SurfaceGraph,
    characteristic_field,
    contact_verdict,
    divergence,
    hamiltonian_form_check,
    singular_points,
)

__version__ = "0.1.0"
