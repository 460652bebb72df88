"""Dual Gromov-Hausdorff propinquity toolkit for finite-dimensional quantum metric spaces."""

__version__ = "0.1.0"

from .kernels import BACKEND
from .errors import (
    CertificateError,
    InconsistentSeminormError,
    InvalidMorphismError,
    NonConvergenceError,
    PropinquityError,
    ResourceError,
    ValidationError,
)
from .cstar_core import (
    CStarAlgebra,
    Element,
    State,
    StarMorphism,
    dirac_state,
    direct_sum,
    jordan_product,
    lie_product,
    operator_norm,
    probability_state,
    tracial_state,
    vector_state,
)
from .quantum_metric import QuantumMetricSpace, check_leibniz, check_lipschitz_pair, eval_seminorm
from .mk_engine import Interval, MKResult, build_state_net, diameter_estimate, mk_distance
from .tunnels import Tunnel, direct_sum_tunnel, doubling_tunnel, identity_tunnel
from .journeys import Journey, PropinquityRegistry, build_chain_space, compose, reduce_journey, reverse_journey
from .zoo import (
    FiniteMetricSpace,
    FuzzyTorusSpec,
    circle_subgroup_space,
    correspondence_to_tunnel,
    finite_metric_space,
    fuzzy_torus_space,
    gh_distance_exact,
)
