"""Symmetric subspaces of bosonic Fock space, SU(p,q) coherent states and
truncated Haar unitaries, with exact and sampled checks."""

__version__ = "0.1.0"

from .errors import BudgetError, CapacityError, DimensionError, ParameterError, SingularityError, SupqError
from .exact import GaussianRational
from .constants import PiMultiple, normalization_constant
from .poly import SparsePoly
from .hyperbolic import (
    GroupElement,
    InvariantMeasureSpec,
    in_disc,
    mobius_act,
    random_disc_point,
    random_group_element,
    sample_invariant,
    squeeze_element,
    validate_group_element,
)
from .fock import (
    FockOperator,
    FockPoly,
    Layout,
    Z_poly,
    bargmann_inner,
    invariant_subspace_dim,
    is_invariant,
    laplacian,
    laplacian_kernel_dim_in_invariants,
    maximally_entangled,
    partial_trace,
    reduced_density,
    twirl,
)
from .coherent import CoherentState, expand, fidelity, husimi, overlap, tensor_power
from .phase_space import covariance, is_symplectic, omega, symplectic_of
from .bases import casimir, su11_commutator_check, su11_operators, su22_coherent_expansion_check, su22_gram
from .definetti import definetti_gap, ratio_and_bound, reproducing_kernel_check, resolution_gram
from .haar import (
    CountDistribution,
    TruncationParams,
    count_fidelity,
    negbin_moments,
    sample_haar_truncated,
    tv_lower_bound,
    tv_lower_bounds,
    tv_n1_exact,
)
from .results import ExperimentResult
