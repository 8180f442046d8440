"""Wyner common information and Gray-Wyner rate points for Gaussian pairs."""

from .canonical import (
    CanonicalDecomposition,
    apply_transformation,
    canonical_decomposition,
    canonical_template,
    verify_canonical_form,
)
from .errors import GWError, IdenticalPartPresent, InfeasibleError, InfeasibleQw, InputError, NumericalBreakdown
from .information import (
    lower_bound_given_qw,
    minimize_lower_bound,
    mutual_information,
    wyner_ci_closed_form,
    wyner_common_information,
)
from .model import JointGaussianPair, NumericTolerances, canonical_pair, load_pair, scalar_pair, validate_joint_covariance
from .rate_region import (
    conditional_rdf,
    gray_wyner_triple,
    in_dw,
    joint_rdf_oracle,
    marginal_rdf,
    water_filling,
    weighted_functional,
    wyner_lossy_ci,
)
from .realization import (
    assemble_joint_covariance,
    conditional_independence_gap,
    identity_qw,
    random_feasible_qw,
    sample,
    validate_qw,
)

__all__ = [name for name in dir() if not name.startswith("_")]
