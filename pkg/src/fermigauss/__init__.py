"""Fermionic Gaussian states, channels and their Petz recovery maps at the covariance level."""

from .channel import (
    GaussianChannel,
    adjoint,
    apply,
    apply_map,
    compose,
    identity_channel,
    is_cptp,
    sandwich_inv_sqrt,
    sandwich_sqrt,
    validate_cp,
    validate_tp,
    validate_unital,
)
from .errors import (
    DomainError,
    FaithfulnessError,
    InvalidInputError,
    InvalidStateError,
    NumericalConsistencyError,
    SingularityError,
    SizeLimitError,
    StrictPositivityError,
)
from .fidelity import fidelity, monotonicity_margin, overlap
from .linalg import (
    CanonicalForm,
    canonical_decompose,
    even_function,
    odd_function,
    pfaffian,
    pseudo_inverse,
    reconstruct,
    support_pseudo_apply,
    williamson_values,
)
from .models import (
    Dilation,
    attenuator,
    dilation_channel,
    erasure,
    random_channel,
    random_dilation,
    random_state,
    unitary_channel,
)
from .recovery import SupportPetz, petz, petz_on_support, petz_via_composition, rotated_petz
from .state import (
    GROUND_STATE,
    CovarianceMatrix,
    QuadraticHamiltonian,
    maximally_mixed,
    power_rotation,
    purity_spectrum,
    sqrt_state_spectrum,
    state_from_hamiltonian,
    validate_covariance,
    wick_expectation,
)

__version__ = "0.1.0"
